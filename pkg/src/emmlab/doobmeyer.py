"""Discrete Doob-Meyer decomposition diagnostics.

For a chosen information structure, the one-step conditional mean
m_t = E[R_{t+1} | G_t] is estimated by expanding-window least squares: at
each t past the warmup, coefficients are fitted on all earlier
(features_u, R_{u+1}) pairs and applied to the time-t features.  The
cumulative sum of m-hat is the finite-sample predictable part A_t, and the
headline statistic is the predictable fraction of quadratic variation

    fraction_qv = sum(m_hat_t^2) / sum(R_{t+1}^2)     (t >= warmup).

An admissible structure on a martingale-like market should score near the
estimation-noise floor; structures that peek at future driver moves score
above it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import EstimationError, ValidationError
from .sim import PathPanel, SimConfig, simulate

#: minimum number of post-warmup samples for a meaningful diagnostic
MIN_POST_WARMUP = 100

DEFAULT_WARMUP = 250
DEFAULT_RIDGE = 650.0
DEFAULT_WINDOW = 21

STRUCTURE_ORDER = (
    "price-only",
    "local",
    "pairwise",
    "global-smoothed",
    "global-future-leak",
)


@dataclass(frozen=True)
class PriceOnly:
    """Lagged own return only."""


@dataclass(frozen=True)
class Local:
    """Lagged own return plus one driver level (0-based index)."""

    driver: int


@dataclass(frozen=True)
class Pairwise:
    """Lagged own return plus two distinct driver levels."""

    first: int
    second: int

    def __post_init__(self):
        if self.first == self.second:
            raise ValidationError("pairwise structure needs two distinct drivers")


@dataclass(frozen=True)
class GlobalSmoothed:
    """Lagged own return plus centered moving averages of all drivers.
    The smoother looks both ways, so this structure is not admissible."""

    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValidationError(
                f"smoothing window must be odd and >= 3, got {self.window}"
            )


@dataclass(frozen=True)
class GlobalFutureLeak:
    """Lagged own return, all driver levels, and the coming one-step driver
    increments: a deliberate look-ahead."""


InformationStructure = Union[
    PriceOnly, Local, Pairwise, GlobalSmoothed, GlobalFutureLeak
]


def structure_label(info: InformationStructure) -> str:
    if isinstance(info, PriceOnly):
        return "price-only"
    if isinstance(info, Local):
        return "local"
    if isinstance(info, Pairwise):
        return "pairwise"
    if isinstance(info, GlobalSmoothed):
        return "global-smoothed"
    if isinstance(info, GlobalFutureLeak):
        return "global-future-leak"
    raise ValidationError(f"unknown information structure: {info!r}")


def smoothed_drivers(panel: PathPanel, window: int) -> np.ndarray:
    """Centered moving average of each driver, window truncated at the
    sample edges."""
    half = (window - 1) // 2
    y = panel.y
    n = y.shape[1]
    cs = np.concatenate([np.zeros((y.shape[0], 1)), np.cumsum(y, axis=1)], axis=1)
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half, n - 1)
    return (cs[:, hi + 1] - cs[:, lo]) / (hi - lo + 1)


def _check_indices(panel: PathPanel, info: InformationStructure):
    k = panel.n_assets
    if isinstance(info, Local) and not 0 <= info.driver < k:
        raise ValidationError(f"driver index {info.driver} outside 0..{k - 1}")
    if isinstance(info, Pairwise):
        for d in (info.first, info.second):
            if not 0 <= d < k:
                raise ValidationError(f"driver index {d} outside 0..{k - 1}")


def feature_matrix(
    panel: PathPanel, info: InformationStructure, asset: int
) -> np.ndarray:
    """Feature rows for all times 0..n_steps-1 at once; rows before the
    required lag are zeroed and never used as samples."""
    if not 0 <= asset < panel.n_assets:
        raise ValidationError(f"asset index {asset} outside 0..{panel.n_assets - 1}")
    _check_indices(panel, info)
    t_steps = panel.n_steps
    lagged = np.zeros(t_steps)
    lagged[1:] = panel.returns[asset, :-1]
    cols = [np.ones(t_steps), lagged]
    if isinstance(info, Local):
        cols.append(panel.y[info.driver, :t_steps])
    elif isinstance(info, Pairwise):
        cols.append(panel.y[info.first, :t_steps])
        cols.append(panel.y[info.second, :t_steps])
    elif isinstance(info, GlobalSmoothed):
        smooth = smoothed_drivers(panel, info.window)
        cols.extend(smooth[d, :t_steps] for d in range(panel.n_assets))
    elif isinstance(info, GlobalFutureLeak):
        cols.extend(panel.y[d, :t_steps] for d in range(panel.n_assets))
        dy = np.diff(panel.y, axis=1)
        cols.extend(dy[d, :] for d in range(panel.n_assets))
    x = np.column_stack(cols)
    x[0, :] = 0.0  # lag not available at t = 0
    return x


def features(
    panel: PathPanel, info: InformationStructure, asset: int, t: int
) -> np.ndarray:
    """Feature vector for predicting returns[asset, t] from time-t
    information (or deliberately leaked information)."""
    if t < 1:
        raise ValidationError(f"t={t} is below the required lag of 1")
    if t >= panel.n_steps:
        raise ValidationError(f"t={t} has no following return to predict")
    return feature_matrix(panel, info, asset)[t]


@dataclass(frozen=True)
class OlsResult:
    m_hat: np.ndarray = field(repr=False)
    final_coef: np.ndarray


def expanding_ols(
    targets: np.ndarray,
    feats: np.ndarray,
    warmup: int = DEFAULT_WARMUP,
    ridge: float = DEFAULT_RIDGE,
) -> OlsResult:
    """Walk-forward least squares: the fit at time t uses only samples
    u < t.  The ridge penalty applies to every coefficient except the
    intercept (assumed to be column 0).  It is parameterized as an
    equivalent number of pseudo-observations: the penalty on feature j is
    ridge times that feature's mean squared value over the window, so each
    coefficient is shrunk by roughly n/(n + ridge) after n samples.  Early
    fits, where expanding-window noise concentrates, are therefore damped
    hardest, and the shrinkage fades as evidence accumulates; the fit is
    invariant to feature rescaling.  Any positive ridge keeps the normal
    equations non-singular; with ridge = 0 a singular system is an
    estimation error.
    """
    targets = np.asarray(targets, dtype=float)
    feats = np.asarray(feats, dtype=float)
    t_steps, dim = feats.shape
    if len(targets) != t_steps:
        raise ValidationError("targets and features disagree on length")
    if warmup < dim + 10:
        raise ValidationError(
            f"warmup {warmup} too small for {dim} features (need >= {dim + 10})"
        )
    if ridge < 0:
        raise ValidationError(f"ridge must be >= 0, got {ridge}")
    m_hat = np.zeros(t_steps)
    if warmup >= t_steps:
        return OlsResult(m_hat=m_hat, final_coef=np.zeros(dim))
    gram = np.cumsum(np.einsum("ti,tj->tij", feats, feats), axis=0)
    moment = np.cumsum(feats * targets[:, None], axis=0)
    idx = np.arange(warmup, t_steps)
    systems = gram[idx - 1].copy()
    if ridge > 0 and dim > 1:
        # floor the scale so an identically zero feature stays regularized
        diag = np.maximum(systems[:, range(1, dim), range(1, dim)], 1e-6)
        systems[:, range(1, dim), range(1, dim)] += ridge * diag / idx[:, None]
    try:
        coefs = np.linalg.solve(systems, moment[idx - 1][..., None])[..., 0]
    except np.linalg.LinAlgError:
        raise EstimationError(
            "singular normal equations; supply a positive ridge"
        ) from None
    m_hat[idx] = np.einsum("td,td->t", coefs, feats[idx])
    return OlsResult(m_hat=m_hat, final_coef=coefs[-1])


def decompose(
    returns_row: np.ndarray, m_hat: np.ndarray, warmup: int
) -> tuple[np.ndarray, np.ndarray]:
    """Split returns into estimated martingale increments and the running
    predictable part A_t = sum of m_hat over warmup <= u < t."""
    returns_row = np.asarray(returns_row, dtype=float)
    m_hat = np.asarray(m_hat, dtype=float)
    if returns_row.shape != m_hat.shape:
        raise ValidationError("returns and m_hat disagree on length")
    mart = returns_row - m_hat
    a_path = np.zeros(len(m_hat) + 1)
    if warmup < len(m_hat):
        np.cumsum(m_hat[warmup:], out=a_path[warmup + 1 :])
    return mart, a_path


@dataclass(frozen=True)
class DoobMeyerDiagnostics:
    mean_abs_m: float
    rms_m: float
    fraction_qv: float
    m_path: np.ndarray = field(repr=False)
    a_path: np.ndarray = field(repr=False)
    degenerate_qv: bool = False


def diagnostics(
    returns_row: np.ndarray, m_hat: np.ndarray, warmup: int
) -> DoobMeyerDiagnostics:
    """Summary statistics of the estimated predictable part, post-warmup."""
    returns_row = np.asarray(returns_row, dtype=float)
    m_hat = np.asarray(m_hat, dtype=float)
    n_post = len(returns_row) - warmup
    if n_post < MIN_POST_WARMUP:
        raise ValidationError(
            f"{n_post} post-warmup samples, need >= {MIN_POST_WARMUP}"
        )
    post_m = m_hat[warmup:]
    post_r = returns_row[warmup:]
    denom = float(np.sum(post_r**2))
    degenerate = denom == 0.0
    fraction = 0.0 if degenerate else float(np.sum(post_m**2)) / denom
    _, a_path = decompose(returns_row, m_hat, warmup)
    return DoobMeyerDiagnostics(
        mean_abs_m=float(np.mean(np.abs(post_m))),
        rms_m=float(np.sqrt(np.mean(post_m**2))),
        fraction_qv=fraction,
        m_path=m_hat,
        a_path=a_path,
        degenerate_qv=degenerate,
    )


@dataclass(frozen=True)
class AverageRow:
    mean_abs_m: float
    rms_m: float
    fraction_qv: float


def cross_asset_average(rows: Sequence[DoobMeyerDiagnostics]) -> AverageRow:
    if not rows:
        raise ValidationError("cross-asset average of an empty row set")
    return AverageRow(
        mean_abs_m=float(np.mean([r.mean_abs_m for r in rows])),
        rms_m=float(np.mean([r.rms_m for r in rows])),
        fraction_qv=float(np.mean([r.fraction_qv for r in rows])),
    )


def standard_structures(
    asset: int, n_assets: int, window: int = DEFAULT_WINDOW
) -> list[tuple[str, InformationStructure]]:
    """The benchmark ladder for one asset, coarsest information first.
    The pairwise partner is the cyclically next driver."""
    out: list[tuple[str, InformationStructure]] = [
        ("price-only", PriceOnly()),
        ("local", Local(asset)),
    ]
    if n_assets >= 2:
        out.append(("pairwise", Pairwise(asset, (asset + 1) % n_assets)))
    out.append(("global-smoothed", GlobalSmoothed(window)))
    out.append(("global-future-leak", GlobalFutureLeak()))
    return out


@dataclass(frozen=True)
class DiagnosticsRun:
    """Diagnostics for every (asset, structure) cell of one simulation."""

    panel: PathPanel = field(repr=False)
    warmup: int
    ridge: float
    window: int
    asset_labels: tuple[str, ...]
    structure_labels: tuple[str, ...]
    cells: dict = field(repr=False)
    averages: dict = field(repr=False)


def run_diagnostics(
    config: SimConfig,
    warmup: int = DEFAULT_WARMUP,
    ridge: float = DEFAULT_RIDGE,
    window: int = DEFAULT_WINDOW,
) -> DiagnosticsRun:
    """Simulate one seed and score every structure for every asset."""
    panel = simulate(config)
    asset_labels = tuple(f"S{i + 1}" for i in range(config.n_assets))
    cells: dict[tuple[str, str], DoobMeyerDiagnostics] = {}
    labels_seen: list[str] = []
    for i, asset_label in enumerate(asset_labels):
        for label, info in standard_structures(i, config.n_assets, window):
            if label not in labels_seen:
                labels_seen.append(label)
            feats = feature_matrix(panel, info, i)
            fit = expanding_ols(panel.returns[i], feats, warmup, ridge)
            cells[(asset_label, label)] = diagnostics(
                panel.returns[i], fit.m_hat, warmup
            )
    averages = {
        label: cross_asset_average(
            [cells[(a, label)] for a in asset_labels if (a, label) in cells]
        )
        for label in labels_seen
    }
    return DiagnosticsRun(
        panel=panel,
        warmup=warmup,
        ridge=ridge,
        window=window,
        asset_labels=asset_labels,
        structure_labels=tuple(labels_seen),
        cells=cells,
        averages=averages,
    )
