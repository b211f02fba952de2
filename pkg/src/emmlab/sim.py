"""Euler-Maruyama simulation of slow mean-reverting drivers and log prices.

Driver i follows a slow Ornstein-Uhlenbeck process and asset i's log price
drifts with the contemporaneous driver level (left-endpoint discretization):

    Y_i(t+1)    = Y_i(t) - eps * kappa * Y_i(t) * dt + sqrt(eps) * nu * sqrt(dt) * Z_B
    logS_i(t+1) = logS_i(t) + (mu0 + beta * Y_i(t)) * dt + sigma * sqrt(dt) * Z_W

The long-run variance of each driver is nu^2 / (2 * kappa) independently of
eps, which only sets the speed.  All normals come from labelled Philox
substreams (counter-based), so runs are bit-reproducible for a given seed
and independent of evaluation order.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class SimConfig:
    n_assets: int = 3
    epsilon: float = 0.05
    kappa: float = 1.0
    nu: float = 0.3
    mu0: float = 0.0
    beta: float = 0.5
    sigma: float = 0.1
    dt: float = 1.0 / 252.0
    n_steps: int = 2520
    seed: int = 0
    y0: Union[float, tuple[float, ...]] = 0.0
    s0: Union[float, tuple[float, ...]] = 1.0

    def __post_init__(self):
        if self.n_assets < 1:
            raise ValidationError(f"n_assets must be >= 1, got {self.n_assets}")
        if self.epsilon < 0:
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon}")
        if not self.kappa > 0:
            raise ValidationError(f"kappa must be > 0, got {self.kappa}")
        if self.nu < 0:
            raise ValidationError(f"nu must be >= 0, got {self.nu}")
        if self.sigma < 0:
            raise ValidationError(f"sigma must be >= 0, got {self.sigma}")
        if not self.dt > 0:
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if self.n_steps < 1:
            raise ValidationError(f"n_steps must be >= 1, got {self.n_steps}")
        for v in self.y0_vector():
            if not math.isfinite(v):
                raise ValidationError(f"y0 must be finite, got {v}")
        for v in self.s0_vector():
            if not v > 0:
                raise ValidationError(f"s0 must be > 0, got {v}")

    def _broadcast(self, v, name) -> tuple[float, ...]:
        if isinstance(v, (int, float)):
            return (float(v),) * self.n_assets
        out = tuple(float(x) for x in v)
        if len(out) != self.n_assets:
            raise ValidationError(
                f"{name} has {len(out)} entries for {self.n_assets} assets"
            )
        return out

    def y0_vector(self) -> tuple[float, ...]:
        return self._broadcast(self.y0, "y0")

    def s0_vector(self) -> tuple[float, ...]:
        return self._broadcast(self.s0, "s0")


class SubstreamRegistry:
    """Deterministic independent random streams addressed by label.

    Each label derives a Philox generator from (seed, sha256(label)), so a
    stream depends only on its label and the seed, never on creation
    order.  Re-registering a label is a configuration error: two model
    components silently sharing noise is exactly the bug this guards."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._labels: set[str] = set()

    def stream(self, label: str) -> np.random.Generator:
        if label in self._labels:
            raise ValidationError(f"substream label registered twice: {label!r}")
        self._labels.add(label)
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        entropy = [self.seed & 0xFFFFFFFFFFFFFFFF, int.from_bytes(digest[:8], "big")]
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class PathPanel:
    """One simulated scenario: drivers, log prices, and one-period returns.

    y and log_s have shape (n_assets, n_steps + 1); returns has shape
    (n_assets, n_steps) with returns[i, t] = log_s[i, t + 1] - log_s[i, t].
    """

    y: np.ndarray = field(repr=False)
    log_s: np.ndarray = field(repr=False)
    returns: np.ndarray = field(repr=False)
    config: SimConfig

    @property
    def n_assets(self) -> int:
        return self.y.shape[0]

    @property
    def n_steps(self) -> int:
        return self.returns.shape[1]


def simulate(config: Optional[SimConfig] = None, **overrides) -> PathPanel:
    """Run the coupled driver / log-price recursion for one seed."""
    cfg = config or SimConfig()
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    k = cfg.n_assets
    t_steps = cfg.n_steps
    reg = SubstreamRegistry(cfg.seed)
    z_b = np.stack(
        [reg.stream(f"B{i + 1}").standard_normal(t_steps) for i in range(k)]
    )
    z_w = np.stack(
        [reg.stream(f"W{i + 1}").standard_normal(t_steps) for i in range(k)]
    )
    sq_dt = math.sqrt(cfg.dt)
    drift_keep = 1.0 - cfg.epsilon * cfg.kappa * cfg.dt
    vol_y = math.sqrt(cfg.epsilon) * cfg.nu * sq_dt

    y = np.empty((k, t_steps + 1))
    y[:, 0] = cfg.y0_vector()
    for t in range(t_steps):
        y[:, t + 1] = drift_keep * y[:, t] + vol_y * z_b[:, t]

    increments = (cfg.mu0 + cfg.beta * y[:, :-1]) * cfg.dt + cfg.sigma * sq_dt * z_w
    log_s = np.empty((k, t_steps + 1))
    log_s[:, 0] = np.log(cfg.s0_vector())
    np.cumsum(increments, axis=1, out=log_s[:, 1:])
    log_s[:, 1:] += log_s[:, :1]
    returns = np.diff(log_s, axis=1)
    return PathPanel(y=y, log_s=log_s, returns=returns, config=cfg)
