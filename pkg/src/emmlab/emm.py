"""Equivalent-martingale-measure analysis on scenario trees.

Existence is decided by maximizing the smallest path weight: maximize eps
subject to sum(q) = 1, the per-(time, block, asset) martingale equalities,
and q_path >= eps.  The optimum eps* is the exact largest floor any
feasible measure can put under every path, so strict feasibility is
eps* > 0 (rational inputs) or eps* > TOL (float inputs, where modelling
noise below TOL is not trusted).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from . import lp
from .errors import InfeasibleMarketError, NotAdaptedError, UnknownIdError
from .market import (
    TOL,
    AssetGroup,
    FiltrationSpec,
    Number,
    ScenarioTree,
    _check_filtration_shape,
    is_adapted,
)

GroupLike = Union[AssetGroup, Iterable[str], str]


def _group(tree: ScenarioTree, group: GroupLike) -> AssetGroup:
    if isinstance(group, AssetGroup):
        g = group
    elif isinstance(group, str):
        g = AssetGroup.of([group])
    else:
        g = AssetGroup.of(group)
    missing = [a for a in g.sorted_ids() if a not in tree.assets]
    if missing:
        raise UnknownIdError(f"unknown asset ids: {missing}")
    return g


@dataclass(frozen=True)
class Measure:
    """A strictly positive probability measure on the tree's paths, stored
    in tree path order."""

    weights: tuple[Number, ...]

    def __post_init__(self):
        if not self.weights:
            raise ValueError("empty measure")
        for w in self.weights:
            if not w > 0:
                raise ValueError(f"measure weight {w} is not strictly positive")
        s = sum(self.weights)
        if all(isinstance(w, (int, Fraction)) for w in self.weights):
            if s != 1:
                raise ValueError(f"weights sum to {s}, expected exactly 1")
        elif abs(float(s) - 1.0) > TOL:
            raise ValueError(f"weights sum to {float(s)}, expected 1 +/- {TOL}")

    def weight(self, tree: ScenarioTree, path_id: str) -> Number:
        return self.weights[tree.path_index(path_id)]


@dataclass(frozen=True)
class ResidualEntry:
    t: int
    block: tuple[str, ...]
    asset: str
    value: float


@dataclass(frozen=True)
class ResidualReport:
    entries: tuple[ResidualEntry, ...]

    @property
    def max_abs(self) -> float:
        return max((abs(e.value) for e in self.entries), default=0.0)


@dataclass(frozen=True)
class EmmCertificate:
    """A strictly positive measure together with its audited residuals."""

    measure: Measure
    residuals: ResidualReport

    def __post_init__(self):
        if self.residuals.max_abs > TOL:
            raise ValueError(
                f"certificate residual {self.residuals.max_abs} exceeds {TOL}"
            )

    @property
    def max_residual(self) -> float:
        return self.residuals.max_abs


@dataclass(frozen=True)
class SolutionGeometry:
    """Feasibility plus the affine dimension of the feasible-measure set,
    measured on the terminal atoms of the filtration (mass shuffling inside
    an atom is invisible to the filtration and does not count)."""

    feasible: bool
    affine_dimension: Optional[int]


def _require_adapted(tree, filtration, group: AssetGroup):
    for a in group.sorted_ids():
        if not is_adapted(tree, filtration, a):
            raise NotAdaptedError(
                f"asset {a} is not adapted to the given filtration"
            )


def _increments(tree: ScenarioTree, asset: str):
    series = tree.assets[asset]
    return [
        [series[i][t + 1] - series[i][t] for t in range(tree.n_steps)]
        for i in range(tree.n_paths)
    ]


def emm_exists(
    tree: ScenarioTree,
    filtration: FiltrationSpec,
    group: GroupLike,
) -> Optional[EmmCertificate]:
    """Decide existence of an equivalent martingale measure for the group
    relative to the filtration; returns a certificate or None.

    Precondition: every asset in the group is adapted to the filtration.
    """
    g = _group(tree, group)
    _check_filtration_shape(tree, filtration)
    _require_adapted(tree, filtration, g)
    n = tree.n_paths
    inc = {a: _increments(tree, a) for a in g.sorted_ids()}

    # variables: [eps_plus, eps_minus, s_0 .. s_{n-1}] with q = eps + s
    a_rows: list[list[Fraction]] = []
    b_rhs: list[Fraction] = []
    row = [Fraction(n), Fraction(-n)] + [Fraction(1)] * n
    a_rows.append(row)
    b_rhs.append(Fraction(1))
    for t in range(tree.n_steps):
        for block in filtration.partitions[t].blocks:
            for asset in g.sorted_ids():
                coeffs = [Fraction(0)] * (n + 2)
                drift = Fraction(0)
                for i in block:
                    d = Fraction(inc[asset][i][t])
                    coeffs[2 + i] = d
                    drift += d
                coeffs[0] = drift
                coeffs[1] = -drift
                a_rows.append(coeffs)
                b_rhs.append(Fraction(0))
    c = [Fraction(1), Fraction(-1)] + [Fraction(0)] * n
    res = lp.simplex_max(c, a_rows, b_rhs)
    if res.status != lp.OPTIMAL:
        return None
    eps = res.value
    threshold = Fraction(0) if tree.is_exact else Fraction(TOL)
    if eps <= threshold:
        return None
    weights = tuple(eps + res.x[2 + i] for i in range(n))
    measure = Measure(weights)
    report = check_martingale(tree, measure, filtration, g)
    return EmmCertificate(measure=measure, residuals=report)


def check_martingale(
    tree: ScenarioTree,
    measure: Measure,
    filtration: FiltrationSpec,
    group: GroupLike,
) -> ResidualReport:
    """Audit a measure against the martingale equalities of a filtration.

    Residual at (t, block, asset) is the measure-weighted sum of the asset
    increment over the block, i.e. E_Q[S_{t+1} 1_B] - S_t Q(B) whenever the
    asset is adapted.  Works for any measure, however produced.
    """
    g = _group(tree, group)
    _check_filtration_shape(tree, filtration)
    if len(measure.weights) != tree.n_paths:
        raise ValueError("measure covers a different number of paths")
    entries = []
    for t in range(tree.n_steps):
        for block in filtration.partitions[t].blocks:
            for asset in g.sorted_ids():
                series = tree.assets[asset]
                total = sum(
                    measure.weights[i] * (series[i][t + 1] - series[i][t])
                    for i in block
                )
                entries.append(
                    ResidualEntry(
                        t=t,
                        block=tuple(tree.paths[i] for i in block),
                        asset=asset,
                        value=float(total),
                    )
                )
    return ResidualReport(tuple(entries))


def _terminal_atoms(filtration: FiltrationSpec):
    return filtration.partitions[-1].blocks


def solution_geometry(
    tree: ScenarioTree,
    filtration: FiltrationSpec,
    group: GroupLike,
) -> SolutionGeometry:
    """Affine dimension of the set of equivalent martingale measures.

    Variables are the terminal atoms of the filtration (asset values are
    constant inside an atom at every time, so the market only sees atom
    masses).  Dimension 0 means the measure is unique as the filtration
    sees it.
    """
    g = _group(tree, group)
    cert = emm_exists(tree, filtration, g)
    if cert is None:
        return SolutionGeometry(feasible=False, affine_dimension=None)
    atoms = _terminal_atoms(filtration)
    atom_of = {}
    for k, atom in enumerate(atoms):
        for i in atom:
            atom_of[i] = k
    matrix: list[list[Fraction]] = [[Fraction(1)] * len(atoms)]
    inc = {a: _increments(tree, a) for a in g.sorted_ids()}
    for t in range(tree.n_steps):
        for block in filtration.partitions[t].blocks:
            block_atoms = sorted({atom_of[i] for i in block})
            for asset in g.sorted_ids():
                row = [Fraction(0)] * len(atoms)
                for k in block_atoms:
                    rep = atoms[k][0]
                    row[k] = Fraction(inc[asset][rep][t])
                matrix.append(row)
    dim = len(atoms) - lp.exact_rank(matrix)
    return SolutionGeometry(feasible=True, affine_dimension=dim)


def is_complete(
    tree: ScenarioTree,
    filtration: FiltrationSpec,
    group: GroupLike,
) -> bool:
    """Dynamic completeness: at every (t, block) the asset-increment matrix
    across the next-period sub-blocks has rank (sub-block count - 1), which
    is exactly the condition that every block-measurable claim is
    replicable from cash plus the group's assets.

    Precondition: the market is feasible (an equivalent martingale measure
    exists); completeness is relative to such a measure.
    """
    g = _group(tree, group)
    if emm_exists(tree, filtration, g) is None:
        raise InfeasibleMarketError(
            "completeness is undefined: no equivalent martingale measure"
        )
    inc = {a: _increments(tree, a) for a in g.sorted_ids()}
    for t in range(tree.n_steps):
        nxt = filtration.partitions[t + 1]
        owner = nxt.block_index_map()
        for block in filtration.partitions[t].blocks:
            sub_ids = sorted({owner[i] for i in block})
            m = len(sub_ids)
            rows = []
            for asset in g.sorted_ids():
                rows.append(
                    [Fraction(inc[asset][nxt.blocks[k][0]][t]) for k in sub_ids]
                )
            if lp.exact_rank(rows) != m - 1:
                return False
    return True
