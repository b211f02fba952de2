"""Search over the information structures of a scenario tree.

The admissible candidates for pricing a group of assets are the filtrations
that (a) never separate paths with identical prefixes (non-anticipativity),
and (b) keep the group's assets adapted.  On a finite tree these form an
interval in the partition lattice at every time, which makes exhaustive
enumeration possible for small trees.  Growth is Bell-number fast, so hard
size caps guard every entry point; exceeding a cap raises BudgetError
rather than silently truncating.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .emm import GroupLike, Measure, _group, check_martingale, emm_exists
from .errors import BudgetError, InfeasibleMarketError, MinimalityViolation
from .market import (
    TOL,
    FiltrationSpec,
    Partition,
    ScenarioTree,
    common_coarsening,
    level_partition,
    natural_filtration,
    prefix_partition,
)


@dataclass(frozen=True)
class EnumerationCaps:
    """Size limits for filtration enumeration.  Coarsening counts grow like
    Bell numbers in the atom count, so the path cap is deliberately small."""

    max_paths: int = 12
    max_periods: int = 3
    max_filtrations: int = 200_000


@dataclass(frozen=True)
class FiltrationConstraint:
    """Requirements on a candidate filtration: driver sigma-fields it must
    carry, driver sigma-fields it must not carry, and non-anticipativity."""

    must_contain: frozenset[str]
    must_not_contain: frozenset[str]
    require_nonanticipative: bool = True

    def __post_init__(self):
        overlap = self.must_contain & self.must_not_contain
        if overlap:
            from .errors import ValidationError

            raise ValidationError(
                f"constraint lists {sorted(overlap)} as both required and forbidden"
            )


def _set_partitions(items: tuple) -> Iterator[tuple[tuple, ...]]:
    """All partitions of items via restricted-growth strings, in
    lexicographic string order.  Blocks come out ordered by first element."""
    n = len(items)
    if n == 0:
        yield ()
        return
    a = [0] * n
    while True:
        k = max(a) + 1
        blocks: list[list] = [[] for _ in range(k)]
        for i, g in enumerate(a):
            blocks[g].append(items[i])
        yield tuple(tuple(b) for b in blocks)
        i = n - 1
        while i > 0:
            if a[i] <= max(a[:i]):
                a[i] += 1
                for j in range(i + 1, n):
                    a[j] = 0
                break
            i -= 1
        else:
            return


def _partitions_between(fine: Partition, coarse: Partition) -> Iterator[Partition]:
    """Every partition coarser than `fine` and finer than `coarse`:
    independently group the fine atoms inside each coarse block."""
    owner = coarse.block_index_map()
    per_block: dict[int, list[tuple[int, ...]]] = {k: [] for k in range(coarse.n_blocks)}
    for atom in fine.blocks:
        per_block[owner[atom[0]]].append(atom)
    choices = [
        list(_set_partitions(tuple(atoms))) for _, atoms in sorted(per_block.items())
    ]
    for combo in itertools.product(*choices):
        blocks = []
        for grouping in combo:
            for group_of_atoms in grouping:
                merged: list[int] = []
                for atom in group_of_atoms:
                    merged.extend(atom)
                blocks.append(merged)
        yield Partition.from_blocks(blocks)


def enumerate_filtrations(
    tree: ScenarioTree,
    adapt_to: GroupLike,
    caps: Optional[EnumerationCaps] = None,
) -> Iterator[FiltrationSpec]:
    """Yield every non-anticipative filtration keeping the given assets
    adapted, in a deterministic order (blocks sorted by smallest path id,
    groupings in restricted-growth-string order, times outer to inner)."""
    caps = caps or EnumerationCaps()
    g = _group(tree, adapt_to)
    if tree.n_paths > caps.max_paths:
        raise BudgetError(
            f"tree has {tree.n_paths} paths, enumeration cap is {caps.max_paths}"
        )
    if tree.n_steps > caps.max_periods:
        raise BudgetError(
            f"tree has {tree.n_steps} periods, enumeration cap is {caps.max_periods}"
        )
    all_procs = tree.process_ids
    assets = g.sorted_ids()
    fine = [prefix_partition(tree, t, all_procs) for t in range(tree.n_steps + 1)]
    lvl = [level_partition(tree, t, assets) for t in range(tree.n_steps + 1)]
    produced = 0

    def rec(t: int, prev: Optional[Partition], acc: list[Partition]):
        nonlocal produced
        coarse = lvl[t] if prev is None else lvl[t].common_refinement(prev)
        for p in _partitions_between(fine[t], coarse):
            acc.append(p)
            if t == tree.n_steps:
                produced += 1
                if produced > caps.max_filtrations:
                    raise BudgetError(
                        f"more than {caps.max_filtrations} filtrations; "
                        "raise the cap to continue"
                    )
                yield FiltrationSpec(tuple(acc))
            else:
                yield from rec(t + 1, p, acc)
            acc.pop()

    yield from rec(0, None, [])


def _feasible_filtrations(
    tree: ScenarioTree, group: GroupLike, caps: Optional[EnumerationCaps]
) -> list[FiltrationSpec]:
    g = _group(tree, group)
    return [
        f
        for f in enumerate_filtrations(tree, g, caps)
        if emm_exists(tree, f, g) is not None
    ]


def _timewise_meet(filtrations: list[FiltrationSpec]) -> FiltrationSpec:
    times = filtrations[0].n_times
    return FiltrationSpec(
        tuple(
            common_coarsening([f.partitions[t] for f in filtrations])
            for t in range(times)
        )
    )


def meet_construction(
    tree: ScenarioTree,
    group: GroupLike,
    caps: Optional[EnumerationCaps] = None,
) -> FiltrationSpec:
    """Timewise intersection (as sigma-fields) of every pricing-feasible
    filtration for the group.

    The result is verified, not assumed: it must itself price the group and
    must coincide with the group's natural filtration.  A failure of either
    check raises MinimalityViolation."""
    g = _group(tree, group)
    feasible = _feasible_filtrations(tree, g, caps)
    if not feasible:
        raise InfeasibleMarketError(
            "no-arbitrage fails for this group: no filtration prices it"
        )
    meet = _timewise_meet(feasible)
    if emm_exists(tree, meet, g) is None:
        raise MinimalityViolation(
            "meet of the pricing-feasible filtrations is not pricing-feasible"
        )
    if meet != natural_filtration(tree, g.sorted_ids()):
        raise MinimalityViolation(
            "meet of the pricing-feasible filtrations differs from the "
            "natural filtration of the group"
        )
    return meet


@dataclass(frozen=True)
class MinimalityReport:
    """Result of the exhaustive minimality audit for one asset group."""

    n_enumerated: int
    n_feasible: int
    minimal: tuple[FiltrationSpec, ...]
    meet: FiltrationSpec
    natural: FiltrationSpec

    @property
    def unique_minimal(self) -> bool:
        return len(self.minimal) == 1

    @property
    def consistent(self) -> bool:
        """True iff exactly one minimal element exists and it equals both
        the meet and the natural filtration."""
        return (
            self.unique_minimal
            and self.minimal[0] == self.meet
            and self.meet == self.natural
        )


def _coarser_or_equal(a: FiltrationSpec, b: FiltrationSpec) -> bool:
    """True iff a is coarser than or equal to b at every time."""
    return all(
        pb.refines(pa) for pa, pb in zip(a.partitions, b.partitions)
    )


def minimality_report(
    tree: ScenarioTree,
    group: GroupLike,
    caps: Optional[EnumerationCaps] = None,
) -> MinimalityReport:
    """Enumerate, price, and rank every admissible filtration; report the
    minimal (coarsest) pricing-feasible ones together with the meet and the
    natural filtration.  Consistency is reported, never assumed."""
    g = _group(tree, group)
    n_enum = 0
    feasible: list[FiltrationSpec] = []
    for f in enumerate_filtrations(tree, g, caps):
        n_enum += 1
        if emm_exists(tree, f, g) is not None:
            feasible.append(f)
    if not feasible:
        raise InfeasibleMarketError(
            "no-arbitrage fails for this group: no filtration prices it"
        )
    minimal = [
        f
        for f in feasible
        if not any(
            other != f and _coarser_or_equal(other, f) for other in feasible
        )
    ]
    return MinimalityReport(
        n_enumerated=n_enum,
        n_feasible=len(feasible),
        minimal=tuple(minimal),
        meet=_timewise_meet(feasible),
        natural=natural_filtration(tree, g.sorted_ids()),
    )


def canonical_reduction_check(
    tree: ScenarioTree,
    filtration: FiltrationSpec,
    group: GroupLike,
) -> bool:
    """Any certificate found for a richer filtration must also certify the
    group's natural filtration (conditioning down never breaks the
    martingale property).  Returns the audit outcome for this instance."""
    g = _group(tree, group)
    cert = emm_exists(tree, filtration, g)
    if cert is None:
        raise InfeasibleMarketError(
            "canonical reduction check needs a feasible starting filtration"
        )
    nat = natural_filtration(tree, g.sorted_ids())
    return check_martingale(tree, cert.measure, nat, g).max_abs <= TOL


def contains_driver_sigma(
    filtration: FiltrationSpec,
    tree: ScenarioTree,
    driver_id: str,
    t: int,
) -> bool:
    """True iff the driver's value at every time s <= t is block-constant
    on partitions[t], i.e. time-t information determines the driver path so
    far.  Works for any process id."""
    from .market import _check_filtration_shape, raise_validation

    _check_filtration_shape(tree, filtration)
    if t < 0 or t > tree.n_steps:
        raise_validation(f"time {t} outside grid 0..{tree.n_steps}")
    series = tree.process(driver_id)
    part = filtration.partitions[t]
    for block in part.blocks:
        ref = series[block[0]]
        for i in block[1:]:
            if series[i][: t + 1] != ref[: t + 1]:
                return False
    return True


def contains_driver_throughout(
    filtration: FiltrationSpec, tree: ScenarioTree, driver_id: str
) -> bool:
    """Progressive containment: the driver's sigma-field is carried at
    every time point."""
    return all(
        contains_driver_sigma(filtration, tree, driver_id, t)
        for t in range(tree.n_steps + 1)
    )


@dataclass(frozen=True)
class OrthogonalityEntry:
    t: int
    block: tuple[str, ...]
    asset_i: str
    asset_j: str
    value: float


@dataclass(frozen=True)
class OrthogonalityReport:
    entries: tuple[OrthogonalityEntry, ...]

    @property
    def max_abs(self) -> float:
        return max((abs(e.value) for e in self.entries), default=0.0)


def orthogonality_diagnostic(
    tree: ScenarioTree,
    measure: Measure,
    filtration: FiltrationSpec,
    group: GroupLike,
) -> OrthogonalityReport:
    """Conditional increment cross-moments under a measure: for each
    (t, block) and asset pair i < j, the block-conditional expectation of
    the increment product.  Zero everywhere means conditionally orthogonal
    increments."""
    from .market import _check_filtration_shape

    g = _group(tree, group)
    _check_filtration_shape(tree, filtration)
    ids = g.sorted_ids()
    entries = []
    for t in range(tree.n_steps):
        for block in filtration.partitions[t].blocks:
            mass = sum(measure.weights[i] for i in block)
            for ai, aj in itertools.combinations(ids, 2):
                sa = tree.assets[ai]
                sb = tree.assets[aj]
                total = sum(
                    measure.weights[i]
                    * (sa[i][t + 1] - sa[i][t])
                    * (sb[i][t + 1] - sb[i][t])
                    for i in block
                )
                entries.append(
                    OrthogonalityEntry(
                        t=t,
                        block=tuple(tree.paths[i] for i in block),
                        asset_i=ai,
                        asset_j=aj,
                        value=float(total / mass),
                    )
                )
    return OrthogonalityReport(tuple(entries))
