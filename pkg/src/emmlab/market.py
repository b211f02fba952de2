"""Finite scenario-tree markets.

A market is a finite list of paths, a strictly positive probability per path,
and per-path time series for each asset and driver process.  Information is
represented by partitions of the path set: a sigma-field on a finite space is
exactly a partition into atoms, and a filtration is a sequence of partitions
that refines over time.

Values may be int, float or fractions.Fraction.  Sigma-field construction
groups paths by exact value equality; the comparison tolerance TOL applies
only to measure-level checks (probability sums, residuals).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

Number = Union[int, float, Fraction]

#: comparison tolerance for float-valued measure checks
TOL = 1e-9


def _is_exact(x: Number) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with n_steps periods of length dt."""

    n_steps: int
    dt: float = 1.0

    def __post_init__(self):
        if self.n_steps < 1:
            raise_validation(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.dt > 0:
            raise_validation(f"dt must be > 0, got {self.dt}")


def raise_validation(msg: str):
    from .errors import ValidationError

    raise ValidationError(msg)


@dataclass(frozen=True)
class Partition:
    """A partition of path indices 0..n-1 into disjoint non-empty blocks.

    Blocks are stored canonically: each block sorted ascending, blocks sorted
    by their smallest element.  Two Partition objects over the same universe
    compare equal iff they induce the same sigma-field.
    """

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        p = cls(canon)
        p._validate()
        return p

    def _validate(self):
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise_validation("empty block in partition")
            for i in b:
                if i in seen:
                    raise_validation(f"path index {i} appears in two blocks")
                seen.add(i)
        if seen != set(range(len(seen))):
            raise_validation("partition blocks do not cover a contiguous index range")

    @property
    def n_paths(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_index_map(self) -> dict[int, int]:
        """Map from path index to the index of its block."""
        out: dict[int, int] = {}
        for k, b in enumerate(self.blocks):
            for i in b:
                out[i] = k
        return out

    def refines(self, other: "Partition") -> bool:
        """True iff every block of self lies inside a block of other."""
        if self.n_paths != other.n_paths:
            raise_validation("partitions over different path sets")
        owner = other.block_index_map()
        for b in self.blocks:
            k = owner[b[0]]
            if any(owner[i] != k for i in b[1:]):
                return False
        return True

    def common_refinement(self, other: "Partition") -> "Partition":
        """Coarsest partition refining both (blockwise intersections)."""
        owner = other.block_index_map()
        pieces: dict[tuple[int, int], list[int]] = {}
        mine = self.block_index_map()
        for i in range(self.n_paths):
            pieces.setdefault((mine[i], owner[i]), []).append(i)
        return Partition.from_blocks(pieces.values())

    def id_blocks(self, tree: "ScenarioTree") -> tuple[tuple[str, ...], ...]:
        """Blocks rendered as path-id tuples in tree order."""
        return tuple(tuple(tree.paths[i] for i in b) for b in self.blocks)


def common_coarsening(partitions: Sequence[Partition]) -> Partition:
    """Finest partition that every input partition refines.

    Atoms are the connected components of the overlap graph: two paths land
    in the same output block iff they are linked by a chain of shared blocks.
    This is the partition counterpart of intersecting the sigma-fields.
    """
    if not partitions:
        raise_validation("common_coarsening of an empty collection")
    n = partitions[0].n_paths
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for p in partitions:
        if p.n_paths != n:
            raise_validation("partitions over different path sets")
        for b in p.blocks:
            for i in b[1:]:
                union(b[0], i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return Partition.from_blocks(groups.values())


@dataclass(frozen=True)
class FiltrationSpec:
    """A filtration: one partition per time point, refining over time."""

    partitions: tuple[Partition, ...]

    def __post_init__(self):
        if not self.partitions:
            raise_validation("filtration needs at least one partition")
        n = self.partitions[0].n_paths
        for t, p in enumerate(self.partitions):
            if p.n_paths != n:
                raise_validation(f"partition at t={t} covers a different path set")
        for t in range(len(self.partitions) - 1):
            if not self.partitions[t + 1].refines(self.partitions[t]):
                raise_validation(
                    f"partition at t={t + 1} does not refine partition at t={t}"
                )

    @property
    def n_times(self) -> int:
        return len(self.partitions)


@dataclass(frozen=True)
class AssetGroup:
    """A non-empty set of asset identifiers priced together."""

    ids: frozenset[str]

    @classmethod
    def of(cls, ids: Iterable[str]) -> "AssetGroup":
        s = frozenset(ids)
        if not s:
            raise_validation("asset group must be non-empty")
        return cls(s)

    def sorted_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.ids))


@dataclass(frozen=True)
class ScenarioTree:
    """Full path-space scenario tree.

    paths    -- distinct path identifiers, fixing the canonical path order
    prob     -- strictly positive physical probability per path, summing to 1
    assets   -- asset id -> per-path value series of length n_steps + 1
    drivers  -- driver id -> per-path value series of length n_steps + 1
    """

    paths: tuple[str, ...]
    prob: tuple[Number, ...]
    assets: Mapping[str, tuple[tuple[Number, ...], ...]]
    drivers: Mapping[str, tuple[tuple[Number, ...], ...]]
    grid: TimeGrid
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def build(
        cls,
        paths: Sequence[str],
        prob: Sequence[Number],
        assets: Mapping[str, Sequence[Sequence[Number]]],
        drivers: Optional[Mapping[str, Sequence[Sequence[Number]]]] = None,
        dt: float = 1.0,
        n_steps: Optional[int] = None,
    ) -> "ScenarioTree":
        def freeze(m):
            return {
                pid: tuple(tuple(row) for row in series) for pid, series in m.items()
            }

        a = freeze(assets)
        d = freeze(drivers or {})
        if n_steps is None:
            any_series = next(iter(a.values()), None) or next(iter(d.values()), None)
            if any_series is None:
                raise_validation("tree needs at least one asset or driver")
            n_steps = len(any_series[0]) - 1
        return cls(tuple(paths), tuple(prob), a, d, TimeGrid(n_steps, dt))

    def __post_init__(self):
        n = len(self.paths)
        if n == 0:
            raise_validation("tree needs at least one path")
        if len(set(self.paths)) != n:
            raise_validation("duplicate path identifiers")
        if len(self.prob) != n:
            raise_validation(f"prob has {len(self.prob)} entries for {n} paths")
        for pid, p in zip(self.paths, self.prob):
            if not p > 0:
                raise_validation(f"prob[{pid}] must be strictly positive, got {p}")
        overlap = set(self.assets) & set(self.drivers)
        if overlap:
            raise_validation(f"ids used as both asset and driver: {sorted(overlap)}")
        want = self.grid.n_steps + 1
        for kind, procs in (("assets", self.assets), ("drivers", self.drivers)):
            for pid, series in procs.items():
                if len(series) != n:
                    raise_validation(
                        f"{kind}.{pid}: {len(series)} path rows for {n} paths"
                    )
                for k, row in enumerate(series):
                    if len(row) != want:
                        raise_validation(
                            f"{kind}.{pid}[{k}]: expected {want} values, got {len(row)}"
                        )
        s = sum(self.prob)
        if self.is_exact:
            if s != 1:
                raise_validation(f"probabilities sum to {s}, expected exactly 1")
        elif abs(float(s) - 1.0) > TOL:
            raise_validation(f"probabilities sum to {float(s)}, expected 1 +/- {TOL}")
        self._index.update({pid: i for i, pid in enumerate(self.paths)})

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    @property
    def n_steps(self) -> int:
        return self.grid.n_steps

    @property
    def is_exact(self) -> bool:
        """True iff every probability and process value is int or Fraction."""
        if not all(_is_exact(p) for p in self.prob):
            return False
        for procs in (self.assets, self.drivers):
            for series in procs.values():
                for row in series:
                    if not all(_is_exact(v) for v in row):
                        return False
        return True

    @property
    def process_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.assets)) + tuple(sorted(self.drivers))

    def path_index(self, pid: str) -> int:
        try:
            return self._index[pid]
        except KeyError:
            from .errors import UnknownIdError

            raise UnknownIdError(f"unknown path id: {pid}") from None

    def process(self, pid: str) -> tuple[tuple[Number, ...], ...]:
        if pid in self.assets:
            return self.assets[pid]
        if pid in self.drivers:
            return self.drivers[pid]
        from .errors import UnknownIdError

        raise UnknownIdError(f"unknown process id: {pid}")

    def value(self, pid: str, path_idx: int, t: int) -> Number:
        return self.process(pid)[path_idx][t]


def prefix_partition(
    tree: ScenarioTree, t: int, processes: Iterable[str]
) -> Partition:
    """Partition grouping paths that agree on the given processes at all
    times 0..t.  This is the sigma-field generated by observing those
    processes through time t."""
    if t < 0 or t > tree.n_steps:
        raise_validation(f"time {t} outside grid 0..{tree.n_steps}")
    procs = sorted(set(processes))
    series = [tree.process(p) for p in procs]
    groups: dict[tuple, list[int]] = {}
    for i in range(tree.n_paths):
        key = tuple(s[i][: t + 1] for s in series)
        groups.setdefault(key, []).append(i)
    return Partition.from_blocks(groups.values())


def natural_filtration(tree: ScenarioTree, processes: Iterable[str]) -> FiltrationSpec:
    """Coarsest filtration to which every listed process is adapted."""
    procs = sorted(set(processes))
    if not procs:
        raise_validation("natural filtration of an empty process set")
    return FiltrationSpec(
        tuple(prefix_partition(tree, t, procs) for t in range(tree.n_steps + 1))
    )


def full_prefix_filtration(tree: ScenarioTree) -> FiltrationSpec:
    """Natural filtration of every process in the tree: the finest
    information flow that reveals nothing about the future."""
    return natural_filtration(tree, tree.process_ids)


def level_partition(tree: ScenarioTree, t: int, processes: Iterable[str]) -> Partition:
    """Partition by the time-t values alone (no history)."""
    procs = sorted(set(processes))
    series = [tree.process(p) for p in procs]
    groups: dict[tuple, list[int]] = {}
    for i in range(tree.n_paths):
        groups.setdefault(tuple(s[i][t] for s in series), []).append(i)
    return Partition.from_blocks(groups.values())


def is_adapted(tree: ScenarioTree, filtration: FiltrationSpec, process_id: str) -> bool:
    """True iff the process value at each time t is constant on every block
    of partitions[t]."""
    _check_filtration_shape(tree, filtration)
    series = tree.process(process_id)
    for t, part in enumerate(filtration.partitions):
        for b in part.blocks:
            v0 = series[b[0]][t]
            if any(series[i][t] != v0 for i in b[1:]):
                return False
    return True


@dataclass(frozen=True)
class AnticipativityWitness:
    """Earliest point where a filtration separates two paths that are still
    indistinguishable: t, the offending block, and one separated pair."""

    t: int
    block: tuple[str, ...]
    pair: tuple[str, str]


def anticipativity_witness(
    tree: ScenarioTree, filtration: FiltrationSpec
) -> Optional[AnticipativityWitness]:
    """Search for the earliest (t, block) separating two paths that agree on
    every process up to t.  Returns None when the filtration is
    non-anticipative (i.e. a coarsening of the full prefix filtration)."""
    _check_filtration_shape(tree, filtration)
    all_procs = tree.process_ids
    for t, part in enumerate(filtration.partitions):
        fp = prefix_partition(tree, t, all_procs)
        owner = part.block_index_map()
        for atom in fp.blocks:
            k = owner[atom[0]]
            for i in atom[1:]:
                if owner[i] != k:
                    block = part.blocks[k]
                    return AnticipativityWitness(
                        t=t,
                        block=tuple(tree.paths[j] for j in block),
                        pair=(tree.paths[atom[0]], tree.paths[i]),
                    )
    return None


def is_nonanticipative(tree: ScenarioTree, filtration: FiltrationSpec) -> bool:
    """True iff no partition separates paths with identical prefixes."""
    return anticipativity_witness(tree, filtration) is None


def quadratic_covariation(
    tree: ScenarioTree, x_id: str, y_id: str, path_id: str
) -> Number:
    """Sum over t of (X_{t+1}-X_t)(Y_{t+1}-Y_t) along one path."""
    i = tree.path_index(path_id)
    xs = tree.process(x_id)[i]
    ys = tree.process(y_id)[i]
    total: Number = 0
    for t in range(tree.n_steps):
        total += (xs[t + 1] - xs[t]) * (ys[t + 1] - ys[t])
    return total


def _check_filtration_shape(tree: ScenarioTree, filtration: FiltrationSpec):
    if filtration.n_times != tree.n_steps + 1:
        raise_validation(
            f"filtration has {filtration.n_times} partitions for a grid with "
            f"{tree.n_steps + 1} time points"
        )
    if filtration.partitions[0].n_paths != tree.n_paths:
        raise_validation("filtration covers a different number of paths")
