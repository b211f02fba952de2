"""Construction and analysis of the multi-driver obstruction market.

The market has K assets and K independent two-state drivers.  Each period,
driver i takes an independent +-1 innovation u_i and asset i moves by
beta * u_i + noise * z_i with z_i an independent +-1 coin.  With
beta == noise the increment support is {2, 0, 0, -2} (scaled), so:

* any non-anticipative filtration prices every asset: period innovations
  are independent of anything known at the start of the period, and the
  conditional increment support straddles zero;
* a filtration that leaks the coming driver innovations conditions the
  increment on u_i and lands on sign-definite blocks such as {2, 0},
  which no strictly positive measure can average to zero;
* the price path does not silently reveal the drivers, because the
  increment value 0 arises from both driver states.

Whether a *jointly* satisfying information structure exists is a question
about the constraint sets (which driver sigma-fields must / must not be
carried), not about any single measure computation; the report evaluates
both levels separately.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional

from .emm import emm_exists
from .errors import BudgetError, ValidationError
from .lab import FiltrationConstraint, contains_driver_throughout
from .market import (
    FiltrationSpec,
    Partition,
    ScenarioTree,
    is_nonanticipative,
    natural_filtration,
)


@dataclass(frozen=True)
class ObstructionConfig:
    n_drivers: int = 3
    n_periods: int = 1
    beta: int = 1
    noise: int = 1
    max_paths: int = 4096

    def __post_init__(self):
        if self.n_drivers < 1:
            raise ValidationError(f"n_drivers must be >= 1, got {self.n_drivers}")
        if self.n_periods < 1:
            raise ValidationError(f"n_periods must be >= 1, got {self.n_periods}")
        if self.noise <= 0:
            raise ValidationError("noise must be positive")
        if self.beta < 0:
            raise ValidationError("beta must be non-negative")


@dataclass(frozen=True)
class ObstructionScenario:
    """The built tree plus its named candidate filtrations."""

    tree: ScenarioTree
    filtrations: Mapping[str, FiltrationSpec]
    asset_ids: tuple[str, ...]
    driver_ids: tuple[str, ...]
    config: ObstructionConfig


def build_three_driver_tree(
    config: Optional[ObstructionConfig] = None,
) -> ObstructionScenario:
    """Build the obstruction market (2^(2 * drivers * periods) paths) and
    its named filtrations: price-only, local-i, pairwise-i-j,
    global-all-drivers, and the anticipative global-future-leak."""
    cfg = config or ObstructionConfig()
    k, periods = cfg.n_drivers, cfg.n_periods
    n_paths = 2 ** (2 * k * periods)
    if n_paths > cfg.max_paths:
        raise BudgetError(
            f"obstruction tree would have {n_paths} paths, cap is {cfg.max_paths}"
        )
    asset_ids = tuple(f"S{i + 1}" for i in range(k))
    driver_ids = tuple(f"Y{i + 1}" for i in range(k))
    width = len(str(n_paths - 1))
    paths = tuple(f"w{idx:0{width}d}" for idx in range(n_paths))

    # slot layout per period: u_1..u_k then z_1..z_k, lexicographic draws
    draws = list(itertools.product((-1, 1), repeat=2 * k * periods))
    assets: dict[str, list[tuple[int, ...]]] = {a: [] for a in asset_ids}
    drivers: dict[str, list[tuple[int, ...]]] = {d: [] for d in driver_ids}
    for draw in draws:
        for i in range(k):
            y = [0]
            s = [0]
            for p in range(periods):
                u = draw[p * 2 * k + i]
                z = draw[p * 2 * k + k + i]
                y.append(y[-1] + u)
                s.append(s[-1] + cfg.beta * u + cfg.noise * z)
            drivers[driver_ids[i]].append(tuple(y))
            assets[asset_ids[i]].append(tuple(s))

    tree = ScenarioTree.build(
        paths=paths,
        prob=[Fraction(1, n_paths)] * n_paths,
        assets={a: rows for a, rows in assets.items()},
        drivers={d: rows for d, rows in drivers.items()},
        dt=1.0,
    )

    filts: dict[str, FiltrationSpec] = {}
    filts["price-only"] = natural_filtration(tree, asset_ids)
    for i in range(k):
        filts[f"local-{i + 1}"] = natural_filtration(
            tree, [asset_ids[i], driver_ids[i]]
        )
    for i, j in itertools.combinations(range(k), 2):
        filts[f"pairwise-{i + 1}-{j + 1}"] = natural_filtration(
            tree, [asset_ids[i], asset_ids[j], driver_ids[i], driver_ids[j]]
        )
    filts["global-all-drivers"] = natural_filtration(
        tree, asset_ids + driver_ids
    )
    filts["global-future-leak"] = _future_leak_filtration(tree, driver_ids)
    return ObstructionScenario(
        tree=tree,
        filtrations=filts,
        asset_ids=asset_ids,
        driver_ids=driver_ids,
        config=cfg,
    )


def _future_leak_filtration(
    tree: ScenarioTree, driver_ids: tuple[str, ...]
) -> FiltrationSpec:
    """Refine each time-t partition of the full prefix filtration by the
    coming driver innovations (Y_d(t+1) - Y_d(t)).  Anticipative by
    construction for every t < n_steps with branching drivers."""
    all_procs = tree.process_ids
    series = {d: tree.drivers[d] for d in driver_ids}
    parts = []
    for t in range(tree.n_steps + 1):
        groups: dict[tuple, list[int]] = {}
        for i in range(tree.n_paths):
            prefix = tuple(tree.process(p)[i][: t + 1] for p in all_procs)
            if t < tree.n_steps:
                leak = tuple(
                    series[d][i][t + 1] - series[d][i][t] for d in driver_ids
                )
            else:
                leak = ()
            groups.setdefault((prefix, leak), []).append(i)
        parts.append(Partition.from_blocks(groups.values()))
    return FiltrationSpec(tuple(parts))


def default_constraints(
    scenario: ObstructionScenario,
) -> dict[tuple[str, ...], FiltrationConstraint]:
    """Constraint sets for the singleton and pairwise asset groups.

    Each asset group must carry its own drivers' sigma-fields.  Exclusion
    constraints (may not carry the other drivers) encode the fact that
    conditioning on all slow drivers at once destroys pricing; that bites
    only when a third driver exists, so with fewer than three drivers the
    must_not_contain sets are empty.  Pairwise groups take the union of the
    required sets and the intersection of the forbidden sets."""
    k = len(scenario.driver_ids)
    d = scenario.driver_ids
    singles: dict[tuple[str, ...], FiltrationConstraint] = {}
    for i in range(k):
        forbid = frozenset(d[j] for j in range(k) if j != i) if k >= 3 else frozenset()
        singles[(scenario.asset_ids[i],)] = FiltrationConstraint(
            must_contain=frozenset({d[i]}), must_not_contain=forbid
        )
    out = dict(singles)
    for i, j in itertools.combinations(range(k), 2):
        ci = singles[(scenario.asset_ids[i],)]
        cj = singles[(scenario.asset_ids[j],)]
        out[tuple(sorted((scenario.asset_ids[i], scenario.asset_ids[j])))] = (
            FiltrationConstraint(
                must_contain=ci.must_contain | cj.must_contain,
                must_not_contain=ci.must_not_contain & cj.must_not_contain,
            )
        )
    return out


@dataclass(frozen=True)
class ObstructionRow:
    group: tuple[str, ...]
    constraint: FiltrationConstraint
    satisfiable: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class ObstructionReport:
    scenario: ObstructionScenario = field(repr=False)
    rows: tuple[ObstructionRow, ...]
    global_satisfiable: bool
    global_witness: Optional[str]
    leak_filtration: str
    leak_feasible: bool

    def to_dict(self) -> dict:
        cfg = self.scenario.config
        rows = []
        for r in self.rows:
            d = {
                "group": list(r.group),
                "must_contain": sorted(r.constraint.must_contain),
                "must_not_contain": sorted(r.constraint.must_not_contain),
                "satisfiable": r.satisfiable,
            }
            if r.witness is not None:
                d["witness"] = r.witness
            rows.append(d)
        g: dict = {"satisfiable": self.global_satisfiable}
        if self.global_witness is not None:
            g["witness"] = self.global_witness
        return {
            "scenario": {
                "n_drivers": cfg.n_drivers,
                "n_periods": cfg.n_periods,
                "beta": cfg.beta,
                "noise": cfg.noise,
                "n_paths": self.scenario.tree.n_paths,
            },
            "rows": rows,
            "global": g,
            "anticipative_emm_check": {
                "filtration": self.leak_filtration,
                "feasible": self.leak_feasible,
            },
        }


def _driver_subsets(
    scenario: ObstructionScenario, first: frozenset[str]
) -> Iterator[frozenset[str]]:
    """All driver subsets, the expected witness content first, then by
    (size, ids) for determinism."""
    all_subsets = [
        frozenset(c)
        for r in range(len(scenario.driver_ids) + 1)
        for c in itertools.combinations(sorted(scenario.driver_ids), r)
    ]
    ordered = sorted(all_subsets, key=lambda s: (s != first, len(s), tuple(sorted(s))))
    return iter(ordered)


def _candidate_name(assets: tuple[str, ...], drivers: frozenset[str]) -> str:
    return "natural:" + ",".join(sorted(set(assets) | drivers))


def _satisfies(
    scenario: ObstructionScenario,
    assets: tuple[str, ...],
    drivers: frozenset[str],
    constraint: FiltrationConstraint,
) -> bool:
    tree = scenario.tree
    filt = natural_filtration(tree, set(assets) | drivers)
    if constraint.require_nonanticipative and not is_nonanticipative(tree, filt):
        return False
    for d in constraint.must_contain:
        if not contains_driver_throughout(filt, tree, d):
            return False
    for d in constraint.must_not_contain:
        if contains_driver_throughout(filt, tree, d):
            return False
    return emm_exists(tree, filt, assets) is not None


def obstruction_report(
    scenario: ObstructionScenario,
    constraints: Optional[Mapping[tuple[str, ...], FiltrationConstraint]] = None,
) -> ObstructionReport:
    """Evaluate, for each asset group, whether some non-anticipative
    pricing-feasible filtration meets its constraint; then whether a single
    filtration (with a single measure pricing all assets jointly) meets
    every singleton constraint at once; and finally the measure-level fact
    for the anticipative future-leak filtration."""
    cons = dict(constraints) if constraints is not None else default_constraints(scenario)
    rows = []
    for group in sorted(cons, key=lambda g: (len(g), g)):
        c = cons[group]
        witness = None
        for d in _driver_subsets(scenario, c.must_contain):
            if _satisfies(scenario, group, d, c):
                witness = _candidate_name(group, d)
                break
        rows.append(
            ObstructionRow(
                group=group, constraint=c, satisfiable=witness is not None,
                witness=witness,
            )
        )

    singles = {g: c for g, c in cons.items() if len(g) == 1}
    all_assets = scenario.asset_ids
    mc_union = frozenset().union(*(c.must_contain for c in singles.values()))
    global_witness = None
    for d in _driver_subsets(scenario, mc_union):
        ok = True
        tree = scenario.tree
        filt = natural_filtration(tree, set(all_assets) | d)
        if not is_nonanticipative(tree, filt):
            continue
        for c in singles.values():
            if any(not contains_driver_throughout(filt, tree, m) for m in c.must_contain):
                ok = False
                break
            if any(contains_driver_throughout(filt, tree, m) for m in c.must_not_contain):
                ok = False
                break
        if ok and emm_exists(tree, filt, all_assets) is not None:
            global_witness = _candidate_name(all_assets, d)
            break

    leak_name = "global-future-leak"
    leak_feasible = (
        emm_exists(scenario.tree, scenario.filtrations[leak_name], all_assets)
        is not None
    )
    return ObstructionReport(
        scenario=scenario,
        rows=tuple(rows),
        global_satisfiable=global_witness is not None,
        global_witness=global_witness,
        leak_filtration=leak_name,
        leak_feasible=leak_feasible,
    )
