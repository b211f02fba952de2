"""Canonical market fixtures shared across the test suite.

Every fixture is an exact tree (integer prices, Fraction probabilities),
so the engine runs in rational arithmetic and frozen expectations can be
asserted with == rather than tolerances.
"""
from __future__ import annotations

from fractions import Fraction

import pytest

from emmlab import ScenarioTree

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)
QUARTER = Fraction(1, 4)


@pytest.fixture
def coin_tree() -> ScenarioTree:
    """One period, one asset, increments +1/-1 under a fair physical coin."""
    return ScenarioTree.build(
        paths=["u", "d"],
        prob=[HALF, HALF],
        assets={"S1": [[0, 1], [0, -1]]},
    )


@pytest.fixture
def skew_tree() -> ScenarioTree:
    """One period, increments +2/-1: the martingale weights are forced to
    (1/3, 2/3) whatever the physical measure."""
    return ScenarioTree.build(
        paths=["u", "d"],
        prob=[HALF, HALF],
        assets={"S1": [[0, 2], [0, -1]]},
    )


@pytest.fixture
def monotone_tree() -> ScenarioTree:
    """One period, increments +1/+2: a sure win, so no martingale measure."""
    return ScenarioTree.build(
        paths=["u", "d"],
        prob=[HALF, HALF],
        assets={"S1": [[0, 1], [0, 2]]},
    )


@pytest.fixture
def drifted_tree() -> ScenarioTree:
    """One period, increments +3/-1: feasible, but the physical fair coin
    leaves a drift of exactly 1 on the single time-0 block."""
    return ScenarioTree.build(
        paths=["u", "d"],
        prob=[HALF, HALF],
        assets={"S1": [[0, 3], [0, -1]]},
    )


@pytest.fixture
def trinomial_tree() -> ScenarioTree:
    """One period, three paths, increments +1/0/-1: feasible but the
    measure is not unique and the market is incomplete."""
    return ScenarioTree.build(
        paths=["u", "m", "d"],
        prob=[THIRD, THIRD, THIRD],
        assets={"S1": [[0, 1], [0, 0], [0, -1]]},
    )


@pytest.fixture
def spanning_trinomial_tree() -> ScenarioTree:
    """Three paths, two assets with independent increment patterns: the two
    risky directions span the two non-cash degrees of freedom, so this
    market is complete."""
    return ScenarioTree.build(
        paths=["u", "m", "d"],
        prob=[THIRD, THIRD, THIRD],
        assets={
            "S1": [[0, 1], [0, 0], [0, -1]],
            "S2": [[0, -1], [0, 1], [0, 0]],
        },
    )


@pytest.fixture
def binomial2_tree() -> ScenarioTree:
    """Two-period binomial with increments +2/-1 each period: complete,
    with the unique martingale measure (1/9, 2/9, 2/9, 4/9)."""
    return ScenarioTree.build(
        paths=["uu", "ud", "du", "dd"],
        prob=[QUARTER, QUARTER, QUARTER, QUARTER],
        assets={
            "S1": [[0, 2, 4], [0, 2, 1], [0, -1, 1], [0, -1, -2]],
        },
    )


@pytest.fixture
def coin_driver_tree() -> ScenarioTree:
    """One asset coin plus an independent binary driver: four paths named
    by (asset move, driver move)."""
    return ScenarioTree.build(
        paths=["uu", "ud", "du", "dd"],
        prob=[QUARTER] * 4,
        assets={"S1": [[0, 1], [0, 1], [0, -1], [0, -1]]},
        drivers={"Y1": [[0, 1], [0, -1], [0, 1], [0, -1]]},
    )


@pytest.fixture
def two_coin_tree() -> ScenarioTree:
    """Two independent coin assets on four paths."""
    return ScenarioTree.build(
        paths=["uu", "ud", "du", "dd"],
        prob=[QUARTER] * 4,
        assets={
            "S1": [[0, 1], [0, 1], [0, -1], [0, -1]],
            "S2": [[0, 1], [0, -1], [0, 1], [0, -1]],
        },
    )


@pytest.fixture
def binary3_tree() -> ScenarioTree:
    """Three periods of +1/-1 moves: eight paths named by their bit
    patterns, one asset following the cumulative sum."""
    paths = []
    series = []
    for bits in range(8):
        moves = [1 if bits & (1 << (2 - t)) else -1 for t in range(3)]
        row = [0]
        for m in moves:
            row.append(row[-1] + m)
        paths.append(f"b{bits:03b}")
        series.append(row)
    return ScenarioTree.build(
        paths=paths,
        prob=[Fraction(1, 8)] * 8,
        assets={"S1": series},
    )


@pytest.fixture
def single_path_tree() -> ScenarioTree:
    """The degenerate one-path market."""
    return ScenarioTree.build(
        paths=["w"],
        prob=[Fraction(1)],
        assets={"S1": [[0, 0, 0]]},
    )
