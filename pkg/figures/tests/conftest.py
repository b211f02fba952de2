"""Shared fixtures: paths to the committed diagnostics CSVs."""
from __future__ import annotations

import pathlib

import pytest

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def at_csv() -> str:
    return str(DATA / "at_paths.csv")


@pytest.fixture(scope="session")
def hist_csv() -> str:
    return str(DATA / "m_hist.csv")


@pytest.fixture(scope="session")
def diagnostics_csv() -> str:
    return str(DATA / "diagnostics.csv")
