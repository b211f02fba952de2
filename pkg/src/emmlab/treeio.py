"""JSON interchange for scenario trees and filtrations.

Tree layout::

    {
      "dt": 1.0,
      "paths": [{"id": "w0", "prob": "1/2"}, {"id": "w1", "prob": "1/2"}],
      "assets": {"S1": [[0, 1], [0, -1]]},
      "drivers": {"Y1": [[0, 1], [0, 1]]}
    }

Each process maps to one row per path (tree path order) with n_steps + 1
values.  Numbers may be JSON ints, JSON floats, or strings such as "1/3",
which are read as exact rationals; exact inputs keep the engine in exact
mode.  Loading rejects on the first violation and names the offending
field.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Union

from .errors import ValidationError
from .market import FiltrationSpec, Number, Partition, ScenarioTree


def _parse_number(raw: Any, where: str) -> Number:
    if isinstance(raw, bool):
        raise ValidationError(f"{where}: expected a number, got a boolean")
    if isinstance(raw, (int, float)):
        return raw
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"{where}: cannot parse {raw!r} as a rational") from None
    raise ValidationError(f"{where}: expected a number, got {type(raw).__name__}")


def _dump_number(v: Number) -> Union[int, float, str]:
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return v


def tree_from_dict(data: dict) -> ScenarioTree:
    if not isinstance(data, dict):
        raise ValidationError("top level: expected an object")
    raw_paths = data.get("paths")
    if not isinstance(raw_paths, list) or not raw_paths:
        raise ValidationError("paths: expected a non-empty list")
    ids: list[str] = []
    probs: list[Number] = []
    for k, entry in enumerate(raw_paths):
        if not isinstance(entry, dict) or "id" not in entry or "prob" not in entry:
            raise ValidationError(f"paths[{k}]: expected an object with id and prob")
        if not isinstance(entry["id"], str):
            raise ValidationError(f"paths[{k}].id: expected a string")
        ids.append(entry["id"])
        probs.append(_parse_number(entry["prob"], f"paths[{k}].prob"))
    procs: dict[str, dict[str, list[list[Number]]]] = {}
    for kind in ("assets", "drivers"):
        raw = data.get(kind, {})
        if not isinstance(raw, dict):
            raise ValidationError(f"{kind}: expected an object")
        out: dict[str, list[list[Number]]] = {}
        for pid, series in raw.items():
            if not isinstance(series, list):
                raise ValidationError(f"{kind}.{pid}: expected a list of rows")
            rows = []
            for k, row in enumerate(series):
                if not isinstance(row, list):
                    raise ValidationError(f"{kind}.{pid}[{k}]: expected a list")
                rows.append(
                    [
                        _parse_number(v, f"{kind}.{pid}[{k}][{j}]")
                        for j, v in enumerate(row)
                    ]
                )
            out[pid] = rows
        procs[kind] = out
    if not procs["assets"] and not procs["drivers"]:
        raise ValidationError("tree defines no asset or driver processes")
    dt = data.get("dt", 1.0)
    if isinstance(dt, bool) or not isinstance(dt, (int, float)):
        raise ValidationError("dt: expected a number")
    return ScenarioTree.build(
        paths=ids,
        prob=probs,
        assets=procs["assets"],
        drivers=procs["drivers"],
        dt=float(dt),
    )


def tree_to_dict(tree: ScenarioTree) -> dict:
    return {
        "dt": tree.grid.dt,
        "paths": [
            {"id": pid, "prob": _dump_number(p)}
            for pid, p in zip(tree.paths, tree.prob)
        ],
        "assets": {
            a: [[_dump_number(v) for v in row] for row in series]
            for a, series in sorted(tree.assets.items())
        },
        "drivers": {
            d: [[_dump_number(v) for v in row] for row in series]
            for d, series in sorted(tree.drivers.items())
        },
    }


def load_tree(path: str) -> ScenarioTree:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return tree_from_dict(data)


def save_tree(tree: ScenarioTree, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tree_to_dict(tree), fh, indent=2)
        fh.write("\n")


def filtration_from_dict(data: dict, tree: ScenarioTree) -> FiltrationSpec:
    raw = data.get("partitions") if isinstance(data, dict) else None
    if not isinstance(raw, list) or not raw:
        raise ValidationError("partitions: expected a non-empty list")
    parts = []
    for t, blocks in enumerate(raw):
        if not isinstance(blocks, list):
            raise ValidationError(f"partitions[{t}]: expected a list of blocks")
        idx_blocks = []
        for b, block in enumerate(blocks):
            if not isinstance(block, list) or not block:
                raise ValidationError(
                    f"partitions[{t}][{b}]: expected a non-empty list of path ids"
                )
            idx_blocks.append([tree.path_index(pid) for pid in block])
        parts.append(Partition.from_blocks(idx_blocks))
    return FiltrationSpec(tuple(parts))


def filtration_to_dict(filtration: FiltrationSpec, tree: ScenarioTree) -> dict:
    return {
        "partitions": [
            [list(block) for block in part.id_blocks(tree)]
            for part in filtration.partitions
        ]
    }


def load_filtration(path: str, tree: ScenarioTree) -> FiltrationSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return filtration_from_dict(data, tree)
