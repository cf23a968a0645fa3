"""Graph files.

Text format::

    n m
    i j        (m lines, 0-based, i < j, lexicographic order)
    x: 1 -1 ...   (optional hidden partition)

JSON mirror: ``{"n", "edges", "hidden", "seed", "params"}``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .sbm import Instance, SbmParams, as_labels, validate_edges


def format_labels(x) -> str:
    return " ".join("1" if v == 1 else "-1" for v in x)


def parse_labels(text: str, n: int | None = None) -> np.ndarray:
    return as_labels([int(tok) for tok in text.split()], n)


def format_text(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.m}"]
    lines.extend(f"{i} {j}" for i, j in inst.edges.tolist())
    if inst.hidden is not None:
        lines.append("x: " + format_labels(inst.hidden))
    return "\n".join(lines) + "\n"


def write_text(inst: Instance, path) -> None:
    Path(path).write_text(format_text(inst))


def read_text(path) -> Instance:
    rows = [ln.strip() for ln in Path(path).read_text().splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty graph file")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    body = rows[1:1 + m]
    if len(body) != m:
        raise ValueError(f"{path}: expected {m} edges, found {len(body)}")
    edges = np.array([ln.split() for ln in body], dtype=np.int64).reshape(-1, 2)
    norm = validate_edges(n, edges)
    if norm.shape[0] != m:
        raise ValueError(f"{path}: duplicate edges")
    hidden = None
    for ln in rows[1 + m:]:
        if ln.startswith("x:"):
            hidden = parse_labels(ln[2:], n)
        else:
            raise ValueError(f"{path}: unexpected line {ln!r}")
    return Instance(n, norm, hidden)


def to_json(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "edges": inst.edges.tolist(),
        "hidden": None if inst.hidden is None else inst.hidden.tolist(),
        "seed": inst.seed,
        "params": None if inst.params is None else inst.params.as_dict(),
    }


def from_json(obj: dict) -> Instance:
    n = int(obj["n"])
    hidden = obj.get("hidden")
    params = obj.get("params")
    return Instance(
        n,
        validate_edges(n, obj["edges"]),
        None if hidden is None else as_labels(hidden, n),
        int(obj.get("seed") or 0),
        None if params is None else SbmParams(**params),
    )


def write_json(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(to_json(inst)) + "\n")


def read_json(path) -> Instance:
    return from_json(json.loads(Path(path).read_text()))


def load(path) -> Instance:
    """Read either format, choosing by extension (``.json`` or text)."""
    if str(path).endswith(".json"):
        return read_json(path)
    return read_text(path)


def save(inst: Instance, path) -> None:
    if str(path).endswith(".json"):
        write_json(inst, path)
    else:
        write_text(inst, path)
