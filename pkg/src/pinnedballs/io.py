"""JSON file formats: configurations, schedules, half-space families, traces.

All on-disk formats use 1-based ball indices; the API is 0-based.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .dynamics import Schedule, SimulationTrace
from .foldings import HalfSpace
from .geometry import BallConfiguration, Edge, StateVector, validate_configuration


def load_configuration(
    path: str | Path,
) -> tuple[BallConfiguration, StateVector | None]:
    """Read {"dimension", "centers", "velocities"?, "contact_tolerance"?}."""
    with open(path) as fh:
        data = json.load(fh)
    if "centers" not in data:
        raise ValueError(f"{path}: missing 'centers'")
    config = validate_configuration(
        data["centers"],
        dimension=data.get("dimension"),
        contact_tolerance=data.get("contact_tolerance", 1e-9),
    )
    state = None
    if data.get("velocities") is not None:
        blocks = np.array(data["velocities"], dtype=float)
        if blocks.shape != (config.n, config.dimension):
            raise ValueError(
                f"{path}: velocities shape {blocks.shape} does not match centers"
            )
        state = StateVector(config.n, config.dimension, blocks.reshape(-1))
    return config, state


def save_configuration(
    path: str | Path,
    config: BallConfiguration,
    velocities: StateVector | None = None,
) -> None:
    data: dict = {
        "dimension": config.dimension,
        "centers": config.centers.tolist(),
        "contact_tolerance": config.contact_tolerance,
    }
    if velocities is not None:
        data["velocities"] = velocities.blocks().tolist()
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def load_schedule(path: str | Path) -> Schedule:
    """Read a JSON array of 1-based [i, j] pairs into an explicit schedule."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: schedule file must be a JSON array of pairs")
    edges: list[Edge] = []
    for entry in data:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ValueError(f"{path}: schedule entries must be [i, j] pairs")
        i, j = int(entry[0]), int(entry[1])
        if i < 1 or j < 1:
            raise ValueError(f"{path}: ball indices are 1-based, got {entry}")
        edges.append((i - 1, j - 1))
    return Schedule.explicit(edges)


def save_schedule(path: str | Path, edges: Sequence[Edge]) -> None:
    with open(path, "w") as fh:
        json.dump([[i + 1, j + 1] for i, j in edges], fh)
        fh.write("\n")


def load_halfspaces(path: str | Path) -> list[HalfSpace]:
    """Read {"dimension": m, "normals": [[...], ...]}; normals are normalized."""
    with open(path) as fh:
        data = json.load(fh)
    m = data.get("dimension")
    normals = data.get("normals")
    if m is None or normals is None:
        raise ValueError(f"{path}: need 'dimension' and 'normals'")
    out = []
    for idx, normal in enumerate(normals):
        if len(normal) != m:
            raise ValueError(f"{path}: normal {idx} has wrong dimension")
        out.append(HalfSpace.from_vector(normal))
    return out


def save_halfspaces(path: str | Path, halfspaces: Sequence[HalfSpace]) -> None:
    if not halfspaces:
        raise ValueError("need at least one half-space")
    data = {
        "dimension": halfspaces[0].dimension,
        "normals": [h.normal.tolist() for h in halfspaces],
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def write_trace_jsonl(path: str | Path, trace: SimulationTrace) -> None:
    """One JSON record per step: {t, edge, changed, F, energy}."""
    with open(path, "w") as fh:
        trace.write_jsonl(fh)
