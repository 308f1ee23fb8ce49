"""Pseudo-collision dynamics: the pair transform, schedules, and traces.

A pseudo-collision between touching balls i and j exchanges the components
of their pseudo-velocities parallel to the line of centers, exactly as in a
totally elastic collision of equal masses; pairs that do not touch or are
not approaching are left unchanged.  The same map is realized by folding the
stacked state across the half-space of the pair's collision direction, and
both implementations are exposed so they can be checked against each other.

Along any schedule the energy and total momentum are conserved and the
functional F = sum_{i,j} (v_j - v_i) . (x_j - x_i) never decreases; it is
evaluated here in the shift-invariant closed form 2n (x . v) - 2 (sum v) . (sum x),
which coincides with the double sum for every input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import NotNormalizedError, ScheduleError
from .foldings import HalfSpace, fold
from .geometry import (
    BallConfiguration,
    ContactGraph,
    Edge,
    StateVector,
    canonical_edge,
    collision_direction,
    full_contact_graph,
)

#: Max-norm threshold below which two consecutive states count as equal.
CHANGE_TOLERANCE = 1e-14


def _pair_slices(d: int, i: int, j: int) -> tuple[slice, slice]:
    return slice(i * d, (i + 1) * d), slice(j * d, (j + 1) * d)


def _collide_values(
    config: BallConfiguration,
    values: np.ndarray,
    i: int,
    j: int,
    approach_tolerance: float,
) -> np.ndarray | None:
    """Apply the exchange to a flat value vector; None when nothing happens."""
    if not config.touches(i, j):
        return None
    d = config.dimension
    si, sj = _pair_slices(d, i, j)
    dx = config.centers[i] - config.centers[j]
    rel = float((values[si] - values[sj]) @ dx)
    if rel >= -approach_tolerance:
        return None
    u = dx / np.linalg.norm(dx)
    transfer = float((values[sj] - values[si]) @ u) * u
    out = values.copy()
    out[si] = values[si] + transfer
    out[sj] = values[sj] - transfer
    return out


def collide(
    config: BallConfiguration,
    state: StateVector,
    edge: Edge,
    approach_tolerance: float = 0.0,
) -> StateVector:
    """Pseudo-collision transform for one pair.

    Returns the state unchanged when the pair does not touch or when
    (v_i - v_j) . (x_i - x_j) >= -approach_tolerance (the pair is separating
    or at rest relative to the contact line).  The default tolerance 0 means
    an exact IEEE comparison; a positive value widens the no-collision band
    for robustness studies.
    """
    i, j = edge
    if i == j:
        raise ValueError("a ball cannot collide with itself")
    out = _collide_values(config, state.values, i, j, approach_tolerance)
    return state if out is None else state.with_values(out)


def collide_as_folding(
    config: BallConfiguration, state: StateVector, edge: Edge
) -> StateVector:
    """Same contract as :func:`collide`, realized by folding across the pair's half-space."""
    i, j = edge
    if i == j:
        raise ValueError("a ball cannot collide with itself")
    if not config.touches(i, j):
        return state
    halfspace = HalfSpace(collision_direction(config, edge).vector)
    if halfspace.margin(state.values) >= 0.0:
        return state
    return state.with_values(fold(state.values, halfspace))


def monotone_functional(
    config: BallConfiguration,
    state: StateVector,
    normalization_tolerance: float = 1e-9,
) -> float:
    """F = 2n (x . v) for a centered configuration.

    Requires sum x_j = 0 within the tolerance, otherwise raises
    :class:`NotNormalizedError`.  Under that normalization the value equals
    the double sum over pairs of (v_j - v_i) . (x_j - x_i).
    """
    drift = float(np.linalg.norm(config.centers.sum(axis=0)))
    if drift > normalization_tolerance:
        raise NotNormalizedError(
            f"centers sum has norm {drift:.3g}; center the configuration first"
        )
    return 2.0 * config.n * float(config.stacked() @ state.values)


def functional_value(config: BallConfiguration, values: np.ndarray) -> float:
    """The pair-sum functional in its shift-invariant closed form."""
    x = config.stacked()
    sx = config.centers.sum(axis=0)
    sv = values.reshape(config.n, config.dimension).sum(axis=0)
    return 2.0 * config.n * float(x @ values) - 2.0 * float(sv @ sx)


@dataclass(frozen=True)
class Schedule:
    """Explicit edge list or a policy generating one on the fly."""

    kind: str
    edges: tuple[Edge, ...] = ()
    seed: int | None = None

    KINDS = ("explicit", "round-robin", "lexicographic-greedy", "seeded-random")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "explicit":
            object.__setattr__(
                self, "edges", tuple(canonical_edge(*e) for e in self.edges)
            )
        elif self.edges:
            raise ValueError("only explicit schedules carry an edge list")
        if self.kind == "seeded-random" and self.seed is None:
            raise ValueError("seeded-random schedule needs a seed")

    @classmethod
    def explicit(cls, edges: Iterable[Edge]) -> "Schedule":
        return cls("explicit", tuple(edges))

    @classmethod
    def round_robin(cls) -> "Schedule":
        return cls("round-robin")

    @classmethod
    def greedy(cls) -> "Schedule":
        return cls("lexicographic-greedy")

    @classmethod
    def seeded_random(cls, seed: int) -> "Schedule":
        return cls("seeded-random", seed=seed)


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    """States, per-step change flags, and functional values along a schedule.

    ``states`` has shape (T+1, nd); step t applied ``edges[t-1]`` to
    ``states[t-1]``.  ``collisions`` counts steps whose state changed.
    ``stabilized`` is True when a policy run stopped because the state lies
    in every half-space of the governing graph, so all further pseudo-
    collisions would be identities.
    """

    n: int
    d: int
    states: np.ndarray
    edges: tuple[Edge, ...]
    changed: np.ndarray
    functional: np.ndarray
    energies: np.ndarray
    stabilized: bool

    @property
    def collisions(self) -> int:
        return int(np.count_nonzero(self.changed))

    @property
    def steps(self) -> int:
        return len(self.edges)

    def state(self, t: int) -> StateVector:
        return StateVector(self.n, self.d, self.states[t])

    def records(self) -> Iterator[dict]:
        """One JSON-ready record per step, with 1-based ball indices."""
        for t, (i, j) in enumerate(self.edges, start=1):
            yield {
                "t": t,
                "edge": [i + 1, j + 1],
                "changed": bool(self.changed[t - 1]),
                "F": float(self.functional[t]),
                "energy": float(self.energies[t]),
            }

    def write_jsonl(self, fh: IO[str]) -> None:
        for record in self.records():
            fh.write(json.dumps(record) + "\n")


def _stability_matrix(config: BallConfiguration, graph: ContactGraph) -> np.ndarray:
    cols = [collision_direction(config, e).vector for e in graph.edges]
    if not cols:
        return np.zeros((config.n * config.dimension, 0))
    return np.column_stack(cols)


def run_schedule(
    config: BallConfiguration,
    state0: StateVector,
    schedule: Schedule,
    max_steps: int | None = None,
    graph: ContactGraph | None = None,
    approach_tolerance: float = 0.0,
) -> SimulationTrace:
    """Execute a schedule and record the full trace.

    Explicit schedules run for min(len(schedule), max_steps) steps and must
    reference only edges of the governing graph (:class:`ScheduleError`
    otherwise).  Policy schedules stop early once the state lies in every
    edge half-space the policy can still apply (margin >= -1e-12), and
    otherwise run until max_steps (default 10^6 for policies).
    """
    if graph is None:
        graph = full_contact_graph(config)
    if state0.n != config.n or state0.d != config.dimension:
        raise ValueError("state shape does not match configuration")

    if schedule.kind == "explicit":
        for e in schedule.edges:
            if not graph.has_edge(*e):
                raise ScheduleError(
                    f"edge ({e[0] + 1}, {e[1] + 1}) is not in the governing graph"
                )
        planned = schedule.edges if max_steps is None else schedule.edges[:max_steps]
    else:
        planned = None
        if max_steps is None:
            max_steps = 1_000_000

    graph_edges = graph.edges
    zmat = _stability_matrix(config, graph)

    def is_stable(values: np.ndarray) -> bool:
        if zmat.shape[1] == 0:
            return True
        return bool(np.all(zmat.T @ values >= -1e-12))

    rng = (
        np.random.default_rng(schedule.seed)
        if schedule.kind == "seeded-random"
        else None
    )

    current = state0.values.copy()
    states = [current.copy()]
    applied: list[Edge] = []
    changed: list[bool] = []
    f_values = [functional_value(config, current)]
    energies = [float(current @ current)]
    stabilized = False

    def push(step_edge: Edge, out: np.ndarray | None) -> None:
        if out is None:
            did_change = False
        else:
            did_change = bool(np.max(np.abs(out - current)) > CHANGE_TOLERANCE)
        applied.append(step_edge)
        changed.append(did_change)
        if out is not None:
            current[:] = out
        states.append(current.copy())
        f_values.append(functional_value(config, current))
        energies.append(float(current @ current))

    if schedule.kind == "explicit":
        for e in planned:
            out = _collide_values(config, current, e[0], e[1], approach_tolerance)
            push(e, out)
    elif schedule.kind == "lexicographic-greedy":
        while len(applied) < max_steps:
            step = None
            for e in graph_edges:
                out = _collide_values(config, current, e[0], e[1], approach_tolerance)
                if out is not None and np.max(np.abs(out - current)) > CHANGE_TOLERANCE:
                    step = (e, out)
                    break
            if step is None:
                stabilized = True
                break
            push(*step)
    else:
        if not graph_edges:
            stabilized = True
        elif is_stable(current):
            stabilized = True
        else:
            k = 0
            while len(applied) < max_steps:
                if schedule.kind == "round-robin":
                    e = graph_edges[k % len(graph_edges)]
                    k += 1
                else:
                    e = graph_edges[int(rng.integers(len(graph_edges)))]
                out = _collide_values(config, current, e[0], e[1], approach_tolerance)
                push(e, out)
                if is_stable(current):
                    stabilized = True
                    break

    return SimulationTrace(
        n=config.n,
        d=config.dimension,
        states=np.array(states),
        edges=tuple(applied),
        changed=np.array(changed, dtype=bool),
        functional=np.array(f_values),
        energies=np.array(energies),
        stabilized=stabilized,
    )


def decompose_state(
    config: BallConfiguration,
    graph: ContactGraph,
    state: StateVector,
) -> tuple[StateVector, StateVector]:
    """Split v into the part fixed by all collisions and the part they act on.

    Returns (v_fixed, v_span): v_span is the orthogonal projection of v onto
    span{z_e : e in graph}, v_fixed = v - v_span is orthogonal to every z_e,
    and every pseudo-collision on a graph edge leaves v_fixed untouched while
    preserving |v_span|.
    """
    zmat = _stability_matrix(config, graph)
    if zmat.shape[1] == 0:
        zero = np.zeros_like(state.values)
        return state, state.with_values(zero)
    u, s, _ = np.linalg.svd(zmat, full_matrices=False)
    rank = int(np.count_nonzero(s > 1e-12 * s[0]))
    basis = u[:, :rank]
    v_span = basis @ (basis.T @ state.values)
    return state.with_values(state.values - v_span), state.with_values(v_span)
