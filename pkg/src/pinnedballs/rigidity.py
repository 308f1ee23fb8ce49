"""The approximate-rigidity index and its certificates.

For a subgraph with edge set E_1 and a chosen edge e, alpha_star is the
Euclidean distance from the unit collision direction z_e to the span of the
directions of the remaining edges.  The index alpha of a configuration is
the minimum of the strictly positive alpha_star values over all subgraphs of
the full contact graph and all chosen edges; zero values correspond to
self-stressed (infinitesimally rigid) subgraphs and are excluded.

alpha_star = 0 exactly when symmetric edge coefficients a_jk with a_e = 1
exist whose force sums a_jk (x_j - x_k) cancel at every vertex; the least
squares residual of that linear system is 2^{3/2} alpha_star, which
:func:`stress_certificate` exposes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllZeroError,
    DependentEdgesError,
    DependentInputError,
    TooManyEdgesError,
)
from .geometry import (
    BallConfiguration,
    ContactGraph,
    Edge,
    canonical_edge,
    collision_direction,
    full_contact_graph,
    raw_collision_vector,
)

DEFAULT_ZERO_TOLERANCE = 1e-8
DEFAULT_MAX_EDGES = 22
RANK_TOLERANCE = 1e-10


def _edge_list(edges: Iterable[Edge] | ContactGraph) -> list[Edge]:
    if isinstance(edges, ContactGraph):
        return list(edges.edges)
    return sorted({canonical_edge(*e) for e in edges})


def _distance_to_span(target: np.ndarray, columns: np.ndarray | None) -> float:
    if columns is None or columns.shape[1] == 0:
        # distance from a unit vector to the zero subspace
        return 1.0
    coef, *_ = np.linalg.lstsq(columns, target, rcond=None)
    return float(np.linalg.norm(target - columns @ coef))


def alpha_star(
    config: BallConfiguration,
    edge_set: Iterable[Edge] | ContactGraph,
    edge: Edge,
) -> float:
    """Distance from z_edge to the span of the other edges' directions."""
    edges = _edge_list(edge_set)
    chosen = canonical_edge(*edge)
    if chosen not in edges:
        raise ValueError(f"edge {chosen} is not in the edge set")
    others = [e for e in edges if e != chosen]
    z = collision_direction(config, chosen).vector
    if not others:
        return 1.0
    cols = np.column_stack([collision_direction(config, e).vector for e in others])
    return _distance_to_span(z, cols)


@dataclass(frozen=True)
class AlphaCandidate:
    edge: Edge
    others: tuple[Edge, ...]
    value: float
    is_zero: bool


@dataclass(frozen=True, eq=False)
class AlphaReport:
    """Result of the exhaustive minimum over subgraphs and chosen edges."""

    alpha: float
    argmin_edge: Edge
    argmin_edges: tuple[Edge, ...]
    zero_tolerance: float
    n_candidates: int
    n_zero: int
    candidates: tuple[AlphaCandidate, ...] | None

    def as_dict(self, verbose: bool = False) -> dict:
        out = {
            "alpha": self.alpha,
            "argmin_edge": [self.argmin_edge[0] + 1, self.argmin_edge[1] + 1],
            "argmin_edges": [[i + 1, j + 1] for i, j in self.argmin_edges],
            "zero_tolerance": self.zero_tolerance,
            "n_candidates": self.n_candidates,
            "n_zero": self.n_zero,
        }
        if verbose and self.candidates is not None:
            out["candidates"] = [
                {
                    "edge": [c.edge[0] + 1, c.edge[1] + 1],
                    "others": [[i + 1, j + 1] for i, j in c.others],
                    "value": c.value,
                    "is_zero": c.is_zero,
                }
                for c in self.candidates
            ]
        return out


def alpha(
    config: BallConfiguration,
    zero_tolerance: float = DEFAULT_ZERO_TOLERANCE,
    max_edges: int = DEFAULT_MAX_EDGES,
    collect_table: bool = True,
) -> AlphaReport:
    """Exhaustive minimum of the strictly positive alpha_star values.

    Enumerates, for every edge e of the full graph and every subset S of the
    remaining edges, the distance from z_e to span{z_f : f in S}; values at
    or below zero_tolerance are classified as zero and excluded from the
    minimum.  The enumeration is exponential in the edge count, so graphs
    with more than max_edges edges are rejected with
    :class:`TooManyEdgesError`.
    """
    graph = full_contact_graph(config)
    edges = list(graph.edges)
    if len(edges) > max_edges:
        raise TooManyEdgesError(len(edges), max_edges)
    if not edges:
        raise AllZeroError("the configuration has no touching pairs")

    zcols = {e: collision_direction(config, e).vector for e in edges}
    best = math.inf
    best_edge: Edge | None = None
    best_set: tuple[Edge, ...] = ()
    table: list[AlphaCandidate] = []
    n_candidates = 0
    n_zero = 0

    for chosen in edges:
        rest = [e for e in edges if e != chosen]
        z = zcols[chosen]
        for size in range(len(rest) + 1):
            for combo in itertools.combinations(rest, size):
                if size == 0:
                    value = 1.0
                else:
                    cols = np.column_stack([zcols[e] for e in combo])
                    value = _distance_to_span(z, cols)
                is_zero = value <= zero_tolerance
                n_candidates += 1
                n_zero += is_zero
                if collect_table:
                    table.append(AlphaCandidate(chosen, combo, value, is_zero))
                if not is_zero and value < best:
                    best = value
                    best_edge = chosen
                    best_set = (chosen,) + combo
    if best_edge is None:
        raise AllZeroError("no strictly positive candidate values")
    return AlphaReport(
        alpha=best,
        argmin_edge=best_edge,
        argmin_edges=tuple(sorted(best_set)),
        zero_tolerance=zero_tolerance,
        n_candidates=n_candidates,
        n_zero=n_zero,
        candidates=tuple(table) if collect_table else None,
    )


@dataclass(frozen=True, eq=False)
class StressCertificate:
    """Least-squares stress for a chosen edge with coefficient forced to 1.

    ``coefficients`` maps each edge of the set to its symmetric coefficient
    (the chosen edge always maps to 1).  ``residual_norms[k]`` is the norm of
    the unbalanced force at vertex k; their stacked norm ``total_residual``
    equals 2^{3/2} alpha_star, so a near-zero residual certifies a rigid
    (zero alpha_star) choice and vice versa.
    """

    edge: Edge
    coefficients: dict[Edge, float]
    residual_norms: np.ndarray
    total_residual: float


def stress_certificate(
    config: BallConfiguration,
    edge_set: Iterable[Edge] | ContactGraph,
    edge: Edge,
) -> StressCertificate:
    """Best symmetric stress with the chosen edge's coefficient pinned to 1."""
    edges = _edge_list(edge_set)
    chosen = canonical_edge(*edge)
    if chosen not in edges:
        raise ValueError(f"edge {chosen} is not in the edge set")
    others = [e for e in edges if e != chosen]
    target = raw_collision_vector(config, chosen)
    if others:
        cols = np.column_stack([raw_collision_vector(config, e) for e in others])
        coef, *_ = np.linalg.lstsq(cols, -target, rcond=None)
        residual_vec = target + cols @ coef
    else:
        coef = np.zeros(0)
        residual_vec = target
    coefficients = {chosen: 1.0}
    coefficients.update({e: float(a) for e, a in zip(others, coef)})
    per_vertex = np.linalg.norm(
        residual_vec.reshape(config.n, config.dimension), axis=1
    )
    return StressCertificate(
        edge=chosen,
        coefficients=coefficients,
        residual_norms=per_vertex,
        total_residual=float(np.linalg.norm(residual_vec)),
    )


def extend_basis(
    vectors: Sequence[np.ndarray],
    excluded: np.ndarray,
    dim: int,
    rank_tolerance: float = RANK_TOLERANCE,
) -> list[int]:
    """Standard basis indices completing ``vectors`` to a hyperplane avoiding ``excluded``.

    Picks indices i (lowest first) so that span(vectors + picks) has dimension
    dim - 1 and does not contain ``excluded``.  The picks are exactly the e_i
    outside span(vectors + excluded), so the excluded vector stays outside by
    construction.  Raises :class:`DependentInputError` when the input vectors
    are dependent or the excluded vector already lies in their span (rank
    decisions at ``rank_tolerance``).
    """
    w = np.asarray(excluded, dtype=float).reshape(-1)
    if w.size != dim:
        raise ValueError("excluded vector has wrong dimension")
    cols = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
    if any(c.size != dim for c in cols):
        raise ValueError("vectors have wrong dimension")
    stacked = np.column_stack(cols) if cols else np.zeros((dim, 0))
    if cols and np.linalg.matrix_rank(stacked, tol=rank_tolerance) < len(cols):
        raise DependentInputError("input vectors are linearly dependent")
    with_w = np.column_stack([stacked, w])
    if np.linalg.matrix_rank(with_w, tol=rank_tolerance) < len(cols) + 1:
        raise DependentInputError("excluded vector lies in the span of the input")

    # orthonormal basis of span(vectors + excluded), grown greedily with e_i
    q, _ = np.linalg.qr(with_w)
    basis = list(q.T[: len(cols) + 1])
    picks: list[int] = []
    needed = dim - 1 - len(cols)
    for i in range(dim):
        if len(picks) == needed:
            break
        e = np.zeros(dim)
        e[i] = 1.0
        residual = e - sum((b @ e) * b for b in basis)
        norm = np.linalg.norm(residual)
        if norm > rank_tolerance:
            basis.append(residual / norm)
            picks.append(i)
    if len(picks) != needed:
        raise DependentInputError("could not reach the requested dimension")
    return picks


@dataclass(frozen=True, eq=False)
class SphericalVertexReport:
    """Vertex directions of a spherical cone and their facet clearances."""

    alpha_used: float
    vertex_margins: np.ndarray
    min_vertex_margin: float
    vertices_ok: bool
    sample_margins: np.ndarray
    min_sample_margin: float
    samples_ok: bool


def _fold_into_cone(
    config: BallConfiguration,
    zmat: np.ndarray,
    values: np.ndarray,
    max_passes: int = 100_000,
) -> np.ndarray:
    """Fold a vector until it has non-negative margin on every column of zmat."""
    v = values.copy()
    for _ in range(max_passes):
        margins = zmat.T @ v
        bad = np.nonzero(margins < 0.0)[0]
        if bad.size == 0:
            return v
        for k in bad:
            m = float(zmat[:, k] @ v)
            if m < 0.0:
                v = v - 2.0 * m * zmat[:, k]
    raise RuntimeError("folding did not stabilize within the pass budget")


def spherical_vertex_check(
    config: BallConfiguration,
    graph: ContactGraph,
    edge_subset: Iterable[Edge],
    *,
    alpha_value: float | None = None,
    samples: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> SphericalVertexReport:
    """Check the vertex and inradius inequalities of the feasible spherical cone.

    For an independent edge subset, each vertex direction w_k (the normalized
    residual of one direction against the span of the others) must clear some
    facet hyperplane by at least alpha; and every sampled unit state of the
    feasible cone within the span of the graph's directions must clear some
    facet by at least alpha / (n d).  Raises :class:`DependentEdgesError`
    when the subset's directions are linearly dependent.
    """
    subset = _edge_list(edge_subset)
    if not subset:
        raise ValueError("edge subset must be non-empty")
    zcols = np.column_stack(
        [collision_direction(config, e).vector for e in subset]
    )
    if np.linalg.matrix_rank(zcols, tol=RANK_TOLERANCE) < len(subset):
        raise DependentEdgesError("subset directions are linearly dependent")
    if alpha_value is None:
        alpha_value = alpha(config, collect_table=False).alpha

    vertex_margins = []
    for k in range(len(subset)):
        others = np.delete(zcols, k, axis=1)
        z = zcols[:, k]
        if others.shape[1] == 0:
            w = z
        else:
            coef, *_ = np.linalg.lstsq(others, z, rcond=None)
            residual = z - others @ coef
            w = residual / np.linalg.norm(residual)
        vertex_margins.append(float(np.max(zcols.T @ w)))
    vertex_margins = np.array(vertex_margins)

    graph_cols = np.column_stack(
        [collision_direction(config, e).vector for e in graph.edges]
    )
    u_mat, s, _ = np.linalg.svd(graph_cols, full_matrices=False)
    rank = int(np.count_nonzero(s > 1e-12 * s[0]))
    basis = u_mat[:, :rank]

    rng = np.random.default_rng(seed)
    sample_margins = []
    for _ in range(samples):
        raw = rng.standard_normal(config.n * config.dimension)
        v = basis @ (basis.T @ raw)
        norm = np.linalg.norm(v)
        if norm < 1e-9:
            continue
        v = _fold_into_cone(config, graph_cols, v)
        v = v / np.linalg.norm(v)
        sample_margins.append(float(np.max(graph_cols.T @ v)))
    sample_margins = np.array(sample_margins)

    floor = alpha_value / (config.n * config.dimension)
    return SphericalVertexReport(
        alpha_used=alpha_value,
        vertex_margins=vertex_margins,
        min_vertex_margin=float(vertex_margins.min()),
        vertices_ok=bool(np.all(vertex_margins >= alpha_value - tol)),
        sample_margins=sample_margins,
        min_sample_margin=float(sample_margins.min()) if sample_margins.size else math.inf,
        samples_ok=bool(np.all(sample_margins >= floor - tol)),
    )
