"""Configuration builders: named desk-scale families and random generators."""

from __future__ import annotations

import math

import numpy as np

from .geometry import BallConfiguration, full_contact_graph, validate_configuration

SQRT3 = math.sqrt(3.0)


def collinear_chain(n: int, d: int = 1) -> BallConfiguration:
    """n balls in a row at spacing exactly 2, embedded in dimension d."""
    centers = np.zeros((n, d))
    centers[:, 0] = 2.0 * np.arange(n)
    return BallConfiguration(d, centers)


def touching_pair(d: int = 1) -> BallConfiguration:
    return collinear_chain(2, d)


def triangle() -> BallConfiguration:
    return validate_configuration([[0.0, 0.0], [2.0, 0.0], [1.0, SQRT3]])


def rhombus() -> BallConfiguration:
    """Two unit triangles sharing an edge; five contacts."""
    return validate_configuration(
        [[0.0, 0.0], [2.0, 0.0], [1.0, SQRT3], [1.0, -SQRT3]]
    )


def square() -> BallConfiguration:
    """Four discs on square corners; the four sides touch, diagonals do not."""
    return validate_configuration([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])


def hexagonal_flower() -> BallConfiguration:
    """Central disc with its six lattice neighbours; 12 contacts, self-stressed."""
    centers = [[0.0, 0.0]]
    for k in range(6):
        angle = k * math.pi / 3.0
        centers.append([2.0 * math.cos(angle), 2.0 * math.sin(angle)])
    return validate_configuration(centers)


def _random_unit(d: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
        if norm > 1e-9:
            return v / norm


#: Safety gap separating intended contacts from all other pairs, so the
#: generated full contact graph is unambiguous at the default tolerance.
CLEARANCE = 1e-6


def random_contact_configuration(
    n: int,
    d: int,
    rng: np.random.Generator,
    *,
    style: str = "tree",
    max_tries: int = 500,
) -> BallConfiguration:
    """Random configuration grown by attaching each ball to earlier ones.

    style "tree" attaches every new ball to exactly one earlier ball, so the
    full contact graph is a tree; "mixed" (d >= 2) sometimes attaches to a
    touching pair simultaneously, closing triangles.  All non-contact pairs
    are kept strictly separated by a clearance so the contact graph is exact.
    """
    if style not in ("tree", "mixed"):
        raise ValueError(f"unknown style {style!r}")
    for _ in range(max_tries):
        centers = [np.zeros(d)]
        contacts: set[tuple[int, int]] = set()
        failed = False
        for k in range(1, n):
            placed = False
            for _ in range(80):
                close_triangle = (
                    style == "mixed" and d >= 2 and contacts and rng.random() < 0.4
                )
                if close_triangle:
                    a, b = list(contacts)[int(rng.integers(len(contacts)))]
                    mid = (centers[a] + centers[b]) / 2.0
                    axis = centers[a] - centers[b]
                    w = _random_unit(d, rng)
                    w -= (w @ axis) / (axis @ axis) * axis
                    norm = np.linalg.norm(w)
                    if norm < 1e-9:
                        continue
                    cand = mid + SQRT3 * (w / norm)
                    new_contacts = {(a, k), (b, k)}
                else:
                    base = int(rng.integers(len(centers)))
                    cand = centers[base] + 2.0 * _random_unit(d, rng)
                    new_contacts = {(base, k)}
                ok = True
                for idx, c in enumerate(centers):
                    dist = float(np.linalg.norm(cand - c))
                    if any(idx == a for a, _ in new_contacts):
                        if abs(dist - 2.0) > 1e-12:
                            ok = False
                            break
                    elif dist < 2.0 + CLEARANCE:
                        ok = False
                        break
                if ok:
                    centers.append(cand)
                    contacts.update(new_contacts)
                    placed = True
                    break
            if not placed:
                failed = True
                break
        if failed:
            continue
        config = BallConfiguration(d, np.array(centers))
        graph = full_contact_graph(config)
        if set(graph.edges) == {tuple(sorted(e)) for e in contacts}:
            return config
    raise RuntimeError(f"could not grow a valid configuration (n={n}, d={d})")
