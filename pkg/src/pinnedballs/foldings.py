"""Folding maps of R^m and orbit computation.

A folding relative to a closed half-space H = {v : v . h >= 0} is the
identity on H and the reflection in the boundary hyperplane on the
complement.  Foldings are non-expansive, and for any finite half-space
family whose intersection has non-empty interior, every point's orbit under
any infinite folding sequence is finite.  No bound on the orbit size in
terms of the number of half-spaces exists, which
:func:`adversarial_two_halfplanes` demonstrates constructively.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExhaustedError, NoInteriorWitnessError

UNIT_TOLERANCE = 1e-12
STABILITY_MARGIN = -1e-12
POINT_QUANTUM_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Closed half-space {v : v . normal >= 0} through the origin."""

    normal: np.ndarray

    def __post_init__(self):
        normal = np.array(self.normal, dtype=float).reshape(-1)
        if abs(np.linalg.norm(normal) - 1.0) > UNIT_TOLERANCE:
            raise ValueError("half-space normal must have unit length")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "HalfSpace":
        arr = np.array(v, dtype=float).reshape(-1)
        norm = np.linalg.norm(arr)
        if norm == 0.0:
            raise ValueError("cannot build a half-space from the zero vector")
        return cls(arr / norm)

    @property
    def dimension(self) -> int:
        return self.normal.size

    def margin(self, point: np.ndarray) -> float:
        return float(np.asarray(point, dtype=float) @ self.normal)

    def contains(self, point: np.ndarray, tol: float = 0.0) -> bool:
        return self.margin(point) >= -tol


def fold(point: Sequence[float], halfspace: HalfSpace) -> np.ndarray:
    """Identity on the half-space, reflection in its boundary outside it."""
    v = np.array(point, dtype=float).reshape(-1)
    m = float(v @ halfspace.normal)
    if m >= 0.0:
        return v
    return v - 2.0 * m * halfspace.normal


@dataclass(frozen=True)
class FoldingSchedule:
    """Finite description of an infinite folding order.

    round-robin cycles through all half-spaces, periodic repeats a fixed
    word of half-space indices, and seeded-random draws indices uniformly.
    """

    kind: str
    word: tuple[int, ...] = ()
    seed: int | None = None

    KINDS = ("round-robin", "periodic", "seeded-random")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "periodic" and not self.word:
            raise ValueError("periodic schedule needs a non-empty word")
        if self.kind == "seeded-random" and self.seed is None:
            raise ValueError("seeded-random schedule needs a seed")

    @classmethod
    def round_robin(cls) -> "FoldingSchedule":
        return cls("round-robin")

    @classmethod
    def periodic(cls, word: Sequence[int]) -> "FoldingSchedule":
        return cls("periodic", tuple(int(i) for i in word))

    @classmethod
    def seeded_random(cls, seed: int) -> "FoldingSchedule":
        return cls("seeded-random", seed=seed)

    def recurring_indices(self, count: int) -> frozenset[int]:
        """Half-space indices that may still appear arbitrarily late."""
        if self.kind == "periodic":
            return frozenset(self.word)
        return frozenset(range(count))

    def indices(self, count: int) -> Iterator[int]:
        if self.kind == "round-robin":
            return itertools.cycle(range(count))
        if self.kind == "periodic":
            for i in self.word:
                if not 0 <= i < count:
                    raise ValueError(f"word index {i} out of range")
            return itertools.cycle(self.word)
        rng = np.random.default_rng(self.seed)

        def gen():
            while True:
                yield int(rng.integers(count))

        return gen()


@dataclass(frozen=True, eq=False)
class OrbitResult:
    """Distinct points visited by a folding orbit, in order of first visit.

    ``stabilization_index`` is the number of folds applied when the current
    point was certified to lie in every half-space the schedule can still
    apply (all later folds are then identities); None means the budget ran
    out first, which only occurs inside :class:`BudgetExhaustedError`.
    """

    points: np.ndarray
    stabilization_index: int | None
    final: np.ndarray
    steps: int

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def as_dict(self) -> dict:
        return {
            "size": self.size,
            "stabilization_index": self.stabilization_index,
            "steps": self.steps,
            "final": self.final.tolist(),
            "points": self.points.tolist(),
        }


def _point_key(point: np.ndarray) -> bytes:
    return np.round(point, POINT_QUANTUM_DECIMALS).tobytes()


def orbit(
    start: Sequence[float],
    halfspaces: Sequence[HalfSpace],
    schedule: FoldingSchedule,
    budget: int = 1_000_000,
    *,
    witness: Sequence[float],
) -> OrbitResult:
    """Iterate foldings until the orbit certifiably stabilizes.

    The caller must supply a witness point with strictly positive margin
    against every half-space; this is the hypothesis under which orbits are
    guaranteed finite.  The orbit stops when the current point lies (margin
    >= -1e-12) in every half-space the schedule can still apply, and raises
    :class:`BudgetExhaustedError` carrying the partial orbit otherwise.
    Distinct points are counted at 1e-12 quantization.
    """
    if not halfspaces:
        raise ValueError("need at least one half-space")
    w = np.array(witness, dtype=float).reshape(-1)
    wmargin = min(h.margin(w) for h in halfspaces)
    if not wmargin > 0.0:
        raise NoInteriorWitnessError(wmargin)

    recurring = [halfspaces[i] for i in schedule.recurring_indices(len(halfspaces))]

    def stable(v: np.ndarray) -> bool:
        return all(h.margin(v) >= STABILITY_MARGIN for h in recurring)

    v = np.array(start, dtype=float).reshape(-1)
    points = [v.copy()]
    seen = {_point_key(v)}
    if stable(v):
        return OrbitResult(np.array(points), 0, v, 0)
    steps = 0
    for idx in schedule.indices(len(halfspaces)):
        v = fold(v, halfspaces[idx])
        steps += 1
        key = _point_key(v)
        if key not in seen:
            seen.add(key)
            points.append(v.copy())
        if stable(v):
            return OrbitResult(np.array(points), steps, v, steps)
        if steps >= budget:
            raise BudgetExhaustedError(
                OrbitResult(np.array(points), None, v, steps)
            )
    raise AssertionError("unreachable: schedules are infinite")


def adversarial_two_halfplanes(
    m: int,
) -> tuple[list[HalfSpace], np.ndarray, FoldingSchedule]:
    """Two half-planes whose alternating folding orbit exceeds m points.

    The normals are e^{i 0} and e^{i (pi - eps)}: the boundary lines meet at
    the small angle eps, so each double fold advances the point by a rotation
    of 2 eps and the orbit needs on the order of pi/eps points to enter the
    thin feasible wedge.  eps starts at pi/(2m) and is halved until the orbit
    measured by :func:`orbit` actually exceeds m points.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    eps = math.pi / (2 * m)
    schedule = FoldingSchedule.periodic((0, 1))
    start = np.array([0.0, -1.0])
    while True:
        halfspaces = [
            HalfSpace(np.array([1.0, 0.0])),
            HalfSpace(np.array([math.cos(math.pi - eps), math.sin(math.pi - eps)])),
        ]
        witness_angle = math.pi / 2 - eps / 2
        witness = np.array([math.cos(witness_angle), math.sin(witness_angle)])
        result = orbit(start, halfspaces, schedule, budget=10_000_000, witness=witness)
        if result.size > m:
            return halfspaces, start, schedule
        eps /= 2.0
