import math

import numpy as np
import pytest

from pinnedballs.errors import BudgetExhaustedError, NoInteriorWitnessError
from pinnedballs.foldings import (
    FoldingSchedule,
    HalfSpace,
    adversarial_two_halfplanes,
    fold,
    orbit,
)


def _random_family(rng, d=None, m=None):
    d = d or int(rng.integers(2, 5))
    m = m or int(rng.integers(1, 6))
    witness = rng.standard_normal(d)
    witness /= np.linalg.norm(witness)
    normals = []
    while len(normals) < m:
        h = rng.standard_normal(d)
        norm = np.linalg.norm(h)
        if norm < 1e-9:
            continue
        h /= norm
        if h @ witness < 0:
            h = -h
        if h @ witness > 1e-3:
            normals.append(h)
    return [HalfSpace(h) for h in normals], witness


class TestFold:
    def test_interior_point_fixed(self):
        h = HalfSpace(np.array([0.0, 1.0]))
        v = np.array([0.0, 1.0])
        np.testing.assert_array_equal(fold(v, h), v)

    def test_antipode_reflects_through_origin(self):
        h = HalfSpace(np.array([0.0, 1.0]))
        np.testing.assert_allclose(fold(-h.normal, h), h.normal, atol=1e-15)

    def test_mirror_across_axis(self):
        h = HalfSpace(np.array([0.0, 1.0]))
        np.testing.assert_allclose(fold([3.0, -2.0], h), [3.0, 2.0], atol=1e-15)

    def test_non_unit_normal_rejected(self):
        with pytest.raises(ValueError):
            HalfSpace(np.array([0.0, 2.0]))
        h = HalfSpace.from_vector([0.0, 2.0])
        np.testing.assert_allclose(h.normal, [0.0, 1.0])

    def test_non_expansive(self, rng):
        for _ in range(300):
            d = int(rng.integers(1, 6))
            h = HalfSpace.from_vector(rng.standard_normal(d) + 1e-6)
            x, y = rng.standard_normal(d), rng.standard_normal(d)
            before = np.linalg.norm(x - y)
            after = np.linalg.norm(fold(x, h) - fold(y, h))
            assert after <= before + 1e-12

    def test_isometry_on_boundary_points(self, rng):
        for _ in range(300):
            d = int(rng.integers(2, 6))
            h = HalfSpace.from_vector(rng.standard_normal(d) + 1e-6)
            x = rng.standard_normal(d)
            p = rng.standard_normal(d)
            p = p - (p @ h.normal) * h.normal  # point on the boundary
            assert abs(
                np.linalg.norm(fold(x, h) - p) - np.linalg.norm(x - p)
            ) <= 1e-12


class TestOrbit:
    def test_start_inside_is_fixed(self):
        halfspaces = [HalfSpace(np.array([1.0, 0.0])), HalfSpace(np.array([0.0, 1.0]))]
        result = orbit(
            [1.0, 1.0], halfspaces, FoldingSchedule.round_robin(), witness=[1.0, 1.0]
        )
        assert result.size == 1
        assert result.stabilization_index == 0

    def test_single_halfspace_two_points(self):
        halfspaces = [HalfSpace(np.array([0.0, 1.0]))]
        result = orbit(
            [0.5, -1.0], halfspaces, FoldingSchedule.round_robin(), witness=[0.0, 1.0]
        )
        assert result.size == 2
        assert result.stabilization_index == 1
        np.testing.assert_allclose(result.final, [0.5, 1.0])

    def test_perpendicular_halfplanes_orbit_at_most_four(self, rng):
        # reflections across the two axes generate at most 4 sign patterns
        halfspaces = [HalfSpace(np.array([1.0, 0.0])), HalfSpace(np.array([0.0, 1.0]))]
        witness = np.array([1.0, 1.0]) / math.sqrt(2.0)
        for _ in range(50):
            start = rng.standard_normal(2) * 3.0
            result = orbit(
                start, halfspaces, FoldingSchedule.round_robin(), witness=witness
            )
            assert result.size <= 4
            assert result.stabilization_index is not None

    def test_invalid_witness_rejected(self):
        halfspaces = [HalfSpace(np.array([1.0, 0.0]))]
        with pytest.raises(NoInteriorWitnessError):
            orbit(
                [1.0, 0.0],
                halfspaces,
                FoldingSchedule.round_robin(),
                witness=[-1.0, 0.0],
            )

    def test_budget_exhaustion_carries_partial_orbit(self):
        halfspaces, start, schedule = adversarial_two_halfplanes(50)
        witness = halfspaces[0].normal + halfspaces[1].normal
        witness /= np.linalg.norm(witness)
        with pytest.raises(BudgetExhaustedError) as exc:
            orbit(start, halfspaces, schedule, budget=10, witness=witness)
        assert exc.value.partial.steps == 10
        assert exc.value.partial.stabilization_index is None
        assert exc.value.partial.size >= 2

    def test_distance_to_witness_never_increases(self, rng):
        for _ in range(100):
            halfspaces, witness = _random_family(rng)
            start = rng.standard_normal(len(witness)) * 2.0
            result = orbit(
                start,
                halfspaces,
                FoldingSchedule.round_robin(),
                witness=witness,
            )
            dists = np.linalg.norm(result.points - witness, axis=1)
            assert np.all(np.diff(dists) <= 1e-12)

    def test_stabilization_across_policies(self, rng):
        for _ in range(100):
            halfspaces, witness = _random_family(rng)
            start = rng.standard_normal(len(witness)) * 2.0
            for schedule in (
                FoldingSchedule.round_robin(),
                FoldingSchedule.seeded_random(int(rng.integers(2**32))),
                FoldingSchedule.periodic(tuple(range(len(halfspaces)))),
            ):
                result = orbit(start, halfspaces, schedule, witness=witness)
                assert result.stabilization_index is not None
                for h in halfspaces:
                    assert h.margin(result.final) >= -1e-12


class TestAdversarial:
    def test_orbit_exceeds_one(self):
        halfspaces, start, schedule = adversarial_two_halfplanes(1)
        witness = halfspaces[0].normal + halfspaces[1].normal
        witness /= np.linalg.norm(witness)
        result = orbit(start, halfspaces, schedule, witness=witness)
        assert result.size > 1

    def test_orbit_exceeds_hundred(self):
        halfspaces, start, schedule = adversarial_two_halfplanes(100)
        witness = halfspaces[0].normal + halfspaces[1].normal
        witness /= np.linalg.norm(witness)
        result = orbit(start, halfspaces, schedule, witness=witness)
        assert result.size > 100
