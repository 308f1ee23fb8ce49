import math

import numpy as np
import pytest

from pinnedballs import configs
from pinnedballs.errors import (
    DisconnectedError,
    NotTouchingError,
    OverlapError,
    ZeroEnergyError,
)
from pinnedballs.geometry import (
    BallConfiguration,
    ContactGraph,
    StateVector,
    canonical_edge,
    collision_direction,
    full_contact_graph,
    interior_witness,
    normalize_system,
    raw_collision_vector,
    validate_configuration,
)

from conftest import random_normalized_system

SQRT3 = math.sqrt(3.0)


class TestValidation:
    def test_touching_pair_is_valid(self):
        config = validate_configuration([[0.0], [2.0]])
        assert config.n == 2
        assert config.touches(0, 1)

    def test_overlap_rejected_with_pair_and_distance(self):
        with pytest.raises(OverlapError) as exc:
            validate_configuration([[0.0, 0.0], [1.0, 0.0]])
        assert (exc.value.i, exc.value.j) == (0, 1)
        assert exc.value.distance == pytest.approx(1.0)
        assert "balls 1 and 2" in str(exc.value)

    def test_triangle_all_pairs_touch(self):
        # pairwise distances: |(2,0)| = 2, |(1,sqrt3)| = 2, |(-1,sqrt3)| = 2
        config = validate_configuration([[0.0, 0.0], [2.0, 0.0], [1.0, SQRT3]])
        for i, j in ((0, 1), (0, 2), (1, 2)):
            assert config.touches(i, j)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            validate_configuration([[0.0, 0.0], [2.0]])

    def test_tolerance_must_be_nonnegative(self):
        with pytest.raises(ValueError):
            BallConfiguration(1, np.array([[0.0]]), contact_tolerance=-1.0)


class TestContactGraph:
    def test_collinear_chain(self):
        graph = full_contact_graph(configs.collinear_chain(3))
        assert graph.edges == ((0, 1), (1, 2))

    def test_gap_breaks_edge(self):
        graph = full_contact_graph(validate_configuration([[0.0], [2.0], [5.0]]))
        assert graph.edges == ((0, 1),)

    def test_triangle_edges(self):
        graph = full_contact_graph(configs.triangle())
        assert graph.edges == ((0, 1), (0, 2), (1, 2))

    def test_components(self):
        graph = ContactGraph(4, ((0, 1), (2, 3)))
        assert sorted(sorted(c) for c in graph.components()) == [[0, 1], [2, 3]]
        assert not graph.is_connected

    def test_edge_canonicalization(self):
        graph = ContactGraph(3, ((2, 1),))
        assert graph.edges == ((1, 2),)
        assert graph.has_edge(2, 1)
        with pytest.raises(ValueError):
            canonical_edge(1, 1)


class TestCollisionDirection:
    def test_two_ball_direction(self):
        config = configs.touching_pair()
        z = collision_direction(config, (0, 1)).vector
        np.testing.assert_allclose(z, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)

    def test_symmetry_in_pair_order(self):
        config = configs.touching_pair()
        a = collision_direction(config, (0, 1)).vector
        b = collision_direction(config, (1, 0)).vector
        np.testing.assert_array_equal(a, b)

    def test_chain_second_edge(self):
        config = configs.collinear_chain(3)
        z = collision_direction(config, (1, 2)).vector
        np.testing.assert_allclose(
            z, [0.0, -1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15
        )

    def test_not_touching_rejected(self):
        config = validate_configuration([[0.0], [2.0], [5.0]])
        with pytest.raises(NotTouchingError):
            collision_direction(config, (0, 2))

    def test_raw_vector_norm_is_two_sqrt_two(self, rng):
        for _ in range(50):
            config, _ = random_normalized_system(rng)
            graph = full_contact_graph(config)
            for edge in graph.edges:
                raw = raw_collision_vector(config, edge)
                assert abs(np.linalg.norm(raw) - 2.0 ** 1.5) <= 1e-12
                unit = collision_direction(config, edge).vector
                assert abs(np.linalg.norm(unit) - 1.0) <= 1e-12


class TestNormalizeSystem:
    def test_two_ball_example(self):
        config = configs.touching_pair()
        state = StateVector.from_blocks([[1.0], [-1.0]])
        cfg, st = normalize_system(config, state)
        np.testing.assert_allclose(cfg.centers.ravel(), [-1.0, 1.0])
        np.testing.assert_allclose(
            st.values, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-15
        )

    def test_idempotent_on_normalized_input(self):
        # chosen so mean and energy are exact in binary floating point
        config = BallConfiguration(1, np.array([[-3.0], [-1.0], [1.0], [3.0]]))
        state = StateVector.from_blocks([[0.5], [0.5], [-0.5], [-0.5]])
        cfg, st = normalize_system(config, state)
        np.testing.assert_array_equal(cfg.centers, config.centers)
        np.testing.assert_array_equal(st.values, state.values)

    def test_zero_energy_after_momentum_removal(self):
        config = configs.touching_pair()
        state = StateVector.from_blocks([[3.0], [3.0]])
        with pytest.raises(ZeroEnergyError):
            normalize_system(config, state)

    def test_normalization_identities(self, rng):
        for _ in range(50):
            config, state = random_normalized_system(rng)
            assert abs(np.linalg.norm(config.centers.sum(axis=0))) <= 1e-12
            assert abs(np.linalg.norm(state.momentum)) <= 1e-12
            assert abs(state.energy - 1.0) <= 1e-12


class TestInteriorWitness:
    def test_two_ball_witness(self):
        config = configs.touching_pair()
        w, margin = interior_witness(config)
        np.testing.assert_allclose(w.values, [0.0, 1.0])
        assert margin == pytest.approx(1 / math.sqrt(2))
        assert margin >= 2.0 ** (-1.5) / 2.0

    def test_collinear_three_margin(self):
        # w = (0, 2, 4)/sqrt(20), every contact has w.z = sqrt(2)*c = 1/sqrt(10)
        config = configs.collinear_chain(3)
        _, margin = interior_witness(config)
        assert margin == pytest.approx(1 / math.sqrt(10))
        assert margin >= 2.0 ** (-1.5) / 12.0

    def test_disconnected_rejected(self):
        config = validate_configuration([[0.0], [2.0], [10.0], [12.0]])
        with pytest.raises(DisconnectedError):
            interior_witness(config)

    def test_margin_floor_randomized(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 9))
            d = int(rng.integers(1, 4))
            style = "mixed" if d >= 2 else "tree"
            config = configs.random_contact_configuration(n, d, rng, style=style)
            w, margin = interior_witness(config)
            assert abs(np.linalg.norm(w.values) - 1.0) <= 1e-12
            assert margin >= 2.0 ** (-1.5) / (n * (n - 1) ** 2) - 1e-12
