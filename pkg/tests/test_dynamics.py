import math

import numpy as np
import pytest

from pinnedballs import configs
from pinnedballs.dynamics import (
    Schedule,
    collide,
    collide_as_folding,
    decompose_state,
    functional_value,
    monotone_functional,
    run_schedule,
)
from pinnedballs.errors import NotNormalizedError, ScheduleError
from pinnedballs.geometry import (
    BallConfiguration,
    StateVector,
    collision_direction,
    full_contact_graph,
    normalize_system,
    validate_configuration,
)
from conftest import random_normalized_system


def _state(blocks):
    return StateVector.from_blocks(blocks)


class TestCollide:
    def test_head_on_exchange(self):
        config = configs.touching_pair()
        out = collide(config, _state([[1.0], [-1.0]]), (0, 1))
        np.testing.assert_array_equal(out.values, [-1.0, 1.0])

    def test_separating_pair_unchanged(self):
        config = configs.touching_pair()
        state = _state([[-1.0], [1.0]])
        out = collide(config, state, (0, 1))
        assert out is state

    def test_oblique_exchange(self):
        # u = (-1, 0): only the x components swap
        config = validate_configuration([[0.0, 0.0], [2.0, 0.0]])
        out = collide(config, _state([[1.0, 1.0], [0.0, 0.0]]), (0, 1))
        np.testing.assert_allclose(out.values, [0.0, 1.0, 1.0, 0.0], atol=1e-15)

    def test_non_touching_pair_is_noop(self):
        config = validate_configuration([[0.0], [2.0], [5.0]])
        state = _state([[1.0], [0.0], [-1.0]])
        assert collide(config, state, (0, 2)) is state

    def test_grazing_contact_is_noop(self):
        # relative velocity orthogonal to the line of centers
        config = validate_configuration([[0.0, 0.0], [2.0, 0.0]])
        state = _state([[0.0, 1.0], [0.0, -1.0]])
        assert collide(config, state, (0, 1)) is state

    def test_self_collision_rejected(self):
        config = configs.touching_pair()
        with pytest.raises(ValueError):
            collide(config, _state([[1.0], [-1.0]]), (1, 1))


class TestCollideAsFolding:
    def test_matches_collide_on_examples(self):
        config = configs.touching_pair()
        for blocks in ([[1.0], [-1.0]], [[-1.0], [1.0]], [[0.5], [0.1]]):
            a = collide(config, _state(blocks), (0, 1))
            b = collide_as_folding(config, _state(blocks), (0, 1))
            np.testing.assert_allclose(a.values, b.values, rtol=0, atol=1e-12)

    def test_boundary_state_fixed_by_both(self):
        config = configs.touching_pair()
        state = _state([[1.0], [1.0]])  # v . z = 0 exactly
        assert collide(config, state, (0, 1)) is state
        assert collide_as_folding(config, state, (0, 1)) is state

    def test_agreement_randomized(self, rng):
        worst = 0.0
        for _ in range(1000):
            config, state = random_normalized_system(rng)
            graph = full_contact_graph(config)
            edge = graph.edges[int(rng.integers(len(graph.edges)))]
            a = collide(config, state, edge)
            b = collide_as_folding(config, state, edge)
            worst = max(worst, float(np.max(np.abs(a.values - b.values))))
        assert worst <= 1e-12


class TestRunSchedule:
    def test_second_application_is_noop(self):
        config, state = normalize_system(
            configs.touching_pair(), _state([[1.0], [-1.0]])
        )
        trace = run_schedule(config, state, Schedule.explicit([(0, 1), (0, 1)]))
        assert trace.collisions == 1
        assert list(trace.changed) == [True, False]

    def test_empty_schedule(self):
        config, state = normalize_system(
            configs.touching_pair(), _state([[1.0], [-1.0]])
        )
        trace = run_schedule(config, state, Schedule.explicit([]))
        assert trace.collisions == 0
        assert trace.steps == 0

    def test_greedy_matches_exhaustive_on_chain(self):
        # the exhaustive oracle pins max collisions at 3 for this start
        config, state = normalize_system(
            configs.collinear_chain(3), _state([[1.0], [0.0], [-1.0]])
        )
        trace = run_schedule(config, state, Schedule.greedy())
        assert trace.collisions == 3
        assert trace.stabilized

    def test_foreign_edge_rejected(self):
        config, state = normalize_system(
            configs.collinear_chain(3), _state([[1.0], [0.0], [-1.0]])
        )
        with pytest.raises(ScheduleError):
            run_schedule(config, state, Schedule.explicit([(0, 2)]))

    def test_max_steps_truncates(self):
        config, state = normalize_system(
            configs.touching_pair(), _state([[1.0], [-1.0]])
        )
        trace = run_schedule(
            config, state, Schedule.explicit([(0, 1), (0, 1)]), max_steps=1
        )
        assert trace.steps == 1

    def test_round_robin_stabilizes(self, rng):
        for _ in range(30):
            config, state = random_normalized_system(rng)
            trace = run_schedule(
                config, state, Schedule.round_robin(), max_steps=1_000_000
            )
            assert trace.stabilized
            # stabilized means every pair is separating: one more pass is all no-ops
            again = run_schedule(
                config,
                trace.state(trace.steps),
                Schedule.explicit(full_contact_graph(config).edges),
            )
            assert again.collisions == 0

    def test_trace_records_schema(self):
        config, state = normalize_system(
            configs.touching_pair(), _state([[1.0], [-1.0]])
        )
        trace = run_schedule(config, state, Schedule.explicit([(0, 1)]))
        records = list(trace.records())
        assert records == [
            {
                "t": 1,
                "edge": [1, 2],
                "changed": True,
                "F": pytest.approx(4 * math.sqrt(2)),
                "energy": pytest.approx(1.0),
            }
        ]


class TestMonotoneFunctional:
    def test_two_ball_value_matches_pair_sum(self):
        config = BallConfiguration(1, np.array([[-1.0], [1.0]]))
        state = _state([[1 / math.sqrt(2)], [-1 / math.sqrt(2)]])
        value = monotone_functional(config, state)
        assert value == pytest.approx(-4 * math.sqrt(2))
        # direct evaluation of the double sum over ordered pairs
        direct = 0.0
        for i in range(2):
            for j in range(2):
                direct += float(
                    (state.block(j) - state.block(i)) @ (config.centers[j] - config.centers[i])
                )
        assert value == pytest.approx(direct, abs=1e-9)

    def test_zero_state(self):
        config = BallConfiguration(1, np.array([[-1.0], [1.0]]))
        assert monotone_functional(config, _state([[0.0], [0.0]])) == 0.0

    def test_uncentered_rejected(self):
        config = configs.touching_pair()
        with pytest.raises(NotNormalizedError):
            monotone_functional(config, _state([[1.0], [-1.0]]))

    def test_bounded_by_four_n_squared(self, rng):
        for _ in range(100):
            config, state = random_normalized_system(rng)
            assert abs(monotone_functional(config, state)) <= 4.0 * config.n**2 + 1e-9

    def test_closed_form_matches_double_sum_uncentered(self, rng):
        # functional_value needs no centering; compare against the raw double sum
        for _ in range(20):
            config, state = random_normalized_system(rng)
            shifted = BallConfiguration(
                config.dimension, config.centers + 1.5, config.contact_tolerance
            )
            direct = 0.0
            for i in range(config.n):
                for j in range(config.n):
                    direct += float(
                        (state.block(j) - state.block(i))
                        @ (shifted.centers[j] - shifted.centers[i])
                    )
            assert functional_value(shifted, state.values) == pytest.approx(
                direct, abs=1e-9
            )


class TestTraceInvariants:
    def test_conservation_monotonicity_and_jumps(self, rng):
        for _ in range(60):
            config, state = random_normalized_system(rng)
            graph = full_contact_graph(config)
            edges = [
                graph.edges[int(rng.integers(len(graph.edges)))] for _ in range(120)
            ]
            trace = run_schedule(config, state, Schedule.explicit(edges))
            np.testing.assert_allclose(
                trace.energies, trace.energies[0], rtol=0, atol=1e-12
            )
            momenta = trace.states.reshape(-1, config.n, config.dimension).sum(axis=1)
            assert float(np.max(np.abs(momenta - momenta[0]))) <= 1e-12
            d = config.dimension
            for t, (i, j) in enumerate(trace.edges, start=1):
                jump = trace.functional[t] - trace.functional[t - 1]
                assert jump >= -1e-9
                dv_i = trace.states[t][i * d : (i + 1) * d] - trace.states[t - 1][
                    i * d : (i + 1) * d
                ]
                assert jump == pytest.approx(
                    4.0 * config.n * float(np.linalg.norm(dv_i)), abs=1e-9
                )
                if trace.changed[t - 1]:
                    vi = trace.states[t - 1][i * d : (i + 1) * d]
                    vj = trace.states[t - 1][j * d : (j + 1) * d]
                    expected = (
                        2.0
                        * config.n
                        * float((vj - vi) @ (config.centers[i] - config.centers[j]))
                    )
                    assert jump == pytest.approx(expected, abs=1e-9)


class TestDecomposeState:
    def test_direction_itself_projects_fully(self):
        config = configs.touching_pair()
        graph = full_contact_graph(config)
        z = collision_direction(config, (0, 1)).vector
        fixed, span = decompose_state(config, graph, StateVector(2, 1, z))
        np.testing.assert_allclose(span.values, z, atol=1e-14)
        np.testing.assert_allclose(fixed.values, 0.0, atol=1e-14)

    def test_orthogonal_state_has_no_span_part(self):
        config = configs.touching_pair()
        graph = full_contact_graph(config)
        state = _state([[1.0], [1.0]])  # orthogonal to z = (-1, 1)/sqrt2
        fixed, span = decompose_state(config, graph, state)
        np.testing.assert_allclose(span.values, 0.0, atol=1e-14)
        np.testing.assert_allclose(fixed.values, state.values, atol=1e-14)

    def test_collision_preserves_fixed_part_and_span_norm(self, rng):
        for _ in range(200):
            config, state = random_normalized_system(rng)
            graph = full_contact_graph(config)
            edge = graph.edges[int(rng.integers(len(graph.edges)))]
            fixed, span = decompose_state(config, graph, state)
            after = collide(config, state, edge)
            fixed2, span2 = decompose_state(config, graph, after)
            assert float(np.max(np.abs(fixed.values - fixed2.values))) <= 1e-12
            assert abs(
                np.linalg.norm(span.values) - np.linalg.norm(span2.values)
            ) <= 1e-12
