import math

import numpy as np
import pytest

from pinnedballs import configs
from pinnedballs.bounds import max_collisions_bound, resolve_tau
from pinnedballs.dynamics import Schedule, run_schedule
from pinnedballs.errors import (
    BudgetExceededError,
    NotNormalizedError,
    TooManyEdgesError,
)
from pinnedballs.geometry import StateVector, normalize_system
from pinnedballs.rigidity import alpha
from pinnedballs.search import (
    compare_with_bound,
    exhaustive_max_collisions,
    greedy_schedule,
    sample_unit_state,
    velocity_sweep,
)


def _chain3_system():
    return normalize_system(
        configs.collinear_chain(3), StateVector.from_blocks([[1.0], [0.0], [-1.0]])
    )


class TestGreedy:
    def test_two_balls_single_collision(self):
        config, state = normalize_system(
            configs.touching_pair(), StateVector.from_blocks([[1.0], [-1.0]])
        )
        result = greedy_schedule(config, state)
        assert result.collisions == 1
        assert result.witness == ((0, 1),)

    def test_separating_state_stops_immediately(self):
        config, state = normalize_system(
            configs.touching_pair(), StateVector.from_blocks([[-1.0], [1.0]])
        )
        assert greedy_schedule(config, state).collisions == 0

    def test_chain_matches_exhaustive(self):
        config, state = _chain3_system()
        greedy = greedy_schedule(config, state)
        exhaustive = exhaustive_max_collisions(config, state)
        assert greedy.collisions == exhaustive.collisions == 3

    def test_unnormalized_rejected(self):
        config = configs.touching_pair()
        with pytest.raises(NotNormalizedError):
            greedy_schedule(config, StateVector.from_blocks([[1.0], [-1.0]]))

    def test_random_policy_replays(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 5))
            d = int(rng.integers(1, 3))
            style = "mixed" if d >= 2 else "tree"
            config = configs.random_contact_configuration(n, d, rng, style=style)
            state = sample_unit_state(n, d, rng)
            config, state = normalize_system(config, state)
            result = greedy_schedule(
                config, state, policy="random", seed=int(rng.integers(2**32))
            )
            trace = run_schedule(config, state, Schedule.explicit(result.witness))
            assert trace.collisions == result.collisions


class TestExhaustive:
    def test_two_balls(self):
        config, state = normalize_system(
            configs.touching_pair(), StateVector.from_blocks([[1.0], [-1.0]])
        )
        result = exhaustive_max_collisions(config, state)
        assert result.collisions == 1

    def test_chain_regression_value(self):
        # pinned by running this exhaustive oracle ahead of the build
        config, state = _chain3_system()
        result = exhaustive_max_collisions(config, state)
        assert result.collisions == 3
        assert not result.truncated

    def test_witness_replays_exactly(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 5))
            d = int(rng.integers(1, 3))
            style = "mixed" if d >= 2 else "tree"
            config = configs.random_contact_configuration(n, d, rng, style=style)
            state = sample_unit_state(n, d, rng)
            config, state = normalize_system(config, state)
            result = exhaustive_max_collisions(config, state, depth_cap=16)
            trace = run_schedule(config, state, Schedule.explicit(result.witness))
            assert trace.collisions == result.collisions == len(result.witness)

    def test_depth_cap_raises_with_best(self):
        config, state = _chain3_system()
        with pytest.raises(BudgetExceededError) as exc:
            exhaustive_max_collisions(config, state, depth_cap=1)
        assert exc.value.best.collisions == 1
        assert exc.value.best.truncated

    def test_edge_guard(self):
        config = configs.hexagonal_flower()
        state = sample_unit_state(config.n, config.dimension, np.random.default_rng(0))
        config, state = normalize_system(config, state)
        with pytest.raises(TooManyEdgesError):
            exhaustive_max_collisions(config, state)

    def test_memoization_changes_nothing(self, rng):
        for _ in range(10):
            config = configs.random_contact_configuration(4, 2, rng, style="mixed")
            state = sample_unit_state(4, 2, rng)
            config, state = normalize_system(config, state)
            a = exhaustive_max_collisions(config, state, memoize=True)
            b = exhaustive_max_collisions(config, state, memoize=False)
            assert a.collisions == b.collisions

    def test_bound_comparison(self):
        config, state = _chain3_system()
        result = exhaustive_max_collisions(config, state)
        report = max_collisions_bound(
            3, 1, alpha(config, collect_table=False).alpha, resolve_tau(1)[0]
        )
        compared = compare_with_bound(result, report)
        assert compared.bound.within
        assert compared.bound.log2_collisions == pytest.approx(math.log2(3))


class TestVelocitySweep:
    def test_single_sample_matches_direct_run(self):
        config = configs.collinear_chain(3)
        centered, _ = normalize_system(
            config, StateVector.from_blocks([[1.0], [0.0], [-1.0]])
        )
        sweep = velocity_sweep(centered, 1, seed=42)
        state = sample_unit_state(3, 1, np.random.default_rng(42))
        direct = exhaustive_max_collisions(centered, state)
        assert sweep.best == direct.collisions
        assert len(sweep.rows) == 1

    def test_monotone_in_sample_count(self):
        config, _ = _chain3_system()
        bests = [velocity_sweep(config, k, seed=7).best for k in (1, 2, 4, 8)]
        assert all(b >= a for a, b in zip(bests, bests[1:]))

    def test_sweep_dominates_single_greedy(self):
        config, state = _chain3_system()
        sweep = velocity_sweep(config, 8, seed=3, method="greedy")
        single = greedy_schedule(config, sample_unit_state(3, 1, np.random.default_rng(3)))
        assert sweep.best >= single.collisions
