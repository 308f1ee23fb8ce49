import json

import numpy as np
import pytest

from pinnedballs import configs, io
from pinnedballs.foldings import HalfSpace
from pinnedballs.geometry import StateVector


class TestConfigurationFiles:
    def test_round_trip_with_velocities(self, tmp_path):
        path = tmp_path / "config.json"
        config = configs.triangle()
        state = StateVector.from_blocks([[0.1, 0.2], [0.3, -0.4], [0.0, 0.5]])
        io.save_configuration(path, config, state)
        loaded, velocities = io.load_configuration(path)
        np.testing.assert_array_equal(loaded.centers, config.centers)
        np.testing.assert_array_equal(velocities.values, state.values)
        assert loaded.contact_tolerance == config.contact_tolerance

    def test_velocities_optional(self, tmp_path):
        path = tmp_path / "config.json"
        io.save_configuration(path, configs.touching_pair())
        _, velocities = io.load_configuration(path)
        assert velocities is None

    def test_shape_mismatch_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(
            json.dumps(
                {"dimension": 1, "centers": [[0.0], [2.0]], "velocities": [[1.0]]}
            )
        )
        with pytest.raises(ValueError):
            io.load_configuration(path)


class TestScheduleFiles:
    def test_round_trip_is_one_based_on_disk(self, tmp_path):
        path = tmp_path / "schedule.json"
        io.save_schedule(path, [(0, 1), (1, 2)])
        assert json.loads(path.read_text()) == [[1, 2], [2, 3]]
        schedule = io.load_schedule(path)
        assert schedule.edges == ((0, 1), (1, 2))

    def test_zero_based_file_rejected(self, tmp_path):
        path = tmp_path / "schedule.json"
        path.write_text("[[0, 1]]")
        with pytest.raises(ValueError):
            io.load_schedule(path)


class TestHalfspaceFiles:
    def test_round_trip_normalizes(self, tmp_path):
        path = tmp_path / "halfspaces.json"
        path.write_text(json.dumps({"dimension": 2, "normals": [[3.0, 0.0], [0.0, 1.0]]}))
        halfspaces = io.load_halfspaces(path)
        np.testing.assert_allclose(halfspaces[0].normal, [1.0, 0.0])
        io.save_halfspaces(tmp_path / "out.json", halfspaces)
        again = io.load_halfspaces(tmp_path / "out.json")
        assert all(
            np.allclose(a.normal, b.normal) for a, b in zip(halfspaces, again)
        )

    def test_dimension_mismatch_rejected(self, tmp_path):
        path = tmp_path / "halfspaces.json"
        path.write_text(json.dumps({"dimension": 3, "normals": [[1.0, 0.0]]}))
        with pytest.raises(ValueError):
            io.load_halfspaces(path)
