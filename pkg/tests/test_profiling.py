from infrasim import data_path
from infrasim.profiling import profile_scalability, scalability_csv_rows, tile_map
from infrasim.scenario import BackgroundTraffic, ScenarioConfig
from infrasim.world import load_map, validate_map

import pytest

MAP_PATH = str(data_path("maps", "four_approach.json"))


def profiling_config(duration=5.0, rate=30.0):
    return ScenarioConfig(
        map_path=MAP_PATH, duration=duration, dt=0.05, seed=11,
        background=BackgroundTraffic(rate_per_min=rate))


class TestTileMap:
    def test_tiled_map_valid_and_sized(self):
        m = load_map(MAP_PATH)
        tiled = tile_map(m, 3)
        assert validate_map(tiled) == []
        assert len(tiled.lanes) == 24
        assert len(tiled.intersections) == 3
        assert len(tiled.signals) == 6

    def test_tiles_are_offset(self):
        m = load_map(MAP_PATH)
        tiled = tile_map(m, 2)
        centers = [r.center for r in tiled.intersections]
        assert centers[1][0] - centers[0][0] == 250.0

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            tile_map(load_map(MAP_PATH), 0)


class TestProfile:
    def test_single_count_one_record(self):
        records = profile_scalability(profiling_config(duration=2.0), [1])
        assert len(records) == 1
        assert records[0].intersections == 1
        assert records[0].steps == 40

    def test_counts_must_ascend(self):
        with pytest.raises(ValueError):
            profile_scalability(profiling_config(), [2, 1])

    def test_more_agents_slower_steps(self):
        quiet = profile_scalability(profiling_config(duration=4.0, rate=6.0),
                                    [1])[0]
        busy = profile_scalability(profiling_config(duration=4.0, rate=90.0),
                                   [1])[0]
        assert busy.peak_objects > quiet.peak_objects
        assert busy.step_time_p50 > quiet.step_time_p50

    def test_csv_rows_shape(self):
        records = profile_scalability(profiling_config(duration=2.0), [1, 2])
        rows = scalability_csv_rows(records)
        assert rows[0] == ["intersections", "steps_per_second", "delta_pct",
                           "peak_objects"]
        assert len(rows) == 3
        assert rows[1][2] == ""
        assert rows[2][2].endswith("%")
