import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rqaopt.signal import (DataError, TimeSeries, group_distribution, load_csv,
                           operational_filter, parse_timestamp, split_days,
                           summary_stats)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def hourly(values, start="2017-09-11T00:00:00"):
    stamps = np.datetime64(start, "s") + np.arange(len(values)) * np.timedelta64(3600, "s")
    return TimeSeries(np.asarray(values, float), stamps)


class TestLoadCsv:
    def test_named_column(self, tmp_path):
        ts = load_csv(write(tmp_path, "t,amps\n0,2.0\n1,3.5"), "amps")
        np.testing.assert_array_equal(ts.values, [2.0, 3.5])
        assert ts.timestamps is None

    def test_blank_lines_ignored(self, tmp_path):
        ts = load_csv(write(tmp_path, "t,amps\n0,2.0\n\n1,3.5\n\n"), "amps")
        np.testing.assert_array_equal(ts.values, [2.0, 3.5])

    def test_column_index(self, tmp_path):
        ts = load_csv(write(tmp_path, "t,amps\n0,2.0\n1,3.5\n"), 1)
        np.testing.assert_array_equal(ts.values, [2.0, 3.5])

    def test_non_numeric_cell_names_row(self, tmp_path):
        with pytest.raises(DataError, match="row 3"):
            load_csv(write(tmp_path, "t,amps\n0,2.0\n1,abc\n"), "amps")

    def test_nan_rejected(self, tmp_path):
        with pytest.raises(DataError, match="row 2"):
            load_csv(write(tmp_path, "t,amps\n0,nan\n"), "amps")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "nope.csv", "amps")

    def test_missing_column(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_csv(write(tmp_path, "t,amps\n0,1\n"), "volts")

    def test_empty_result(self, tmp_path):
        with pytest.raises(DataError, match="no data rows"):
            load_csv(write(tmp_path, "t,amps\n\n"), "amps")

    def test_delimiter(self, tmp_path):
        text = "when;amps\n2017-09-11T10:00:00Z;1\n2017-09-11T11:00:00Z;2\n"
        ts = load_csv(write(tmp_path, text), "amps", "when", delimiter=";")
        np.testing.assert_array_equal(ts.values, [1.0, 2.0])

    def test_offset_timestamps(self, tmp_path):
        text = "when,amps\n2017-09-11T10:00:00Z,1\n2017-09-11T12:30:00+01:00,2\n1505131200,3\n"
        ts = load_csv(write(tmp_path, text), "amps", "when")
        assert str(ts.timestamps[1]) == "2017-09-11T11:30:00"
        assert str(ts.timestamps[2]) == "2017-09-11T12:00:00"

    def test_non_increasing_timestamps(self, tmp_path):
        text = "when,amps\n2017-09-11T10:00:00Z,1\n2017-09-11T10:00:00Z,2\n"
        with pytest.raises(DataError, match="increasing"):
            load_csv(write(tmp_path, text), "amps", "when")


def test_parse_timestamp_epoch():
    assert parse_timestamp("0") == np.datetime64("1970-01-01T00:00:00")


class TestSummaryStats:
    def test_constant(self):
        s = summary_stats(TimeSeries([1.0, 1.0, 1.0]))
        assert (s.mean, s.std_dev, s.count) == (1.0, 0.0, 3)

    def test_two_points(self):
        s = summary_stats(TimeSeries([0.0, 2.0]))
        assert (s.mean, s.std_dev, s.min, s.max) == (1.0, 1.0, 0.0, 2.0)

    def test_population_std(self):
        # mean 2.5, squared deviations 2.25+0.25+0.25+2.25 = 5, /4
        assert summary_stats(TimeSeries([1.0, 2.0, 3.0, 4.0])).std_dev == pytest.approx(
            math.sqrt(1.25), abs=1e-15)

    def test_empty(self):
        with pytest.raises(DataError):
            summary_stats(TimeSeries([]))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=50),
           st.floats(-10, 10), st.floats(-100, 100))
    def test_affine(self, xs, a, b):
        base = summary_stats(TimeSeries(xs))
        moved = summary_stats(TimeSeries(np.asarray(xs) * a + b))
        assert moved.std_dev == pytest.approx(abs(a) * base.std_dev, rel=1e-9, abs=1e-9)
        assert base.min <= base.mean <= base.max


class TestOperationalFilter:
    def series(self):
        # night readings at 23:00 and 02:00, day readings at 10:00..
        stamps = np.array(["2017-09-11T23:00", "2017-09-12T02:00", "2017-09-12T10:00",
                           "2017-09-12T11:00", "2017-09-12T12:00", "2017-09-12T13:00"],
                          dtype="datetime64[s]")
        return TimeSeries([1.0, 1.4, 0.5, 1.4, 2.0, 5.0], stamps)

    def test_strict_threshold(self):
        kept, thr = operational_filter(self.series(), "22:00", "06:00")
        assert thr == 1.4
        np.testing.assert_array_equal(kept.values, [2.0, 5.0])
        assert kept.timestamps.size == 2

    def test_all_below(self):
        ts = hourly([3.0] * 24)
        kept, thr = operational_filter(ts)
        assert thr == 3.0 and len(kept) == 0

    def test_whole_day_window(self):
        ts = hourly(np.arange(24.0))
        kept, thr = operational_filter(ts, "00:00", "00:00")
        assert thr == 23.0 and len(kept) == 0

    def test_needs_timestamps(self):
        with pytest.raises(DataError):
            operational_filter(TimeSeries([1.0, 2.0]))

    def test_empty_window(self):
        ts = hourly([1.0, 2.0, 3.0], start="2017-09-11T10:00:00")
        with pytest.raises(DataError, match="night window"):
            operational_filter(ts, "22:00", "06:00")

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0, 10), min_size=24, max_size=96))
    def test_output_above_threshold_and_idempotent(self, vals):
        ts = hourly(vals)
        kept, thr = operational_filter(ts)
        assert np.all(kept.values > thr)
        again, _ = operational_filter(kept, threshold=thr)
        np.testing.assert_array_equal(again.values, kept.values)


class TestGroups:
    def test_single_day(self):
        groups = group_distribution(hourly(np.arange(24.0)), "day-of-week")
        assert [g.group for g in groups] == ["Mon"]  # 2017-09-11 was a Monday
        assert groups[0].count == 24

    def test_constant(self):
        ts = hourly([5.0] * 72)
        for key in ("day-of-week", "hour-of-day"):
            for g in group_distribution(ts, key):
                assert g.min == g.q1 == g.median == g.q3 == g.max == 5.0

    def test_one_sample_per_hour(self):
        groups = group_distribution(hourly(np.arange(24.0)), "hour-of-day")
        assert len(groups) == 24
        for h, g in enumerate(groups):
            assert g.count == 1 and g.median == h and g.group == f"{h:02d}"

    def test_linear_quartiles(self):
        ts = hourly([1.0, 2.0, 3.0, 4.0])
        (g,) = group_distribution(ts, "day-of-week")
        assert (g.q1, g.median, g.q3) == (1.75, 2.5, 3.25)

    def test_needs_timestamps(self):
        with pytest.raises(DataError):
            group_distribution(TimeSeries([1.0]), "hour-of-day")


def test_split_days():
    parts = split_days(hourly(np.arange(50.0)))
    assert [len(p) for p in parts] == [24, 24, 2]
