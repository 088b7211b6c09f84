import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdapulse import ParseError, PulseModel, extract_support, load_recording, load_signal, read_series, simulate_simple, write_series
from tdapulse.io import binarize, diagram_json, read_diagram, write_diagram, write_recording
from tdapulse.persistence import PersistenceDiagram


def text(s):
    return io.StringIO(s)


class TestRecording:
    def test_threshold_rule(self):
        ts = load_recording(text("time_s,volts\n0,0.1\n1,4.9\n2,2.4\n3,2.6\n"))
        assert ts.values.tolist() == [0, 1, 0, 1]

    def test_custom_threshold(self):
        ts = load_recording(text("time_s,volts\n0,1.0\n1,2.0\n"), threshold_volts=1.5)
        assert ts.values.tolist() == [0, 1]

    def test_exactly_at_threshold_is_low(self):
        assert binarize([2.5]).tolist() == [0]

    def test_empty_file(self):
        with pytest.raises(ParseError):
            load_recording(text(""))

    def test_header_only(self):
        with pytest.raises(ParseError, match="no data rows"):
            load_recording(text("time_s,volts\n"))

    @pytest.mark.parametrize("body,line", [
        ("time_s,volts\n0,1\n1,x\n", 3),
        ("time_s,volts\n0,1\n1\n", 3),
        ("time_s,volts\n0,1\n0,2\n", 3),
        ("time_s,volts\n0,1\n1,2\n0.5,2\n", 4),
        ("t,v\n0,1\n", 1),
    ])
    def test_errors_carry_line(self, body, line):
        with pytest.raises(ParseError, match=f"line {line}:"):
            load_recording(text(body))

    def test_series_header_is_not_a_recording(self):
        with pytest.raises(ParseError):
            load_recording(text("time_s,value\n0,1\n"))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32), st.floats(0, 0.5), st.floats(0, 0.45))
    def test_simulate_write_ingest_round_trip(self, seed, alpha, beta):
        m = PulseModel(T=1, tau=0.1, alpha=alpha, beta=beta, window=(0, 8), dt=1 / 64, seed=seed)
        ts = simulate_simple(m)
        buf = io.StringIO()
        write_recording(ts.times, 5.0 * ts.values, buf)
        back = load_recording(io.StringIO(buf.getvalue()))
        np.testing.assert_array_equal(back.times, ts.times)
        np.testing.assert_array_equal(extract_support(back).times, extract_support(ts).times)


class TestSeries:
    def test_round_trip_is_exact(self):
        ts = simulate_simple(PulseModel(T=0.3, tau=0.07, beta=0.2, alpha=0.1, window=(0, 3), dt=0.01))
        buf = io.StringIO()
        write_series(ts, buf)
        assert buf.getvalue().startswith("time_s,value\n")
        back = read_series(io.StringIO(buf.getvalue()))
        assert back.times.tobytes() == ts.times.tobytes()
        assert back.values.tobytes() == ts.values.tobytes()

    def test_load_signal_accepts_both(self):
        assert load_signal(text("time_s,value\n0,0.7\n")).values.tolist() == [0.7]
        assert load_signal(text("time_s,volts\n0,3.0\n")).values.tolist() == [1.0]

    def test_files_and_blank_lines(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("time_s,value\n\n0,1\n1,0\n\n")
        assert read_series(p).values.tolist() == [1, 0]


class TestDiagramFiles:
    def test_csv_round_trip(self, tmp_path):
        d = PersistenceDiagram([0.3, 0.1, 2.0])
        p = tmp_path / "d.csv"
        write_diagram(d, p)
        assert p.read_text().splitlines()[0] == "death"
        assert read_diagram(p) == d

    def test_json(self, tmp_path):
        d = PersistenceDiagram([0.5, 0.25])
        p = tmp_path / "d.json"
        p.write_text(diagram_json(d))
        assert read_diagram(p) == d

    def test_bad_header(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("value\n1\n")
        with pytest.raises(ParseError):
            read_diagram(p)
