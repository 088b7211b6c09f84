"""File formats: sampled series, analog recordings, diagrams and result records."""

from __future__ import annotations

import csv
import json
from array import array
from contextlib import contextmanager

import numpy as np

from .errors import ParseError
from .persistence import PersistenceDiagram
from .signal_model import TimeSeries

DEFAULT_THRESHOLD_VOLTS = 2.5

SERIES_HEADER = ("time_s", "value")
RECORDING_HEADER = ("time_s", "volts")
DIAGRAM_HEADER = ("death",)
SPECTRUM_HEADER = ("freq_hz", "amplitude")


@contextmanager
def _open(path_or_file, mode):
    if hasattr(path_or_file, "read") or hasattr(path_or_file, "write"):
        yield path_or_file
    else:
        with open(path_or_file, mode, newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_columns(path_or_file, header, *columns):
    with _open(path_or_file, "w") as fh:
        w = _writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) for v in row])


def write_series(ts, path_or_file):
    write_columns(path_or_file, SERIES_HEADER, ts.times, ts.values)


def write_recording(times, volts, path_or_file):
    write_columns(path_or_file, RECORDING_HEADER, times, volts)


def _read_two_columns(path_or_file, expected):
    """Stream a two-column numeric CSV; returns the header and both columns."""
    times, values = array("d"), array("d")
    with _open(path_or_file, "r") as fh:
        reader = csv.reader(fh)
        header = None
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if header is None:
                header = tuple(c.strip() for c in row)
                if header not in expected:
                    want = " or ".join(",".join(h) for h in expected)
                    raise ParseError(f"expected header {want}, got {','.join(header)}", line)
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", line)
            try:
                t, v = float(row[0]), float(row[1])
            except ValueError:
                raise ParseError(f"non-numeric field in {row!r}", line) from None
            if times and not t > times[-1]:
                raise ParseError(f"time {t} does not increase (previous {times[-1]})", line)
            times.append(t)
            values.append(v)
    if header is None:
        raise ParseError("empty file: no header", 1)
    if not times:
        raise ParseError("no data rows", 2)
    return header, np.frombuffer(times, dtype=float), np.frombuffer(values, dtype=float)


def read_series(path_or_file):
    _, t, v = _read_two_columns(path_or_file, (SERIES_HEADER,))
    return TimeSeries(t, v)


def binarize(volts, threshold_volts=DEFAULT_THRESHOLD_VOLTS):
    """Hard threshold: 1 strictly above ``threshold_volts``, else 0."""
    return (np.asarray(volts) > threshold_volts).astype(float)


def load_recording(path_or_file, threshold_volts=DEFAULT_THRESHOLD_VOLTS):
    """Read a ``time_s,volts`` capture and hard-threshold it to a 0/1 series."""
    _, t, v = _read_two_columns(path_or_file, (RECORDING_HEADER,))
    return TimeSeries(t, binarize(v, threshold_volts))


def load_signal(path_or_file, threshold_volts=DEFAULT_THRESHOLD_VOLTS):
    """Read either format: recordings are thresholded, series are taken as is."""
    header, t, v = _read_two_columns(path_or_file, (SERIES_HEADER, RECORDING_HEADER))
    if header == RECORDING_HEADER:
        v = binarize(v, threshold_volts)
    return TimeSeries(t, v)


def write_diagram(dgm, path_or_file):
    write_columns(path_or_file, DIAGRAM_HEADER, np.asarray(dgm))


def read_diagram(path_or_file):
    with _open(path_or_file, "r") as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        return PersistenceDiagram(json.loads(text))
    rows = [r for r in csv.reader(text.splitlines()) if r]
    if not rows or tuple(c.strip() for c in rows[0]) != DIAGRAM_HEADER:
        raise ParseError("expected header death", 1)
    try:
        return PersistenceDiagram([float(r[0]) for r in rows[1:]])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def diagram_json(dgm):
    return json.dumps([float(d) for d in np.asarray(dgm)])


def write_spectrum(spec, path_or_file):
    write_columns(path_or_file, SPECTRUM_HEADER, spec.freqs, spec.amps)
