"""Fourier baseline for the pulse rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NonUniformSamplingError, NoPeakError
from .step_detect import RpmEstimate

UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    freqs: np.ndarray
    amps: np.ndarray

    @property
    def resolution(self):
        return float(self.freqs[1] - self.freqs[0]) if self.freqs.size > 1 else float("nan")


def sample_spacing(ts):
    dts = np.diff(ts.times)
    dt = float(dts.mean())
    # relative to dt, plus a few ulps of the largest timestamp
    slack = UNIFORM_RTOL * dt + 8 * np.finfo(float).eps * np.max(np.abs(ts.times))
    if np.max(np.abs(dts - dt)) > slack:
        raise NonUniformSamplingError("Fourier baseline needs uniformly spaced samples")
    return dt


def one_sided_spectrum(ts):
    """Amplitude spectrum of the mean-removed signal, DC to Nyquist.

    Rectangular window, no padding.  Non-DC bins (and the Nyquist bin only
    when the length is odd) are doubled so that a unit sinusoid sitting on a
    bin reads 1.
    """
    n = len(ts)
    if n < 4:
        raise InvalidParameterError("need at least 4 samples for a spectrum")
    dt = sample_spacing(ts)
    x = ts.values - ts.values.mean()
    amps = np.abs(np.fft.rfft(x)) / n
    if n % 2 == 0:
        amps[1:-1] *= 2
    else:
        amps[1:] *= 2
    return Spectrum(np.fft.rfftfreq(n, dt), amps)


def rpm_fourier(ts, w=3.0):
    """60 x the lowest non-DC frequency whose amplitude exceeds ``max / w``."""
    if not w > 1:
        raise InvalidParameterError("w must exceed 1")
    spec = one_sided_spectrum(ts)
    amps = spec.amps[1:]
    a_max = amps.max()
    scale = np.max(np.abs(ts.values))
    # mean removal of a constant leaves round-off, not a peak
    if not a_max > 1e-12 * scale:
        raise NoPeakError("flat spectrum: no peak to pick")
    k = 1 + int(np.argmax(amps > a_max / w))
    f1 = float(spec.freqs[k])
    # f1 = k / (n * dt): bin k counts k cycles over the record
    return RpmEstimate(omega=60.0 * f1, pulses=k, span_s=k / f1, method="fourier")
