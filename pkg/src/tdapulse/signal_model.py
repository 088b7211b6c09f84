"""Synthetic two-state pulse trains with digital ringing and accordion spacing.

Two generators are provided:

* :func:`simulate_simple` -- a regular pulse wave sampled with per-sample
  time jitter (which produces spurious flips near every edge) plus uniform
  amplitude noise.
* :func:`simulate_accordion` -- the same, except that the length of each
  period is drawn uniformly from ``[(1 - epsilon) T, (1 + epsilon) T]`` and the
  clean wave is warped through a piecewise-linear time map.

Random draws come from ``numpy.random.Generator(PCG64(seed))`` in a fixed
order: every period length first (accordion only, and only when
``epsilon > 0``), then one ``(jitter, amplitude)`` pair per sample.  The same
``(model, seed)`` therefore always yields a bitwise-identical series.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import InvalidParameterError, OutOfRangeError

DEFAULT_SEED = 48824


@dataclass(frozen=True)
class TimeSeries:
    """Real-valued samples on a strictly increasing time axis (seconds)."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1:
            raise InvalidParameterError("times and values must be 1-D")
        if times.shape != values.shape:
            raise InvalidParameterError(
                f"length mismatch: {times.size} times vs {values.size} values")
        if times.size == 0:
            raise InvalidParameterError("a time series needs at least one sample")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise InvalidParameterError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.times.size

    @property
    def duration(self):
        return float(self.times[-1] - self.times[0])

    def shifted(self, offset):
        return TimeSeries(self.times + offset, self.values)

    def scaled(self, factor):
        if factor <= 0:
            raise InvalidParameterError("time scale factor must be positive")
        return TimeSeries(self.times * factor, self.values)

    def inverted(self):
        """The complementary signal ``1 - X``, used to look at low logic."""
        return TimeSeries(self.times, 1.0 - self.values)


@dataclass(frozen=True)
class PulseModel:
    """Parameters of the generative pulse-train models.

    ``alpha`` is the edge jitter as a fraction of ``tau``, ``beta`` the
    amplitude-noise half-width and ``epsilon`` the period jitter as a fraction
    of ``T``.  Samples are taken at ``A + i * dt`` for every ``i`` with
    ``A + i * dt <= B``, so both window ends are sampled when ``B - A`` is a
    multiple of ``dt``.
    """

    T: float
    tau: float
    alpha: float = 0.0
    beta: float = 0.0
    epsilon: float = 0.0
    window: tuple = (0.0, 64.0)
    dt: float = 0.0625
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(float(w) for w in self.window))
        if len(self.window) != 2:
            raise InvalidParameterError("window must be a pair (A, B)")
        if not self.T > 0:
            raise InvalidParameterError(f"period T must be positive, got {self.T}")
        if not 0 < self.tau < self.T:
            raise InvalidParameterError(f"on-time tau must lie in (0, T), got {self.tau}")
        if not self.tau / self.T < 0.5:
            raise InvalidParameterError("duty tau/T must be below 0.5")
        if not 0 <= self.alpha <= 0.5:
            raise InvalidParameterError(f"alpha must lie in [0, 0.5], got {self.alpha}")
        if not 0 <= self.beta < 0.5:
            raise InvalidParameterError(f"beta must lie in [0, 0.5), got {self.beta}")
        if not 0 <= self.epsilon <= 1:
            raise InvalidParameterError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not self.dt > 0:
            raise InvalidParameterError("dt must be positive")
        a, b = self.window
        if not b > a:
            raise InvalidParameterError("window must satisfy B > A")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise InvalidParameterError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_rpm(cls, omega0, duty=0.05, alpha=0.0, beta=0.0, epsilon=0.0,
                 n_periods=32, oversample=32, seed=DEFAULT_SEED):
        """Build the simulation setup used for the robustness sweeps.

        ``T = 60 / omega0``, ``tau = duty * T``, window ``[0, n_periods * T]``
        and ``dt = T / oversample``, i.e. ``n_periods * oversample`` sampling
        intervals whatever the nominal speed.
        """
        if not omega0 > 0:
            raise InvalidParameterError("nominal RPM must be positive")
        T = 60.0 / omega0
        return cls(T=T, tau=duty * T, alpha=alpha, beta=beta, epsilon=epsilon,
                   window=(0.0, n_periods * T), dt=T / oversample, seed=seed)

    @property
    def duty(self):
        return self.tau / self.T

    @property
    def n_intervals(self):
        a, b = self.window
        # tolerance absorbs (B - A)/dt landing a hair below an integer
        return int(math.floor((b - a) / self.dt + 1e-9))

    def sample_times(self):
        return self.window[0] + self.dt * np.arange(self.n_intervals + 1)

    def with_seed(self, seed):
        return replace(self, seed=seed)

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "window" in d:
            d["window"] = tuple(d["window"])
        return cls(**d)


@dataclass(frozen=True)
class AccordionRealization:
    periods: np.ndarray
    cumulative: np.ndarray  # cumulative[j] = Q_1 + ... + Q_j, cumulative[0] = 0

    @property
    def K(self):
        return self.periods.size

    @property
    def total(self):
        return float(self.cumulative[-1])


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _check_wave(T, tau):
    if not T > 0:
        raise InvalidParameterError(f"period T must be positive, got {T}")
    if not 0 < tau < T:
        raise InvalidParameterError(f"on-time tau must lie in (0, T), got {tau}")


def pulse_train(t, T, tau):
    """Ideal pulse wave: 1 where ``0 <= (t mod T) <= tau``, else 0.

    Accepts scalars or arrays; returns the same shape as ``t``.
    """
    _check_wave(T, tau)
    phase = np.mod(t, T)
    out = (phase <= tau).astype(float)
    return out if np.ndim(t) else float(out)


def _noise(model, rng, n):
    u = rng.random((n, 2))
    dx = model.alpha * model.tau * (2.0 * u[:, 0] - 1.0)
    dy = model.beta * (2.0 * u[:, 1] - 1.0)
    return dx, dy


def simulate_simple(model):
    """Sample ``P(t + dx) + dy`` with fresh jitter ``dx``, ``dy`` per sample.

    ``epsilon`` is ignored.
    """
    rng = make_rng(model.seed)
    t = model.sample_times()
    dx, dy = _noise(model, rng, t.size)
    return TimeSeries(t, pulse_train(t + dx, model.T, model.tau) + dy)


def draw_accordion_periods(model, rng=None):
    """Draw period lengths until they cover the window length ``B - A``.

    No random numbers are consumed when ``epsilon == 0``.
    """
    if rng is None:
        rng = make_rng(model.seed)
    a, b = model.window
    width = b - a
    T, eps = model.T, model.epsilon
    periods = []
    total = 0.0
    while total < width:
        q = (1.0 - eps) * T + 2.0 * eps * T * rng.random() if eps > 0 else T
        periods.append(q)
        total += q
    periods = np.asarray(periods)
    cumulative = np.concatenate(([0.0], np.cumsum(periods)))
    return AccordionRealization(periods, cumulative)


def reparameterize(s, realization, T):
    """Piecewise-linear warp sending the end of the j-th drawn period to ``j*T``.

    Inside period ``j + 1`` the map is affine with slope ``T / Q_{j+1}``.
    """
    s_arr = np.asarray(s, dtype=float)
    cum = realization.cumulative
    if np.any(s_arr < 0) or np.any(s_arr > cum[-1]):
        raise OutOfRangeError(f"s must lie in [0, {cum[-1]}]")
    sigma = np.searchsorted(cum, s_arr, side="right") - 1
    # s == sum(Q) would index a period past the end; the last segment covers it
    sigma = np.minimum(sigma, realization.K - 1)
    phi = T * sigma + (T / realization.periods[sigma]) * (s_arr - cum[sigma])
    return phi if s_arr.ndim else float(phi)


def inverse_reparameterize(phi, realization, T):
    phi = np.asarray(phi, dtype=float)
    sigma = np.minimum(np.floor(phi / T).astype(int), realization.K - 1)
    return realization.cumulative[sigma] + (phi - T * sigma) * realization.periods[sigma] / T


def simulate_accordion(model):
    """Sample ``P(A + phi(t - A) + dx) + dy`` on the window ``[A, B]``."""
    rng = make_rng(model.seed)
    realization = draw_accordion_periods(model, rng)
    t = model.sample_times()
    a = model.window[0]
    if model.epsilon == 0:
        # exact reduction to the regular model; the warp would be the identity
        # up to rounding
        phase = t
    else:
        s = np.minimum(t - a, realization.total)
        phase = a + reparameterize(s, realization, model.T)
    dx, dy = _noise(model, rng, t.size)
    return TimeSeries(t, pulse_train(phase + dx, model.T, model.tau) + dy)


def clean_pulses(model):
    """Ground-truth ``(rise, fall)`` times of the noise-free train.

    Only pulses whose on-interval meets the window are listed.  For
    ``epsilon > 0`` the period lengths are redrawn from the model's seed, so
    they match the realization used by :func:`simulate_accordion`.
    """
    a, b = model.window
    T, tau = model.T, model.tau
    if model.epsilon == 0:
        k = np.arange(math.floor((a - tau) / T), math.floor(b / T) + 1)
        rise, fall = k * T, k * T + tau
    else:
        real = draw_accordion_periods(model)
        top = real.K * T
        k = np.arange(math.floor((a - tau) / T), math.floor((a + top) / T) + 1)
        # pulse k occupies phases [k T, k T + tau], where phase = a + phi(t - a)
        r, f = k * T - a, k * T + tau - a
        keep = (f >= 0) & (r <= top)
        r, f = r[keep], f[keep]
        rise = np.where(r < 0, a + r,
                        a + inverse_reparameterize(np.clip(r, 0, top), real, T))
        fall = a + inverse_reparameterize(np.minimum(f, top), real, T)
    keep = (fall >= a) & (rise <= b)
    return np.column_stack((rise[keep], fall[keep]))


def sampled_pulse_count(model):
    """Number of clean pulses that contain at least one sample time."""
    t = model.sample_times()
    pulses = clean_pulses(model)
    lo = np.searchsorted(t, pulses[:, 0], side="left")
    hi = np.searchsorted(t, pulses[:, 1], side="right")
    return int(np.count_nonzero(hi > lo))
