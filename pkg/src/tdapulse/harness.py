"""Monte-Carlo robustness sweeps and runtime benchmarks.

Seeding: cells of a sweep grid are visited row-major (noise level is the row,
nominal speed the column) and replicates innermost, and the replicate with
global index ``g`` uses seed ``base_seed + g``.  A replicate's seed is
therefore a pure function of its position, so cells can be processed in any
order or in parallel without changing the result.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import InvalidParameterError, PulseError
from .signal_model import DEFAULT_SEED, PulseModel, make_rng, simulate_accordion
from .spectral import rpm_fourier
from .step_detect import DEFAULT_RHO_MIN, rpm_persistence

log = logging.getLogger(__name__)

PLANES = ("alpha", "epsilon")
METHODS = ("persistence", "fourier")

HEATMAP_COLUMNS = ["omega0", "noise_param", "err_persistence", "err_fourier",
                   "band_lo_p", "band_hi_p", "band_lo_f", "band_hi_f",
                   "failures_p", "failures_f"]
RUNTIME_COLUMNS = ["omega0", "n_samples", "method", "mean_s", "band_lo_s", "band_hi_s"]


@dataclass(frozen=True)
class SweepConfig:
    omega_range: tuple = (30.0, 24000.0)
    alpha_range: tuple = (0.0, 0.5)
    epsilon_range: tuple = (0.02, 0.65)
    grid: tuple = (12, 12)  # (noise levels, nominal speeds)
    replicates: int = 25
    base_seed: int = DEFAULT_SEED
    n_periods: int = 32
    oversample: int = 32
    duty: float = 0.05
    beta: float = 0.0
    alpha_fixed: float = 0.10  # ringing used on the epsilon plane
    epsilon_fixed: float = 0.0  # spacing noise used on the alpha plane
    w: float = 3.0
    rho_min: float = DEFAULT_RHO_MIN
    band_level: float = 0.68
    bootstrap_resamples: int = 1000
    workers: int = 1

    def __post_init__(self):
        for name in ("omega_range", "alpha_range", "epsilon_range", "grid"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        lo, hi = self.omega_range
        if not 0 < lo <= hi:
            raise InvalidParameterError("omega_range must be positive and ordered")
        if not 0 <= self.alpha_range[0] <= self.alpha_range[1] <= 0.5:
            raise InvalidParameterError("alpha_range must lie within [0, 0.5]")
        if not 0 <= self.epsilon_range[0] <= self.epsilon_range[1] <= 1:
            raise InvalidParameterError("epsilon_range must lie within [0, 1]")
        if min(self.grid) < 1 or len(self.grid) != 2:
            raise InvalidParameterError("grid must be (rows, cols) with both >= 1")
        if self.replicates < 1:
            raise InvalidParameterError("replicates must be >= 1")

    def omega_values(self):
        return np.linspace(*self.omega_range, self.grid[1])

    def noise_values(self, plane):
        rng_ = self.alpha_range if plane == "alpha" else self.epsilon_range
        return np.linspace(*rng_, self.grid[0])

    def model(self, omega0, plane, noise, seed):
        alpha, eps = (noise, self.epsilon_fixed) if plane == "alpha" else (self.alpha_fixed, noise)
        return PulseModel.from_rpm(omega0, duty=self.duty, alpha=alpha, beta=self.beta,
                                   epsilon=eps, n_periods=self.n_periods,
                                   oversample=self.oversample, seed=seed)

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d):
        known = cls.__dataclass_fields__
        unknown = set(d) - set(known)
        if unknown:
            raise InvalidParameterError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class CellResult:
    omega0: float
    noise: float
    mean_p: float
    mean_f: float
    err_p: float
    err_f: float
    band_p: tuple
    band_f: tuple
    runtime_p: float
    runtime_f: float
    failures_p: int
    failures_f: int
    estimates_p: np.ndarray = field(repr=False, default=None)
    estimates_f: np.ndarray = field(repr=False, default=None)

    def row(self):
        return [self.omega0, self.noise, self.err_p, self.err_f,
                self.band_p[0], self.band_p[1], self.band_f[0], self.band_f[1],
                self.failures_p, self.failures_f]


@dataclass
class SweepResult:
    plane: str
    config: SweepConfig
    cells: list

    def to_csv(self, fh=None):
        """Write the heatmap table; returns the text when ``fh`` is None."""
        out = fh if fh is not None else io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(HEATMAP_COLUMNS)
        for cell in self.cells:
            writer.writerow([_fmt(v) for v in cell.row()])
        if fh is None:
            return out.getvalue()

    def errors(self, method="persistence"):
        """Relative errors as a (noise rows, omega cols) array."""
        attr = "err_p" if method == "persistence" else "err_f"
        rows, cols = len(self.noise_values()), len(self.omega_values())
        return np.array([getattr(c, attr) for c in self.cells]).reshape(rows, cols)

    def noise_values(self):
        return sorted({c.noise for c in self.cells})

    def omega_values(self):
        return sorted({c.omega0 for c in self.cells})


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def relative_error(estimate, nominal):
    if not nominal > 0:
        raise InvalidParameterError("nominal value must be positive")
    return abs(estimate - nominal) / nominal


def bootstrap_band(samples, level=0.68, resamples=1000, seed=DEFAULT_SEED):
    """Percentile bootstrap band for the sample mean.

    Resamples with replacement and returns the ``(1 - level)/2`` and
    ``(1 + level)/2`` quantiles of the resampled means.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InvalidParameterError("bootstrap needs at least 2 samples")
    if not 0 < level < 1:
        raise InvalidParameterError("level must lie in (0, 1)")
    if np.all(x == x[0]):
        return float(x[0]), float(x[0])
    rng = make_rng(seed)
    idx = rng.integers(0, x.size, size=(resamples, x.size))
    means = x[idx].mean(axis=1)
    lo, hi = np.quantile(means, [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    try:
        return fn(*args, **kwargs), time.perf_counter() - t0
    except PulseError:
        return None, time.perf_counter() - t0


def _summarize(values, omega0, level, resamples, seed):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("nan"), float("nan"), (float("nan"), float("nan"))
    mean = float(values.mean())
    if values.size >= 2:
        band = bootstrap_band(values, level, resamples, seed)
    else:
        band = (mean, mean)
    return mean, relative_error(mean, omega0), band


def run_cell(config, plane, cell_index, noise, omega0):
    """Simulate and estimate every replicate of one grid cell."""
    est_p, est_f, t_p, t_f = [], [], [], []
    first = config.base_seed + cell_index * config.replicates
    for r in range(config.replicates):
        ts = simulate_accordion(config.model(omega0, plane, noise, first + r))
        res, dt = _timed(rpm_persistence, ts, rho_min=config.rho_min)
        t_p.append(dt)
        if res is not None:
            est_p.append(res.omega)
        res, dt = _timed(rpm_fourier, ts, w=config.w)
        t_f.append(dt)
        if res is not None:
            est_f.append(res.omega)
    # band seeds live above every replicate seed of the grid
    band_seed = config.base_seed + int(np.prod(config.grid)) * config.replicates + 2 * cell_index
    mean_p, err_p, band_p = _summarize(est_p, omega0, config.band_level,
                                       config.bootstrap_resamples, band_seed)
    mean_f, err_f, band_f = _summarize(est_f, omega0, config.band_level,
                                       config.bootstrap_resamples, band_seed + 1)
    return CellResult(omega0=float(omega0), noise=float(noise),
                      mean_p=mean_p, mean_f=mean_f, err_p=err_p, err_f=err_f,
                      band_p=band_p, band_f=band_f,
                      runtime_p=float(np.mean(t_p)), runtime_f=float(np.mean(t_f)),
                      failures_p=config.replicates - len(est_p),
                      failures_f=config.replicates - len(est_f),
                      estimates_p=np.asarray(est_p), estimates_f=np.asarray(est_f))


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(config, plane, omegas=None, noise_values=None):
    """Relative error of both estimators over a (noise, nominal speed) grid.

    ``omegas`` / ``noise_values`` override the grid axes, e.g. to trace the
    estimate against the noise level at a few fixed speeds.
    """
    if plane not in PLANES:
        raise InvalidParameterError(f"plane must be one of {PLANES}")
    omegas = config.omega_values() if omegas is None else np.asarray(omegas, dtype=float)
    noises = config.noise_values(plane) if noise_values is None else np.asarray(noise_values, dtype=float)
    if omegas.size != config.grid[1] or noises.size != config.grid[0]:
        config = replace(config, grid=(noises.size, omegas.size))
    jobs = [(config, plane, r * omegas.size + c, noise, omega)
            for r, noise in enumerate(noises) for c, omega in enumerate(omegas)]
    log.info("sweep %s: %d cells x %d replicates", plane, len(jobs), config.replicates)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            cells = list(pool.map(_run_cell_args, jobs, chunksize=4))
    else:
        cells = [run_cell(*job) for job in jobs]
    return SweepResult(plane=plane, config=config, cells=cells)


@dataclass
class BenchRow:
    omega0: float
    n_samples: int
    method: str
    mean_s: float
    band: tuple
    timings: np.ndarray = field(repr=False)

    @property
    def median_s(self):
        return float(np.median(self.timings))

    def row(self):
        return [self.omega0, self.n_samples, self.method, self.mean_s, self.band[0], self.band[1]]


def bench_model(config, omega0, n_samples, seed):
    """Table-1 style model stretched to exactly ``n_samples`` samples."""
    if n_samples < 4:
        raise InvalidParameterError("benchmark signals need at least 4 samples")
    base = PulseModel.from_rpm(omega0, duty=config.duty, alpha=config.alpha_fixed,
                               beta=config.beta, n_periods=config.n_periods,
                               oversample=config.oversample, seed=seed)
    return replace(base, window=(0.0, (n_samples - 1) * base.dt))


_ESTIMATORS = {
    "persistence": lambda ts, cfg: rpm_persistence(ts, rho_min=cfg.rho_min),
    "fourier": lambda ts, cfg: rpm_fourier(ts, w=cfg.w),
}


def bench_runtime(config, methods=METHODS, omegas=None, n_samples=None, runs=200,
                  distinct_signals=5):
    """Time the estimators (not the simulation) with ``time.perf_counter``.

    For every nominal speed and signal length, ``runs`` timed calls per method
    cycle over ``distinct_signals`` simulated signals.  Runs are interleaved
    round-robin over lengths and methods, so a transient slowdown of the host
    lands on every configuration instead of skewing one of them.  The default
    length is the sweep's ``n_periods * oversample + 1`` samples.
    """
    unknown = set(methods) - set(_ESTIMATORS)
    if unknown:
        raise InvalidParameterError(f"unknown methods: {sorted(unknown)}")
    if runs < 1:
        raise InvalidParameterError("runs must be >= 1")
    omegas = config.omega_values() if omegas is None else omegas
    if n_samples is None:
        n_samples = [config.n_periods * config.oversample + 1]
    if any(n < 4 for n in n_samples):
        raise InvalidParameterError("benchmark signals need at least 4 samples")
    rows = []
    seed = config.base_seed
    for omega0 in omegas:
        signals = {}
        for n in n_samples:
            signals[n] = []
            for _ in range(min(runs, distinct_signals)):
                signals[n].append(simulate_accordion(bench_model(config, omega0, n, seed)))
                seed += 1
        timings = {(n, m): np.empty(runs) for n in n_samples for m in methods}
        for i in range(runs):
            for n in n_samples:
                ts = signals[n][i % len(signals[n])]
                for method in methods:
                    fn = _ESTIMATORS[method]
                    t0 = time.perf_counter()
                    fn(ts, config)
                    timings[n, method][i] = time.perf_counter() - t0
        for n in n_samples:
            for method in methods:
                t = timings[n, method]
                band = (bootstrap_band(t, config.band_level, config.bootstrap_resamples, seed)
                        if runs >= 2 else (t[0], t[0]))
                rows.append(BenchRow(float(omega0), int(n), method, float(t.mean()), band, t))
    return rows


def doubling_ratios(rows, method):
    """Median-time ratios between consecutive signal lengths for one method."""
    picked = sorted((r for r in rows if r.method == method), key=lambda r: r.n_samples)
    return [b.median_s / a.median_s for a, b in zip(picked, picked[1:])]


def runtime_csv(rows, fh=None):
    out = fh if fh is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RUNTIME_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(r.omega0), str(r.n_samples), r.method,
                         _fmt(r.mean_s), _fmt(r.band[0]), _fmt(r.band[1])])
    if fh is None:
        return out.getvalue()
