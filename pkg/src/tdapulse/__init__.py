"""Pulse counting and RPM estimation from 0-dimensional persistence."""

__version__ = "0.1.0"

from .errors import (
    EmptyInputError,
    EmptySupportError,
    InsufficientStructureError,
    InvalidParameterError,
    NonUniformSamplingError,
    NoPeakError,
    NoSplitError,
    OutOfRangeError,
    ParseError,
    PulseError,
)
from .harness import SweepConfig, SweepResult, bench_runtime, bootstrap_band, relative_error, run_sweep
from .image import ImageGrid, image_pulse_count, product_image
from .io import load_recording, load_signal, read_series, write_series
from .persistence import (
    PersistenceDiagram,
    SupportSet,
    bottleneck,
    diagram_1d,
    diagram_point_cloud,
    extract_support,
    hausdorff,
    mst_weights,
)
from .signal_model import (
    PulseModel,
    TimeSeries,
    clean_pulses,
    draw_accordion_periods,
    pulse_train,
    reparameterize,
    sampled_pulse_count,
    simulate_accordion,
    simulate_simple,
)
from .spectral import one_sided_spectrum, rpm_fourier
from .step_detect import PulseCount, RpmEstimate, count_from_series, count_pulses, rpm_persistence, split_threshold
