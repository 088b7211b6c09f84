import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdapulse import (
    InvalidParameterError,
    OutOfRangeError,
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
from tdapulse.signal_model import AccordionRealization, inverse_reparameterize


def realization(q):
    q = np.asarray(q, dtype=float)
    return AccordionRealization(q, np.concatenate(([0.0], np.cumsum(q))))


def enumerated_level(t, T, tau, span=20):
    # 1 iff t lies in some [kT, kT + tau], scanning k directly
    return int(any(k * T <= t <= k * T + tau for k in range(-span, span)))


class TestPulseTrain:
    def test_on(self):
        assert pulse_train(0.3, 2, 0.5) == 1

    def test_off(self):
        assert pulse_train(1.0, 2, 0.5) == 0

    def test_negative_time_wraps(self):
        assert pulse_train(-0.1, 2, 0.5) == 0
        assert enumerated_level(-0.1, 2, 0.5) == 0

    @given(st.floats(-30, 30, allow_nan=False))
    def test_matches_enumeration(self, t):
        T, tau = 2.0, 0.5
        phase = math.fmod(t, T) % T
        # skip points within rounding of an edge
        if min(abs(phase), abs(phase - tau), abs(phase - T)) < 1e-9:
            return
        assert pulse_train(t, T, tau) == enumerated_level(t, T, tau)

    def test_array_shape(self):
        out = pulse_train(np.array([[0.0, 1.0], [2.1, 3.0]]), 2, 0.5)
        assert out.shape == (2, 2)
        assert out.tolist() == [[1, 0], [1, 0]]

    @pytest.mark.parametrize("T,tau", [(0, 0.1), (-1, 0.1), (2, 0), (2, 2), (2, 3)])
    def test_invalid(self, T, tau):
        with pytest.raises(InvalidParameterError):
            pulse_train(0.0, T, tau)


class TestPulseModel:
    @pytest.mark.parametrize("kw", [
        dict(T=2, tau=1.0),           # duty 0.5
        dict(T=2, tau=0.5, alpha=0.6),
        dict(T=2, tau=0.5, beta=0.5),
        dict(T=2, tau=0.5, epsilon=1.5),
        dict(T=2, tau=0.5, dt=0),
        dict(T=2, tau=0.5, window=(1, 1)),
        dict(T=2, tau=0.5, seed=-1),
        dict(T=2, tau=0.5, seed=2**64),
    ])
    def test_rejects(self, kw):
        with pytest.raises(InvalidParameterError):
            PulseModel(**kw)

    def test_table_defaults(self):
        m = PulseModel.from_rpm(600)
        assert m.T == pytest.approx(0.1)
        assert m.duty == pytest.approx(0.05)
        assert m.dt == pytest.approx(m.T / 32)
        assert len(m.sample_times()) == 32 * 32 + 1

    def test_dict_round_trip(self):
        m = PulseModel(T=2, tau=0.5, alpha=0.1, epsilon=0.2, window=(1, 9), dt=0.01, seed=7)
        assert PulseModel.from_dict(m.to_dict()) == m

    def test_sample_times_include_both_ends(self):
        t = PulseModel(T=2, tau=0.5, window=(0, 6.4), dt=0.05).sample_times()
        assert t[0] == 0 and t[-1] == pytest.approx(6.4) and t.size == 129


class TestTimeSeries:
    def test_rejects_non_increasing(self):
        with pytest.raises(InvalidParameterError):
            TimeSeries([0, 1, 1], [0, 0, 0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(InvalidParameterError):
            TimeSeries([0, 1], [0])

    def test_transforms(self):
        ts = TimeSeries([0, 1, 2], [0, 1, 0])
        assert ts.shifted(5).times.tolist() == [5, 6, 7]
        assert ts.scaled(2).times.tolist() == [0, 2, 4]
        assert ts.inverted().values.tolist() == [1, 0, 1]


class TestSimulateSimple:
    def test_noise_free_is_clean_train(self):
        m = PulseModel(T=2, tau=0.5, window=(0, 6.4), dt=0.05)
        ts = simulate_simple(m)
        assert set(np.unique(ts.values)) <= {0.0, 1.0}
        np.testing.assert_array_equal(ts.values, pulse_train(ts.times, 2, 0.5))

    def test_deterministic(self):
        m = PulseModel(T=2, tau=0.5, alpha=0.2, beta=0.1, window=(0, 6.4), dt=0.05, seed=48824)
        a, b = simulate_simple(m), simulate_simple(m)
        assert a.values.tobytes() == b.values.tobytes()

    def test_seed_changes_output(self):
        m = PulseModel(T=2, tau=0.5, alpha=0.4, beta=0.1, window=(0, 6.4), dt=0.01)
        assert not np.array_equal(simulate_simple(m).values,
                                  simulate_simple(m.with_seed(1)).values)

    def test_noise_bounds_and_edge_mask(self):
        m = PulseModel(T=2, tau=0.5, alpha=0.05, beta=0.05, window=(0, 6.4), dt=0.005, seed=3)
        ts = simulate_simple(m)
        clean = pulse_train(ts.times, 2, 0.5)
        nearest_level = np.round(ts.values)
        assert np.all(np.abs(ts.values - nearest_level) <= 0.05)
        # distance to the nearest rising (phase 0) or falling (phase tau) edge
        phase = np.mod(ts.times, 2)
        edge_dist = np.minimum.reduce([phase, np.abs(phase - 0.5), 2 - phase])
        far = edge_dist > 0.025
        assert np.all(np.abs(ts.values[far] - clean[far]) <= 0.05)
        assert far.sum() > 0.9 * far.size

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32), st.floats(0, 0.45))
    def test_threshold_separates_levels(self, seed, beta):
        m = PulseModel(T=1, tau=0.2, alpha=0.3, beta=beta, window=(0, 5), dt=0.01, seed=seed)
        ts = simulate_simple(m)
        binary = ts.values > 0.5
        assert np.array_equal(binary, np.round(ts.values) == 1)


class TestAccordionPeriods:
    def test_no_spacing_noise(self):
        m = PulseModel(T=2, tau=0.5, window=(0, 10))
        real = draw_accordion_periods(m)
        assert real.periods.tolist() == [2, 2, 2, 2, 2] and real.K == 5

    @settings(max_examples=40)
    @given(st.integers(0, 2**32))
    def test_support_bound(self, seed):
        m = PulseModel(T=2, tau=0.5, epsilon=0.5, window=(0, 50), seed=seed)
        q = draw_accordion_periods(m).periods
        assert np.all((q >= 1) & (q <= 3))

    @settings(max_examples=60)
    @given(st.integers(0, 2**32))
    def test_minimal_cover(self, seed):
        m = PulseModel(T=2, tau=0.5, epsilon=0.25, window=(0, 7), seed=seed)
        real = draw_accordion_periods(m)
        assert real.K in (3, 4, 5)
        total = float(np.sum(real.periods))
        assert total >= 7 and total - real.periods[-1] < 7
        assert real.total == pytest.approx(total)


class TestReparameterize:
    def test_identity_without_noise(self):
        real = realization([2, 2, 2, 2])
        s = np.linspace(0, 8, 33)
        np.testing.assert_allclose(reparameterize(s, real, 2), s)

    def test_hand_values(self):
        real = realization([1, 3])
        assert reparameterize(0.5, real, 2) == pytest.approx(1.0)
        assert reparameterize(2.5, real, 2) == pytest.approx(3.0)

    def test_out_of_range(self):
        real = realization([1, 3])
        with pytest.raises(OutOfRangeError):
            reparameterize(-0.1, real, 2)
        with pytest.raises(OutOfRangeError):
            reparameterize(4.1, real, 2)

    @settings(max_examples=50)
    @given(st.lists(st.floats(0.3, 3.0), min_size=1, max_size=12))
    def test_monotone_and_breakpoints(self, q):
        real = realization(q)
        T = 1.3
        s = np.linspace(0, real.total, 400)
        phi = reparameterize(s, real, T)
        assert phi[0] == 0 and np.all(np.diff(phi) > 0)
        np.testing.assert_allclose(reparameterize(real.cumulative, real, T),
                                   T * np.arange(real.K + 1), atol=1e-9)
        np.testing.assert_allclose(inverse_reparameterize(phi, real, T), s, atol=1e-9)


class TestSimulateAccordion:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32), st.floats(0, 0.5), st.floats(0, 0.45))
    def test_reduces_to_simple(self, seed, alpha, beta):
        m = PulseModel(T=1, tau=0.1, alpha=alpha, beta=beta, window=(0.3, 8), dt=0.01, seed=seed)
        assert simulate_accordion(m).values.tobytes() == simulate_simple(m).values.tobytes()

    def test_edges_follow_periods(self):
        m = PulseModel(T=2, tau=0.5, epsilon=0.25, window=(0, 30), dt=0.001, seed=11)
        real = draw_accordion_periods(m)
        pulses = clean_pulses(m)
        n = min(len(pulses), real.K)
        np.testing.assert_allclose(pulses[:n, 0], real.cumulative[:n], atol=1e-9)
        widths = pulses[:n, 1] - pulses[:n, 0]
        np.testing.assert_allclose(widths, 0.5 * real.periods[:n] / 2, atol=1e-9)
        # the sampled series switches on at the listed rising edges
        ts = simulate_accordion(m)
        on = ts.times[ts.values > 0.5]
        starts = on[np.concatenate(([True], np.diff(on) > 1.5 * m.dt))]
        np.testing.assert_allclose(starts[:n], pulses[:n, 0], atol=m.dt)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32))
    def test_rise_spacing_support(self, seed):
        m = PulseModel(T=2, tau=0.5, epsilon=0.65, window=(0, 60), dt=0.01, seed=seed)
        rises = clean_pulses(m)[:, 0]
        gaps = np.diff(rises)
        assert np.all((gaps >= 0.7 - 1e-9) & (gaps <= 3.3 + 1e-9))

    def test_deterministic(self):
        m = PulseModel(T=2, tau=0.5, alpha=0.2, epsilon=0.3, window=(0, 30), dt=0.01, seed=48824)
        assert simulate_accordion(m).values.tobytes() == simulate_accordion(m).values.tobytes()


def test_sampled_pulse_count_clean_example():
    m = PulseModel(T=2, tau=0.5, window=(0, 6.4), dt=0.05)
    assert sampled_pulse_count(m) == 4
    assert clean_pulses(m)[:, 0].tolist() == [0, 2, 4, 6]
