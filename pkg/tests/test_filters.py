import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import butterworth_magnitude, db, impulse_settle_index, tone_amplitude
from audiomodem.errors import FrequencyOutOfRange, InvalidCutoff, InvalidOrder, RateMismatch
from audiomodem.filters import (
    FilterKind,
    FilterSpec,
    apply_filter,
    design_butterworth,
    frequency_response,
)
from audiomodem.signals import Signal, generate_tone

FS = 44100

# every filter stage named by the AM, FM, BFSK and QAM receivers/transmitters
MODEM_STAGES = {
    "am-noise-bpf": FilterSpec.bandpass_around(4000, 3000, FS),
    "am-envelope-lpf": FilterSpec.lowpass(1000, FS),
    "fm-noise-bpf": FilterSpec.bandpass_around(4000, 2000, FS),
    "fm-envelope-lpf": FilterSpec.lowpass(500, FS),
    "fm-deemphasis-lpf": FilterSpec.lowpass(750, FS),
    "fm-preemphasis-hpf": FilterSpec.highpass(750, FS),
    "fm-dc-removal-hpf": FilterSpec.highpass(1000, FS),
    "bfsk-zero-bpf": FilterSpec.bandpass_around(4000, 400, FS),
    "bfsk-one-bpf": FilterSpec.bandpass_around(6000, 400, FS),
}


def _impulse(filt, n):
    x = np.zeros(n)
    x[0] = 1.0
    return apply_filter(filt, Signal(x, FS)).samples


def _oracle(spec, f):
    return butterworth_magnitude(spec.kind.value, spec.order, spec.sample_rate_hz, f,
                                 low=spec.cutoff_low_hz, high=spec.cutoff_high_hz)


class TestSpec:
    @pytest.mark.parametrize("order", [0, 13, 2.5])
    def test_order_bounds(self, order):
        with pytest.raises(InvalidOrder):
            FilterSpec.lowpass(1000, FS, order)

    @pytest.mark.parametrize("cutoff", [0, -5, 22050, 30000])
    def test_cutoff_bounds(self, cutoff):
        with pytest.raises(InvalidCutoff):
            FilterSpec.lowpass(cutoff, FS)

    def test_band_edges_ordered(self):
        with pytest.raises(InvalidCutoff):
            FilterSpec.bandpass(5000, 4000, FS)

    def test_bandwidth_maps_to_edges(self):
        spec = FilterSpec.bandpass_around(4000, 400, FS)
        assert spec.cutoffs == (3800, 4200)


class TestDesign:
    def test_lowpass_cutoff_and_dc(self):
        f = design_butterworth(FilterSpec.lowpass(1000, FS, 4))
        assert db(frequency_response(f, 1000)) == pytest.approx(-3.0103, abs=0.1)
        assert db(frequency_response(f, 0)) == pytest.approx(0.0, abs=0.01)

    def test_highpass_limits(self):
        f = design_butterworth(FilterSpec.highpass(750, FS, 2))
        assert frequency_response(f, 0) < 10 ** (-60 / 20)
        assert db(frequency_response(f, 20000)) > -0.1

    def test_bandpass_centre_and_skirts(self):
        spec = FilterSpec.bandpass(3800, 4200, FS, 2)
        f = design_butterworth(spec)
        assert db(frequency_response(f, spec.passband_reference_hz)) == pytest.approx(0.0, abs=0.2)
        assert db(frequency_response(f, 4000)) == pytest.approx(0.0, abs=0.2)
        assert db(frequency_response(f, 2000)) < -20
        assert db(frequency_response(f, 8000)) < -20

    def test_bandpass_realizes_twice_the_prototype_order(self):
        f = design_butterworth(FilterSpec.bandpass(3800, 4200, FS, 3))
        assert len(f.poles()) == 6

    @pytest.mark.parametrize("name", sorted(MODEM_STAGES))
    def test_matches_analytic_magnitude(self, name):
        spec = MODEM_STAGES[name]
        filt = design_butterworth(spec)
        for f in np.linspace(0, FS / 2, 301)[1:-1]:
            assert frequency_response(filt, f) == pytest.approx(_oracle(spec, f), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(
        kind=st.sampled_from(list(FilterKind)),
        order=st.integers(1, 12),
        a=st.floats(50, 20000),
        b=st.floats(50, 20000),
    )
    def test_cutoff_is_half_power_and_stable(self, kind, order, a, b):
        lo, hi = sorted((a, b))
        if kind is FilterKind.BANDPASS:
            if hi - lo < 20:
                return
            spec = FilterSpec.bandpass(lo, hi, FS, order)
        else:
            spec = FilterSpec(kind, order, hi, FS)
        filt = design_butterworth(spec)
        assert filt.is_stable()
        for c in spec.cutoffs:
            assert frequency_response(filt, c) == pytest.approx(2 ** -0.5, abs=0.012)
        assert frequency_response(filt, spec.passband_reference_hz) == pytest.approx(1.0, abs=0.012)


class TestFrequencyResponse:
    def test_range(self):
        f = design_butterworth(FilterSpec.lowpass(1000, FS))
        with pytest.raises(FrequencyOutOfRange):
            frequency_response(f, -1)
        with pytest.raises(FrequencyOutOfRange):
            frequency_response(f, FS / 2 + 1)

    @pytest.mark.parametrize("cutoff", [500, 750, 1000, 2000, 5000])
    def test_monotone_above_cutoff(self, cutoff):
        f = design_butterworth(FilterSpec.lowpass(cutoff, FS))
        mags = frequency_response(f, np.geomspace(cutoff, FS / 2, 50))
        assert np.all(np.diff(mags) <= 1e-15)


class TestApply:
    def test_zero_in_zero_out(self):
        for spec in MODEM_STAGES.values():
            out = apply_filter(design_butterworth(spec), Signal(np.zeros(1000), FS))
            assert not np.any(out.samples)

    def test_lowpass_rejects_two_octaves_up(self):
        f = design_butterworth(FilterSpec.lowpass(1000, FS))
        y = apply_filter(f, generate_tone(4000, 1.0, 0.0, 0.5, FS)).samples[4096:]
        assert np.max(np.abs(y)) < 0.1

    def test_lowpass_passes_dc(self):
        f = design_butterworth(FilterSpec.lowpass(1000, FS))
        y = apply_filter(f, Signal(np.ones(8192), FS)).samples[4096:]
        np.testing.assert_allclose(y, 1.0, atol=0.01)

    def test_rate_mismatch(self):
        f = design_butterworth(FilterSpec.lowpass(1000, FS))
        with pytest.raises(RateMismatch):
            apply_filter(f, Signal(np.zeros(10), 22050))

    def test_causal(self):
        f = design_butterworth(FilterSpec.bandpass_around(4000, 400, FS))
        x = np.zeros(500)
        x[200:] = np.random.default_rng(0).normal(size=300)
        assert not np.any(apply_filter(f, Signal(x, FS)).samples[:200])

    @pytest.mark.parametrize("name", sorted(MODEM_STAGES))
    def test_linearity(self, name):
        f = design_butterworth(MODEM_STAGES[name])
        rng = np.random.default_rng(5)
        x, y = rng.normal(size=4000), rng.normal(size=4000)
        a, b = 1.7, -0.4
        lhs = apply_filter(f, Signal(a * x + b * y, FS)).samples
        rhs = a * apply_filter(f, Signal(x, FS)).samples + b * apply_filter(f, Signal(y, FS)).samples
        assert np.sqrt(np.mean((lhs - rhs) ** 2)) < 1e-9

    @pytest.mark.parametrize("name", sorted(MODEM_STAGES))
    @pytest.mark.parametrize("tone", [300, 900, 2700, 4000, 6000])
    def test_steady_state_gain_matches_response(self, name, tone):
        f = design_butterworth(MODEM_STAGES[name])
        expected = frequency_response(f, tone)
        y = apply_filter(f, generate_tone(tone, 1.0, 0.0, 0.5, FS)).samples[8192:]
        assert tone_amplitude(y, tone, FS) == pytest.approx(expected, rel=0.01, abs=1e-6)


def _decay_horizon(spec):
    """``5 * fs / cutoff``; a band-pass uses its half-bandwidth (equivalent low-pass cutoff)."""
    if spec.kind is FilterKind.BANDPASS:
        c = (spec.cutoff_high_hz - spec.cutoff_low_hz) / 2
    else:
        c = spec.cutoff_high_hz
    return 5 * FS / c


_WIDE_BPF = pytest.mark.xfail(
    strict=True,
    reason="order-4 wide band-pass keeps a pole pair near the unit circle; decay is "
           "slower than 5*fs/(bandwidth/2) (measured 217 vs 147 and 269 vs 220 samples)",
)


@pytest.mark.parametrize("name", [
    pytest.param(n, marks=_WIDE_BPF) if n in ("am-noise-bpf", "fm-noise-bpf") else n
    for n in sorted(MODEM_STAGES)
])
def test_impulse_decays_within_horizon(name):
    spec = MODEM_STAGES[name]
    h = _impulse(design_butterworth(spec), FS)
    assert impulse_settle_index(h) <= _decay_horizon(spec)


@pytest.mark.xfail(
    strict=True,
    reason="a high-pass and a low-pass at the same cutoff each give 1/sqrt(2) there, "
           "so the cascade is at least 6 dB down; a 3 dB bound cannot hold",
)
def test_emphasis_pair_within_3db_below_1khz():
    pre = design_butterworth(FilterSpec.highpass(750, FS))
    de = design_butterworth(FilterSpec.lowpass(750, FS))
    for f in np.linspace(20, 1000, 50):
        assert db(frequency_response(pre, f) * frequency_response(de, f)) > -3.0
