import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import hilbert

from _oracles import tone_amplitude
from audiomodem.analog import (
    AmParams,
    FmParams,
    am_demodulate,
    am_modulate,
    fm_demodulate,
    fm_modulate,
)
from audiomodem.errors import (
    DeviationExceedsNyquist,
    InvalidParameter,
    NyquistViolation,
    OvermodulationError,
    RateMismatch,
)
from audiomodem.signals import (
    Signal,
    align_by_crosscorrelation,
    generate_tone,
    power_spectral_density,
)

FS = 44100
UNIT_AM = AmParams(message_gain=1.0, output_gain=1.0)


def _rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


def sideband_ratio(s, fc, fm):
    spec = power_spectral_density(s, 4096)
    carrier = spec.band_power(fc - 50, fc + 50)
    upper = spec.band_power(fc + fm - 50, fc + fm + 50)
    lower = spec.band_power(fc - fm - 50, fc - fm + 50)
    return np.sqrt(upper / carrier), np.sqrt(lower / carrier)


class TestAmModulator:
    def test_zero_message_is_bare_carrier(self):
        s = am_modulate(Signal(np.zeros(4410), FS), UNIT_AM)
        np.testing.assert_allclose(s.samples, generate_tone(4000, 1.0, 0.0, 0.1, FS).samples, atol=1e-12)

    def test_envelope_peak(self):
        m = generate_tone(500, 1.0, 0.0, 0.1, FS)
        s = am_modulate(m, UNIT_AM)
        # at n = 0 both the message and the carrier peak
        assert np.max(np.abs(s.samples)) == pytest.approx(1.3, abs=1e-3)

    def test_output_gain_scales(self):
        m = generate_tone(500, 0.2, 0.0, 0.05, FS)
        a = am_modulate(m, AmParams())
        b = am_modulate(m, AmParams(output_gain=1.0))
        np.testing.assert_allclose(a.samples, 10 * b.samples)

    @pytest.mark.parametrize("ka", [0.1, 0.3, 0.9])
    @pytest.mark.parametrize("fm", [200, 500, 800])
    def test_sidebands(self, ka, fm):
        p = AmParams(modulation_index=ka, message_gain=1.0, output_gain=1.0)
        s = am_modulate(generate_tone(fm, 1.0, 0.0, 10.0, FS), p)
        for r in sideband_ratio(s, 4000, fm):
            assert r == pytest.approx(ka / 2, rel=0.05)

    def test_overmodulation_rejected(self):
        # default gain 3 with ka 0.3 reaches ka*m = 0.9 at unit amplitude; push past 1
        with pytest.raises(OvermodulationError):
            am_modulate(generate_tone(500, 1.2, 0.0, 0.01, FS), AmParams())

    def test_exactly_one_is_rejected(self):
        with pytest.raises(OvermodulationError):
            am_modulate(Signal([1.0], FS), AmParams(modulation_index=1.0, message_gain=1.0))

    def test_rate_mismatch(self):
        with pytest.raises(RateMismatch):
            am_modulate(Signal([0.0], 22050), AmParams())

    @pytest.mark.parametrize("kwargs", [
        {"modulation_index": 0.0}, {"modulation_index": 1.5},
        {"carrier_freq_hz": 2000.0}, {"noise_bpf_bandwidth_hz": 0.0},
    ])
    def test_invalid_params(self, kwargs):
        with pytest.raises(InvalidParameter):
            AmParams(**kwargs)

    def test_carrier_above_nyquist(self):
        with pytest.raises(NyquistViolation):
            AmParams(carrier_freq_hz=30000.0)


class TestAmDemodulator:
    @pytest.mark.parametrize("ka", [0.1, 0.3, 0.9])
    @pytest.mark.parametrize("fm", [200, 500, 800])
    def test_roundtrip(self, ka, fm):
        p = AmParams(modulation_index=ka, message_gain=1.0)
        m = generate_tone(fm, 1.0, 0.0, 1.0, FS)
        _, r = align_by_crosscorrelation(m, am_demodulate(am_modulate(m, p), p))
        assert r >= 0.95

    def test_zero_in_zero_out(self):
        assert not np.any(am_demodulate(Signal(np.zeros(2000), FS), AmParams()).samples)

    def test_pure_carrier_gives_near_silence(self):
        p = AmParams(output_gain=1.0)
        y = am_demodulate(generate_tone(4000, 1.0, 0.0, 10.0, FS), p).samples
        assert _rms(y) < 0.02

    def test_recovered_tone_amplitude(self):
        # envelope = Ac*(1 + ka*m); rectified mean scales it by 2/pi
        p = AmParams(modulation_index=0.5, message_gain=1.0, output_gain=1.0)
        m = generate_tone(200, 1.0, 0.0, 2.0, FS)
        y = am_demodulate(am_modulate(m, p), p).samples[FS // 2:]
        assert tone_amplitude(y, 200, FS) == pytest.approx(0.5 * 2 / np.pi, rel=0.05)


class TestFmModulator:
    def test_zero_message_is_carrier(self):
        s = fm_modulate(Signal(np.zeros(4410), FS), FmParams(output_gain=1.0))
        np.testing.assert_allclose(s.samples, generate_tone(4000, 1.0, 0.0, 0.1, FS).samples, atol=1e-9)

    @pytest.mark.parametrize("level,kf", [(400.0, 2.5), (-400.0, 2.5), (100.0, 10.0), (3.0, 300.0)])
    def test_constant_message_peak(self, level, kf):
        p = FmParams(freq_sensitivity_hz_per_volt=kf, output_gain=1.0)
        s = fm_modulate(Signal(np.full(FS, level), FS), p, preemphasis_enabled=False)
        spec = power_spectral_density(s, 4096)
        assert abs(spec.peak_frequency() - (4000 + kf * level)) <= spec.bin_hz

    def test_amplitude_bound(self):
        p = FmParams()
        s = fm_modulate(generate_tone(300, 50.0, 0.0, 0.2, FS), p)
        assert np.max(np.abs(s.samples)) <= p.output_gain * p.carrier_amplitude + 1e-12

    @settings(max_examples=30, deadline=None)
    @given(
        freq=st.floats(50, 1200),
        share=st.floats(0.001, 1.0),
        kf=st.sampled_from([1.0, 2.5, 10.0, 50.0]),
        emphasis=st.booleans(),
    )
    def test_constant_envelope(self, freq, share, kf, emphasis):
        # the Hilbert envelope is a faithful measurement only while the Carson
        # band fc +/- (deviation + 2 fm) stays clear of DC
        amp = share * (2500 - 2 * freq) / kf
        p = FmParams(freq_sensitivity_hz_per_volt=kf, output_gain=1.0)
        s = fm_modulate(generate_tone(freq, amp, 0.0, 0.25, FS), p, preemphasis_enabled=emphasis).samples
        assert np.max(np.abs(s)) <= 1.0 + 1e-9
        env = np.abs(hilbert(s))[2000:-2000]
        assert np.max(np.abs(env - 1.0)) < 0.01

    def test_bandwidth_grows_with_sensitivity(self):
        m = generate_tone(200, 20.0, 0.0, 2.0, FS)
        widths = []
        for kf in (1.0, 2.5, 10.0, 50.0):
            s = fm_modulate(m, FmParams(freq_sensitivity_hz_per_volt=kf), preemphasis_enabled=False)
            widths.append(power_spectral_density(s, 4096).occupied_bandwidth(0.99))
        assert widths == sorted(widths)

    def test_deviation_past_nyquist(self):
        with pytest.raises(DeviationExceedsNyquist):
            fm_modulate(Signal(np.full(100, 10000.0), FS), FmParams(), preemphasis_enabled=False)

    def test_rejects_nonpositive_sensitivity(self):
        with pytest.raises(InvalidParameter):
            FmParams(freq_sensitivity_hz_per_volt=0.0)


class TestFmDemodulator:
    @pytest.mark.parametrize("deemphasis", [True, False])
    def test_roundtrip(self, deemphasis):
        p = FmParams(freq_sensitivity_hz_per_volt=500.0)
        m = generate_tone(200, 1.0, 0.0, 1.0, FS)
        y = fm_demodulate(fm_modulate(m, p, preemphasis_enabled=False), p, deemphasis_enabled=deemphasis)
        _, r = align_by_crosscorrelation(m, y)
        assert r >= 0.9

    def test_output_peak(self):
        p = FmParams(freq_sensitivity_hz_per_volt=500.0)
        y = fm_demodulate(fm_modulate(generate_tone(200, 1.0, 0.0, 0.5, FS), p), p)
        assert np.max(np.abs(y.samples)) == pytest.approx(0.9)

    def test_zero_in_zero_out(self):
        assert not np.any(fm_demodulate(Signal(np.zeros(2000), FS), FmParams()).samples)

    def test_pure_carrier_gives_near_silence(self):
        y = fm_demodulate(generate_tone(4000, 1.0, 0.0, 10.0, FS), FmParams()).samples
        assert _rms(y) < 0.02
