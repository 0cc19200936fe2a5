"""AM and FM transmitter/receiver chains.

Each chain applies its stages in a fixed order; every constant lives in a
parameter record so it can be overridden without touching the chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import filters
from .errors import (
    DeviationExceedsNyquist,
    InvalidParameter,
    NyquistViolation,
    OvermodulationError,
    RateMismatch,
)
from .filters import DEFAULT_ORDER
from .signals import (
    Signal,
    differentiate,
    normalize_peak,
    rectify_fullwave,
    remove_mean,
    scale,
    trapezoidal_integrate,
)

DEMOD_PEAK = 0.9


def _check_nyquist(name: str, freq_hz: float, sample_rate_hz: float) -> None:
    if not 0 < freq_hz < sample_rate_hz / 2:
        raise NyquistViolation(f"{name}={freq_hz} Hz must lie in (0, {sample_rate_hz / 2}) Hz")


def _check_rate(x: Signal, sample_rate_hz: float) -> None:
    if x.sample_rate_hz != sample_rate_hz:
        raise RateMismatch(f"signal is {x.sample_rate_hz} Hz, parameters expect {sample_rate_hz} Hz")


@dataclass(frozen=True)
class AmParams:
    carrier_freq_hz: float = 4000.0
    carrier_amplitude: float = 1.0
    modulation_index: float = 0.3
    message_bandwidth_hz: float = 1500.0
    message_gain: float = 3.0
    output_gain: float = 10.0
    noise_bpf_bandwidth_hz: float = 3000.0
    envelope_lpf_cutoff_hz: float = 1000.0
    sample_rate_hz: float = 44100.0
    filter_order: int = DEFAULT_ORDER

    def __post_init__(self):
        if not 0 < self.modulation_index <= 1:
            raise InvalidParameter(f"modulation_index must lie in (0, 1], got {self.modulation_index}")
        _check_nyquist("carrier_freq_hz", self.carrier_freq_hz, self.sample_rate_hz)
        # proxy for "carrier much higher than the message bandwidth"
        if self.carrier_freq_hz < 2 * self.message_bandwidth_hz:
            raise InvalidParameter(
                f"carrier {self.carrier_freq_hz} Hz must be at least twice the message "
                f"bandwidth {self.message_bandwidth_hz} Hz"
            )
        _check_nyquist("envelope_lpf_cutoff_hz", self.envelope_lpf_cutoff_hz, self.sample_rate_hz)
        if self.noise_bpf_bandwidth_hz <= 0:
            raise InvalidParameter("noise_bpf_bandwidth_hz must be positive")


@dataclass(frozen=True)
class FmParams:
    carrier_freq_hz: float = 4000.0
    carrier_amplitude: float = 1.0
    freq_sensitivity_hz_per_volt: float = 2.5
    preemphasis_cutoff_hz: float = 750.0
    noise_bpf_bandwidth_hz: float = 2000.0
    envelope_lpf_cutoff_hz: float = 500.0
    deemphasis_lpf_cutoff_hz: float = 750.0
    dc_removal_hpf_cutoff_hz: float = 1000.0
    output_gain: float = 10.0
    sample_rate_hz: float = 44100.0
    filter_order: int = DEFAULT_ORDER

    def __post_init__(self):
        if self.freq_sensitivity_hz_per_volt <= 0:
            raise InvalidParameter("freq_sensitivity_hz_per_volt must be positive")
        fs = self.sample_rate_hz
        _check_nyquist("carrier_freq_hz", self.carrier_freq_hz, fs)
        for name in ("preemphasis_cutoff_hz", "envelope_lpf_cutoff_hz",
                     "deemphasis_lpf_cutoff_hz", "dc_removal_hpf_cutoff_hz"):
            _check_nyquist(name, getattr(self, name), fs)
        if self.noise_bpf_bandwidth_hz <= 0:
            raise InvalidParameter("noise_bpf_bandwidth_hz must be positive")


def am_modulate(message: Signal, params: AmParams) -> Signal:
    """``output_gain * Ac * (1 + ka * gain * m[n]) * cos(2*pi*fc*n/fs)``.

    Raises OvermodulationError when ``max|ka * gain * m|`` reaches 1 rather
    than clipping the envelope.
    """
    _check_rate(message, params.sample_rate_hz)
    m = scale(message, params.message_gain)
    km = scale(m, params.modulation_index).samples
    if km.size and np.max(np.abs(km)) >= 1.0:
        raise OvermodulationError(
            f"max|ka*m| = {np.max(np.abs(km)):.4g} >= 1; lower message_gain or modulation_index"
        )
    n = np.arange(km.size)
    carrier = np.cos(2 * np.pi * params.carrier_freq_hz * n / params.sample_rate_hz)
    s = params.carrier_amplitude * (1.0 + km) * carrier
    return scale(message.replace_samples(s), params.output_gain)


def am_demodulate(received: Signal, params: AmParams) -> Signal:
    """Envelope detector: band-pass, full-wave rectify, two low-passes, drop DC, amplify."""
    _check_rate(received, params.sample_rate_hz)
    order = params.filter_order
    x = filters.bandpass_around(received, params.carrier_freq_hz, params.noise_bpf_bandwidth_hz, order)
    x = rectify_fullwave(x)
    x = filters.lowpass(x, params.envelope_lpf_cutoff_hz, order)
    x = filters.lowpass(x, params.envelope_lpf_cutoff_hz, order)
    x = remove_mean(x)
    return scale(x, params.output_gain)


def fm_modulate(message: Signal, params: FmParams, preemphasis_enabled: bool = True) -> Signal:
    """``output_gain * Ac * cos(2*pi*fc*t + 2*pi*kf * integral(m))``.

    The message is optionally pre-emphasized by a high-pass before being
    integrated with the trapezoidal rule.
    """
    _check_rate(message, params.sample_rate_hz)
    m = message
    if preemphasis_enabled and len(m):
        m = filters.highpass(m, params.preemphasis_cutoff_hz, params.filter_order)
    peak = float(np.max(np.abs(m.samples))) if len(m) else 0.0
    top = params.carrier_freq_hz + params.freq_sensitivity_hz_per_volt * peak
    if top >= params.sample_rate_hz / 2:
        raise DeviationExceedsNyquist(
            f"instantaneous frequency reaches {top:.1f} Hz, Nyquist is {params.sample_rate_hz / 2} Hz"
        )
    if len(m) == 0:
        return m
    integral = trapezoidal_integrate(m).samples
    n = np.arange(integral.size)
    theta = (2 * np.pi * params.carrier_freq_hz * n / params.sample_rate_hz
             + 2 * np.pi * params.freq_sensitivity_hz_per_volt * integral)
    s = params.carrier_amplitude * np.cos(theta)
    return scale(message.replace_samples(s), params.output_gain)


def fm_demodulate(
    received: Signal,
    params: FmParams,
    deemphasis_enabled: bool = True,
    dc_removal_enabled: bool = False,
) -> Signal:
    """Frequency discriminator: differentiator followed by an envelope detector.

    The 1 kHz DC-removal high-pass sits above the 750 Hz de-emphasis cutoff
    and removes most of the recovered message, so it is off unless asked for.
    Output is scaled to a peak of 0.9.
    """
    _check_rate(received, params.sample_rate_hz)
    if len(received) < 2:
        return received
    order = params.filter_order
    x = filters.bandpass_around(received, params.carrier_freq_hz, params.noise_bpf_bandwidth_hz, order)
    x = differentiate(x)
    x = rectify_fullwave(x)
    x = filters.lowpass(x, params.envelope_lpf_cutoff_hz, order)
    if deemphasis_enabled:
        x = filters.lowpass(x, params.deemphasis_lpf_cutoff_hz, order)
    x = remove_mean(x)
    if dc_removal_enabled:
        x = filters.highpass(x, params.dc_removal_hpf_cutoff_hz, order)
    return normalize_peak(x, DEMOD_PEAK)
