"""Text framing plus the BFSK and on-off QAM transmit/receive chains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import filters
from .errors import (
    EmptyFrame,
    FrameLengthMismatch,
    FrameLengthNotByteAligned,
    InvalidParameter,
    NoSampleAboveThreshold,
    NonAsciiInput,
    NonIntegralSymbolLength,
    NyquistViolation,
    RateMismatch,
    TruncationOutOfRange,
)
from .filters import DEFAULT_ORDER
from .signals import Signal, rectify_fullwave

MSB_FIRST = "msb_first"


@dataclass(frozen=True)
class BitFrame:
    """Bits in transmission order, most significant bit of each byte first."""

    bits: tuple[int, ...]
    bit_rate: float = 1.0
    bit_order: str = MSB_FIRST

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InvalidParameter("bits must be 0 or 1")
        if not self.bit_rate > 0:
            raise InvalidParameter(f"bit rate must be positive, got {self.bit_rate}")
        if self.bit_order != MSB_FIRST:
            raise InvalidParameter(f"unsupported bit order {self.bit_order!r}")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    def bit_errors(self, other: "BitFrame") -> int:
        """Hamming distance; bits missing from the shorter frame count as errors."""
        n = min(len(self), len(other))
        diff = sum(a != b for a, b in zip(self.bits[:n], other.bits[:n]))
        return diff + abs(len(self) - len(other))


def text_to_bits(text: str, bit_rate: float = 1.0) -> BitFrame:
    """Eight bits per ASCII character, MSB first."""
    bits = []
    for ch in text:
        code = ord(ch)
        if code >= 128:
            raise NonAsciiInput(f"character {ch!r} (U+{code:04X}) is not ASCII")
        bits.extend((code >> shift) & 1 for shift in range(7, -1, -1))
    return BitFrame(tuple(bits), bit_rate)


def bits_to_text(frame: BitFrame) -> str:
    if len(frame) % 8:
        raise FrameLengthNotByteAligned(f"{len(frame)} bits is not a whole number of bytes")
    chars = []
    for i in range(0, len(frame), 8):
        code = 0
        for b in frame.bits[i:i + 8]:
            code = (code << 1) | b
        chars.append(chr(code))
    return "".join(chars)


def samples_per_symbol(sample_rate_hz: float, bit_rate: float) -> int:
    ratio = sample_rate_hz / bit_rate
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise NonIntegralSymbolLength(
            f"{sample_rate_hz} Hz / {bit_rate} bit/s = {ratio:g} is not a whole number of samples"
        )
    return n


def _check_rate(x: Signal, sample_rate_hz: float) -> None:
    if x.sample_rate_hz != sample_rate_hz:
        raise RateMismatch(f"signal is {x.sample_rate_hz} Hz, parameters expect {sample_rate_hz} Hz")


def _check_frame_rate(frame: BitFrame, bit_rate: float) -> None:
    if frame.bit_rate != bit_rate:
        raise InvalidParameter(f"frame is {frame.bit_rate} bit/s, parameters expect {bit_rate} bit/s")


@dataclass(frozen=True)
class BfskParams:
    freq_zero_hz: float = 4000.0
    freq_one_hz: float = 6000.0
    carrier_amplitude: float = 1.0
    bit_rate: float = 1.0
    bpf_bandwidth_hz: float = 400.0
    start_threshold: float = 0.2
    sample_rate_hz: float = 44100.0
    filter_order: int = DEFAULT_ORDER

    def __post_init__(self):
        nyq = self.sample_rate_hz / 2
        for name in ("freq_zero_hz", "freq_one_hz"):
            f = getattr(self, name)
            if not 0 < f < nyq:
                raise NyquistViolation(f"{name}={f} Hz must lie in (0, {nyq}) Hz")
        if abs(self.freq_one_hz - self.freq_zero_hz) <= self.bpf_bandwidth_hz:
            raise InvalidParameter("tone spacing must exceed the branch filter bandwidth")
        if self.bpf_bandwidth_hz <= 0:
            raise InvalidParameter("bpf_bandwidth_hz must be positive")
        if self.start_threshold <= 0:
            raise InvalidParameter(f"start_threshold must be positive, got {self.start_threshold}")
        if self.bit_rate <= 0:
            raise InvalidParameter(f"bit_rate must be positive, got {self.bit_rate}")


@dataclass(frozen=True)
class QamParams:
    carrier_freq_hz: float = 4000.0
    carrier_amplitude: float = 1.0
    bit_rate: float = 1.0
    lpf_cutoff_hz: float = 2000.0
    output_scale: float = 0.5
    prefilter_bandwidth_hz: float = 400.0
    sample_rate_hz: float = 44100.0
    filter_order: int = DEFAULT_ORDER

    def __post_init__(self):
        nyq = self.sample_rate_hz / 2
        if not 0 < self.carrier_freq_hz < nyq:
            raise NyquistViolation(f"carrier {self.carrier_freq_hz} Hz must lie in (0, {nyq}) Hz")
        if not 0 < self.output_scale <= 1:
            raise InvalidParameter(f"output_scale must lie in (0, 1], got {self.output_scale}")
        if not 0 < self.lpf_cutoff_hz < nyq:
            raise InvalidParameter(f"lpf_cutoff_hz must lie in (0, {nyq}) Hz")
        if self.bit_rate <= 0:
            raise InvalidParameter(f"bit_rate must be positive, got {self.bit_rate}")

    @property
    def decision_level(self) -> float:
        """Midpoint between the ideal recovered levels 0 and ``output_scale * Ac``."""
        return 0.5 * self.output_scale * self.carrier_amplitude


def bfsk_modulate(frame: BitFrame, params: BfskParams) -> Signal:
    """One tone burst per bit; every burst starts at phase zero."""
    if len(frame) == 0:
        raise EmptyFrame("nothing to transmit")
    _check_frame_rate(frame, params.bit_rate)
    fs = params.sample_rate_hz
    sps_ = samples_per_symbol(fs, params.bit_rate)
    n = np.arange(sps_)
    bursts = np.stack([
        params.carrier_amplitude * np.cos(2 * np.pi * params.freq_zero_hz * n / fs),
        params.carrier_amplitude * np.cos(2 * np.pi * params.freq_one_hz * n / fs),
    ])
    return Signal(bursts[np.asarray(frame.bits)].reshape(-1), fs)


def find_signal_start(x: Signal, threshold: float) -> int:
    """Index of the first sample whose magnitude is strictly above ``threshold``."""
    if not threshold > 0:
        raise InvalidParameter(f"threshold must be positive, got {threshold}")
    above = np.flatnonzero(np.abs(x.samples) > threshold)
    if above.size == 0:
        raise NoSampleAboveThreshold(f"no sample exceeds threshold {threshold}")
    return int(above[0])


def bfsk_branch_envelopes(received: Signal, params: BfskParams) -> tuple[Signal, Signal]:
    """Rectified outputs of the band-pass filters centred on the 0 and 1 tones."""
    _check_rate(received, params.sample_rate_hz)
    bw, order = params.bpf_bandwidth_hz, params.filter_order
    zero = rectify_fullwave(filters.bandpass_around(received, params.freq_zero_hz, bw, order))
    one = rectify_fullwave(filters.bandpass_around(received, params.freq_one_hz, bw, order))
    return zero, one


def bfsk_demodulate(received: Signal, bit_count: int, params: BfskParams) -> BitFrame:
    """Non-coherent two-branch detector.

    The first sample of the summed branch envelopes above
    ``start_threshold`` marks the start of the message; from there each
    symbol decodes as 1 when the mean envelope of the 1-branch beats that of
    the 0-branch (ties go to 0). Like an array-subset, a window running off
    the end of the recording is cut short; the call fails only when more than
    half of the final symbol is missing.
    """
    if bit_count < 1:
        raise InvalidParameter(f"bit_count must be at least 1, got {bit_count}")
    sps_ = samples_per_symbol(params.sample_rate_hz, params.bit_rate)
    zero, one = bfsk_branch_envelopes(received, params)
    start = find_signal_start(Signal(zero.samples + one.samples, received.sample_rate_hz),
                              params.start_threshold)
    missing = start + bit_count * sps_ - len(received)
    if missing > sps_ // 2:
        raise TruncationOutOfRange(
            f"{bit_count} symbols from sample {start} need {bit_count * sps_} samples, "
            f"only {len(received) - start} available"
        )
    e0 = zero.samples[start:start + bit_count * sps_]
    e1 = one.samples[start:start + bit_count * sps_]
    bits = []
    for k in range(bit_count):
        sl = slice(k * sps_, (k + 1) * sps_)
        bits.append(1 if np.mean(e1[sl]) > np.mean(e0[sl]) else 0)
    return BitFrame(tuple(bits), params.bit_rate)


def qam_modulate(frame_i: BitFrame, frame_q: BitFrame, params: QamParams) -> Signal:
    """``scale * Ac * (m1 cos(2*pi*fc*n/fs) + m2 sin(2*pi*fc*n/fs))`` with on-off levels."""
    if len(frame_i) != len(frame_q) or frame_i.bit_rate != frame_q.bit_rate:
        raise FrameLengthMismatch(
            f"in-phase frame has {len(frame_i)} bits @ {frame_i.bit_rate}, "
            f"quadrature frame has {len(frame_q)} bits @ {frame_q.bit_rate}"
        )
    _check_frame_rate(frame_i, params.bit_rate)
    fs = params.sample_rate_hz
    sps_ = samples_per_symbol(fs, params.bit_rate)
    m1 = np.repeat(np.asarray(frame_i.bits, dtype=np.float64), sps_)
    m2 = np.repeat(np.asarray(frame_q.bits, dtype=np.float64), sps_)
    n = np.arange(m1.size)
    w = 2 * np.pi * params.carrier_freq_hz * n / fs
    amp = params.output_scale * params.carrier_amplitude
    return Signal(amp * (m1 * np.cos(w) + m2 * np.sin(w)), fs)


def qam_symbol_means(
    received: Signal, bit_count: int, params: QamParams, prefilter: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol means of the low-passed in-phase and quadrature product arms.

    The local carriers are ``2 cos`` and ``2 sin`` so an ideal arm settles at
    ``output_scale * Ac`` for a 1 bit. The received wave is assumed to start
    on a symbol boundary.
    """
    _check_rate(received, params.sample_rate_hz)
    if bit_count < 1:
        raise InvalidParameter(f"bit_count must be at least 1, got {bit_count}")
    fs = params.sample_rate_hz
    sps_ = samples_per_symbol(fs, params.bit_rate)
    need = bit_count * sps_
    if len(received) < need:
        raise TruncationOutOfRange(f"{bit_count} symbols need {need} samples, got {len(received)}")
    x = received
    if prefilter:
        x = filters.bandpass_around(x, params.carrier_freq_hz, params.prefilter_bandwidth_hz,
                                    params.filter_order)
    w = 2 * np.pi * params.carrier_freq_hz * np.arange(len(x)) / fs
    arm_i = filters.lowpass(x.replace_samples(2 * x.samples * np.cos(w)), params.lpf_cutoff_hz,
                            params.filter_order)
    arm_q = filters.lowpass(x.replace_samples(2 * x.samples * np.sin(w)), params.lpf_cutoff_hz,
                            params.filter_order)
    means_i = arm_i.samples[:need].reshape(bit_count, sps_).mean(axis=1)
    means_q = arm_q.samples[:need].reshape(bit_count, sps_).mean(axis=1)
    return means_i, means_q


def qam_demodulate(
    received: Signal, bit_count: int, params: QamParams, prefilter: bool = False
) -> tuple[BitFrame, BitFrame]:
    means_i, means_q = qam_symbol_means(received, bit_count, params, prefilter)
    level = params.decision_level
    frame_i = BitFrame(tuple(int(m > level) for m in means_i), params.bit_rate)
    frame_q = BitFrame(tuple(int(m > level) for m in means_q), params.bit_rate)
    return frame_i, frame_q
