"""Sampled-signal value types and the scalar DSP primitives the modem chains use.

Every function here is pure: inputs are never mutated and a fresh
:class:`Signal` (or :class:`Spectrum`) is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sps

from .errors import (
    EmptySignal,
    InvalidDuration,
    InvalidParameter,
    NyquistViolation,
    RateMismatch,
    SegmentTooLong,
    SignalTooShort,
)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """A uniformly sampled, real-valued waveform.

    ``samples`` is stored as a read-only float64 array; build a new Signal
    rather than editing one in place.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        if not np.isfinite(self.sample_rate_hz) or self.sample_rate_hz <= 0:
            raise InvalidParameter(f"sample rate must be positive, got {self.sample_rate_hz}")
        arr = _frozen(self.samples)
        if not np.all(np.isfinite(arr)):
            raise InvalidParameter("signal contains NaN or infinite samples")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def time_axis(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate_hz

    def replace_samples(self, samples) -> "Signal":
        """New Signal at the same rate carrying ``samples``."""
        return Signal(samples, self.sample_rate_hz)

    def __repr__(self) -> str:
        return f"Signal(n={self.samples.size}, sample_rate_hz={self.sample_rate_hz:g})"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided power spectral density, bins spaced ``bin_hz`` apart from 0 Hz."""

    bin_hz: float
    power: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not np.isfinite(self.bin_hz) or self.bin_hz <= 0:
            raise InvalidParameter(f"bin width must be positive, got {self.bin_hz}")
        arr = _frozen(self.power)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InvalidParameter("spectrum power must be finite and non-negative")
        object.__setattr__(self, "power", arr)
        object.__setattr__(self, "bin_hz", float(self.bin_hz))

    def __len__(self) -> int:
        return self.power.size

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.power.size) * self.bin_hz

    def total_power(self) -> float:
        """Integrated power, i.e. the mean-square value of the source signal."""
        return float(np.sum(self.power) * self.bin_hz)

    def peak_frequency(self) -> float:
        return float(np.argmax(self.power) * self.bin_hz)

    def band_power(self, low_hz: float, high_hz: float) -> float:
        """Power integrated over bins whose centre lies in ``[low_hz, high_hz]``."""
        f = self.frequencies
        mask = (f >= low_hz) & (f <= high_hz)
        return float(np.sum(self.power[mask]) * self.bin_hz)

    def occupied_bandwidth(self, fraction: float = 0.99) -> float:
        """Width between the frequencies enclosing ``fraction`` of the total power.

        Equal tails of ``(1 - fraction) / 2`` are excluded at each end.
        """
        total = np.sum(self.power)
        if total == 0:
            return 0.0
        cdf = np.cumsum(self.power) / total
        tail = (1.0 - fraction) / 2.0
        lo = int(np.searchsorted(cdf, tail, side="left"))
        hi = int(np.searchsorted(cdf, 1.0 - tail, side="left"))
        hi = min(hi, self.power.size - 1)
        return float((hi - lo) * self.bin_hz)


def generate_tone(
    freq_hz: float,
    amplitude: float,
    phase_deg: float,
    duration_s: float,
    sample_rate_hz: float,
) -> Signal:
    """``amplitude * cos(2*pi*freq_hz*n/fs + phase)`` for ``n = 0 .. round(duration*fs) - 1``."""
    if duration_s <= 0:
        raise InvalidDuration(f"duration must be positive, got {duration_s}")
    if sample_rate_hz <= 0:
        raise InvalidParameter(f"sample rate must be positive, got {sample_rate_hz}")
    if abs(freq_hz) >= sample_rate_hz / 2:
        raise NyquistViolation(
            f"tone at {freq_hz} Hz needs a sample rate above {2 * abs(freq_hz)} Hz "
            f"(got {sample_rate_hz})"
        )
    n = np.arange(int(round(duration_s * sample_rate_hz)))
    phase = np.deg2rad(phase_deg)
    return Signal(amplitude * np.cos(2 * np.pi * freq_hz * n / sample_rate_hz + phase), sample_rate_hz)


def trapezoidal_integrate(x: Signal) -> Signal:
    """Running trapezoidal integral from sample 0, starting at zero."""
    if len(x) < 1:
        raise EmptySignal("cannot integrate an empty signal")
    s = x.samples
    steps = (s[:-1] + s[1:]) / (2.0 * x.sample_rate_hz)
    return x.replace_samples(np.concatenate(([0.0], np.cumsum(steps))))


def differentiate(x: Signal, accuracy: int = 4) -> Signal:
    """Finite-difference time derivative.

    Interior samples use central differences; ``accuracy=4`` uses the
    five-point stencil wherever two neighbours exist on each side and falls
    back to the three-point stencil next to the ends. ``accuracy=2`` is the
    plain three-point rule ``(x[n+1] - x[n-1]) * fs / 2``. The two end samples
    always use one-sided first differences.
    """
    if len(x) < 2:
        raise EmptySignal("differentiation needs at least 2 samples")
    if accuracy not in (2, 4):
        raise InvalidParameter(f"accuracy must be 2 or 4, got {accuracy}")
    s = x.samples
    fs = x.sample_rate_hz
    out = np.gradient(s, 1.0 / fs, edge_order=1)
    if accuracy == 4 and s.size >= 5:
        out[2:-2] = (8.0 * (s[3:-1] - s[1:-3]) - (s[4:] - s[:-4])) * (fs / 12.0)
    return x.replace_samples(out)


def rectify_fullwave(x: Signal) -> Signal:
    return x.replace_samples(np.abs(x.samples))


def scale(x: Signal, gain: float) -> Signal:
    if not np.isfinite(gain):
        raise InvalidParameter(f"gain must be finite, got {gain}")
    return x.replace_samples(gain * x.samples)


def remove_mean(x: Signal) -> Signal:
    if len(x) == 0:
        return x
    return x.replace_samples(x.samples - np.mean(x.samples))


def normalize_peak(x: Signal, peak: float = 0.9) -> Signal:
    """Scale so that ``max|x| == peak``; an all-zero signal is returned unchanged."""
    m = float(np.max(np.abs(x.samples))) if len(x) else 0.0
    if m == 0.0:
        return x
    return x.replace_samples(x.samples * (peak / m))


def power_spectral_density(x: Signal, segment_len: int) -> Spectrum:
    """Averaged-periodogram PSD: Hann segments, 50 % overlap, one-sided density.

    The window's power is compensated so that integrating the result over
    frequency returns the signal's mean-square value. The mean is *not*
    removed before analysis.
    """
    segment_len = int(segment_len)
    if segment_len < 16 or segment_len % 2:
        raise InvalidParameter(f"segment length must be even and >= 16, got {segment_len}")
    if len(x) < 16:
        raise SignalTooShort(f"PSD needs at least 16 samples, got {len(x)}")
    if segment_len > len(x):
        raise SegmentTooLong(f"segment of {segment_len} exceeds signal length {len(x)}")
    _, pxx = sps.welch(
        x.samples,
        fs=x.sample_rate_hz,
        window="hann",
        nperseg=segment_len,
        noverlap=segment_len // 2,
        detrend=False,
        return_onesided=True,
        scaling="density",
    )
    return Spectrum(x.sample_rate_hz / segment_len, pxx)


def align_by_crosscorrelation(reference: Signal, test: Signal) -> tuple[int, float]:
    """Find the delay of ``test`` relative to ``reference``.

    Returns ``(lag, r)`` where ``test[n + lag]`` best matches ``reference[n]``
    and ``r`` is the Pearson correlation over the overlapping samples at that
    lag. Lags are searched over ``|lag| <= min(len) // 2``.
    """
    if len(reference) == 0 or len(test) == 0:
        raise EmptySignal("alignment needs two non-empty signals")
    if reference.sample_rate_hz != test.sample_rate_hz:
        raise RateMismatch(
            f"sample rates differ: {reference.sample_rate_hz} vs {test.sample_rate_hz}"
        )
    r = reference.samples
    y = test.samples
    nr, ny = r.size, y.size

    lags = sps.correlation_lags(ny, nr, mode="full")
    sxy = sps.correlate(y, r, mode="full", method="auto")
    max_lag = min(nr, ny) // 2
    keep = np.abs(lags) <= max_lag
    lags, sxy = lags[keep], sxy[keep]

    # overlap for lag d is reference[a:b] against test[a+d:b+d]
    a = np.maximum(0, -lags)
    b = np.minimum(nr, ny - lags)
    cnt = (b - a).astype(np.float64)

    cr = np.concatenate(([0.0], np.cumsum(r)))
    cr2 = np.concatenate(([0.0], np.cumsum(r * r)))
    cy = np.concatenate(([0.0], np.cumsum(y)))
    cy2 = np.concatenate(([0.0], np.cumsum(y * y)))

    sr = cr[b] - cr[a]
    sr2 = cr2[b] - cr2[a]
    sy = cy[b + lags] - cy[a + lags]
    sy2 = cy2[b + lags] - cy2[a + lags]

    cov = sxy - sr * sy / cnt
    var_r = np.maximum(sr2 - sr * sr / cnt, 0.0)
    var_y = np.maximum(sy2 - sy * sy / cnt, 0.0)
    denom = np.sqrt(var_r * var_y)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(denom > 0, cov / denom, 0.0)
    rho = np.clip(rho, -1.0, 1.0)

    best = np.max(rho)
    candidates = np.nonzero(rho >= best - 1e-12)[0]
    pick = candidates[np.argmin(np.abs(lags[candidates]))]
    return int(lags[pick]), float(rho[pick])
