"""Butterworth IIR filters realized as cascades of second-order sections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import signal as sps

from .errors import FrequencyOutOfRange, InvalidCutoff, InvalidOrder, RateMismatch
from .signals import Signal

DEFAULT_ORDER = 4
MAX_ORDER = 12


class FilterKind(str, Enum):
    LOWPASS = "lowpass"
    HIGHPASS = "highpass"
    BANDPASS = "bandpass"


@dataclass(frozen=True)
class FilterSpec:
    """What to build.

    For a band-pass filter ``order`` is the order of the low-pass prototype,
    so the realized filter has twice as many poles. ``cutoff_low_hz`` is only
    meaningful for band-pass designs.
    """

    kind: FilterKind
    order: int
    cutoff_high_hz: float
    sample_rate_hz: float
    cutoff_low_hz: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FilterKind(self.kind))
        if not isinstance(self.order, (int, np.integer)) or not 1 <= self.order <= MAX_ORDER:
            raise InvalidOrder(f"order must be an integer in 1..{MAX_ORDER}, got {self.order!r}")
        nyq = self.sample_rate_hz / 2
        edges = [self.cutoff_high_hz]
        if self.kind is FilterKind.BANDPASS:
            if self.cutoff_low_hz is None:
                raise InvalidCutoff("band-pass design needs cutoff_low_hz")
            edges.append(self.cutoff_low_hz)
            if not self.cutoff_low_hz < self.cutoff_high_hz:
                raise InvalidCutoff(
                    f"band edges out of order: {self.cutoff_low_hz} >= {self.cutoff_high_hz}"
                )
        for f in edges:
            if not 0 < f < nyq:
                raise InvalidCutoff(f"cutoff {f} Hz outside (0, {nyq}) Hz")

    @classmethod
    def lowpass(cls, cutoff_hz: float, sample_rate_hz: float, order: int = DEFAULT_ORDER) -> "FilterSpec":
        return cls(FilterKind.LOWPASS, order, cutoff_hz, sample_rate_hz)

    @classmethod
    def highpass(cls, cutoff_hz: float, sample_rate_hz: float, order: int = DEFAULT_ORDER) -> "FilterSpec":
        return cls(FilterKind.HIGHPASS, order, cutoff_hz, sample_rate_hz)

    @classmethod
    def bandpass(
        cls, low_hz: float, high_hz: float, sample_rate_hz: float, order: int = DEFAULT_ORDER
    ) -> "FilterSpec":
        return cls(FilterKind.BANDPASS, order, high_hz, sample_rate_hz, cutoff_low_hz=low_hz)

    @classmethod
    def bandpass_around(
        cls, center_hz: float, bandwidth_hz: float, sample_rate_hz: float, order: int = DEFAULT_ORDER
    ) -> "FilterSpec":
        """Band-pass with edges ``center -/+ bandwidth/2``."""
        half = bandwidth_hz / 2
        return cls.bandpass(center_hz - half, center_hz + half, sample_rate_hz, order)

    @property
    def cutoffs(self) -> tuple[float, ...]:
        if self.kind is FilterKind.BANDPASS:
            return (self.cutoff_low_hz, self.cutoff_high_hz)
        return (self.cutoff_high_hz,)

    @property
    def passband_reference_hz(self) -> float:
        """Frequency where the design has exactly unit gain.

        DC for low-pass, Nyquist for high-pass; for band-pass the centre that
        the bilinear transform maps from the geometric mean of the pre-warped
        edges.
        """
        fs = self.sample_rate_hz
        if self.kind is FilterKind.LOWPASS:
            return 0.0
        if self.kind is FilterKind.HIGHPASS:
            return fs / 2
        w1 = math.tan(math.pi * self.cutoff_low_hz / fs)
        w2 = math.tan(math.pi * self.cutoff_high_hz / fs)
        return fs / math.pi * math.atan(math.sqrt(w1 * w2))


@dataclass(frozen=True, eq=False)
class DesignedFilter:
    """Realized cascade; each row of ``sections`` is ``[b0, b1, b2, 1, a1, a2]``."""

    sections: np.ndarray = field(repr=False)
    spec: FilterSpec

    def poles(self) -> np.ndarray:
        return np.concatenate([np.roots(row[3:]) for row in self.sections])

    def is_stable(self) -> bool:
        return bool(np.all(np.abs(self.poles()) < 1.0))


def design_butterworth(spec: FilterSpec) -> DesignedFilter:
    """Butterworth design via pre-warped bilinear transform, in SOS form."""
    btype = {FilterKind.LOWPASS: "lowpass", FilterKind.HIGHPASS: "highpass",
             FilterKind.BANDPASS: "bandpass"}[spec.kind]
    wn = spec.cutoffs if spec.kind is FilterKind.BANDPASS else spec.cutoff_high_hz
    sos = sps.butter(int(spec.order), wn, btype=btype, fs=spec.sample_rate_hz, output="sos")
    sos = np.asarray(sos, dtype=np.float64)
    sos.flags.writeable = False
    return DesignedFilter(sos, spec)


def apply_filter(filt: DesignedFilter, x: Signal) -> Signal:
    """Causal single pass through the cascade, every section starting at rest."""
    if x.sample_rate_hz != filt.spec.sample_rate_hz:
        raise RateMismatch(
            f"filter designed for {filt.spec.sample_rate_hz} Hz, signal is {x.sample_rate_hz} Hz"
        )
    if len(x) == 0:
        return x
    return x.replace_samples(sps.sosfilt(np.array(filt.sections), x.samples))


def frequency_response(filt: DesignedFilter, freq_hz: float | np.ndarray) -> float | np.ndarray:
    """Cascade magnitude ``|H(e^{jw})|`` at ``w = 2*pi*freq/fs``."""
    fs = filt.spec.sample_rate_hz
    f = np.asarray(freq_hz, dtype=np.float64)
    if np.any(f < 0) or np.any(f > fs / 2):
        raise FrequencyOutOfRange(f"frequency must lie in [0, {fs / 2}] Hz")
    z1 = np.exp(-2j * np.pi * f / fs)
    z2 = z1 * z1
    h = np.ones_like(z1)
    for b0, b1, b2, a0, a1, a2 in filt.sections:
        h = h * (b0 + b1 * z1 + b2 * z2) / (a0 + a1 * z1 + a2 * z2)
    mag = np.abs(h)
    return float(mag) if mag.ndim == 0 else mag


def lowpass(x: Signal, cutoff_hz: float, order: int = DEFAULT_ORDER) -> Signal:
    return apply_filter(design_butterworth(FilterSpec.lowpass(cutoff_hz, x.sample_rate_hz, order)), x)


def highpass(x: Signal, cutoff_hz: float, order: int = DEFAULT_ORDER) -> Signal:
    return apply_filter(design_butterworth(FilterSpec.highpass(cutoff_hz, x.sample_rate_hz, order)), x)


def bandpass_around(x: Signal, center_hz: float, bandwidth_hz: float, order: int = DEFAULT_ORDER) -> Signal:
    spec = FilterSpec.bandpass_around(center_hz, bandwidth_hz, x.sample_rate_hz, order)
    return apply_filter(design_butterworth(spec), x)
