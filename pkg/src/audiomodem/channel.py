"""Deterministic replacement for the acoustic path between speaker and microphone."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySignal, InvalidParameter
from .signals import Signal


@dataclass(frozen=True)
class ChannelSpec:
    """Gain, additive white Gaussian noise and a leading noise-only pad.

    Noise is drawn from numpy's Philox4x64 counter-based generator seeded with
    ``rng_seed``: the pad noise first, then the payload noise.
    """

    noise_sigma: float = 0.0
    gain: float = 1.0
    lead_pad_s: float = 0.0
    pad_noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("noise_sigma", "gain", "lead_pad_s", "pad_noise_sigma"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameter(f"{name} must be finite")
        if self.noise_sigma < 0 or self.pad_noise_sigma < 0:
            raise InvalidParameter("noise sigmas must be non-negative")
        if self.gain <= 0:
            raise InvalidParameter(f"gain must be positive, got {self.gain}")
        if self.lead_pad_s < 0:
            raise InvalidParameter(f"lead pad must be non-negative, got {self.lead_pad_s}")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def apply_channel(x: Signal, spec: ChannelSpec) -> Signal:
    """``concat(pad, gain * x + noise)``; identical inputs give identical outputs."""
    if len(x) == 0:
        raise EmptySignal("channel input is empty")
    rng = make_rng(spec.rng_seed)
    n_pad = int(round(spec.lead_pad_s * x.sample_rate_hz))
    pad = rng.normal(0.0, spec.pad_noise_sigma, n_pad) if spec.pad_noise_sigma > 0 else np.zeros(n_pad)
    payload = spec.gain * x.samples
    if spec.noise_sigma > 0:
        payload = payload + rng.normal(0.0, spec.noise_sigma, payload.size)
    return x.replace_samples(np.concatenate((pad, payload)))
