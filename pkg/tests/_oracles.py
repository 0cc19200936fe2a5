"""Closed-form references the tests compare against.

Nothing here calls into the package under test.
"""

import math

import numpy as np


def butterworth_magnitude(kind, order, fs, f, low=None, high=None):
    """|H| of a bilinear-transformed Butterworth, from the pre-warped analog formula."""
    w = math.tan(math.pi * f / fs)
    if kind == "lowpass":
        ratio = w / math.tan(math.pi * high / fs)
    elif kind == "highpass":
        if w == 0:
            return 0.0
        ratio = math.tan(math.pi * high / fs) / w if not math.isinf(w) else 0.0
    else:
        w1 = math.tan(math.pi * low / fs)
        w2 = math.tan(math.pi * high / fs)
        if w == 0:
            return 0.0
        ratio = (w * w - w1 * w2) / (w * (w2 - w1))
    return 1.0 / math.sqrt(1.0 + ratio ** (2 * order))


def tone_amplitude(x, freq_hz, fs):
    """Least-squares amplitude of a sinusoid of known frequency in ``x``."""
    n = np.arange(len(x))
    basis = np.column_stack([np.cos(2 * np.pi * freq_hz * n / fs), np.sin(2 * np.pi * freq_hz * n / fs)])
    coef, *_ = np.linalg.lstsq(basis, np.asarray(x, dtype=float), rcond=None)
    return float(np.hypot(*coef))


def impulse_settle_index(h, floor=1e-6):
    """First index after which every ``|h[n]|`` stays below ``floor``."""
    above = np.flatnonzero(np.abs(h) >= floor)
    return int(above[-1] + 1) if above.size else 0


def db(x):
    return 20.0 * math.log10(x)
