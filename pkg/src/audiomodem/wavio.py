"""Mono 16-bit PCM WAV reading and writing.

Files are written with the canonical 44-byte header (RIFF, fmt, data). The
reader walks the chunk list, so extra chunks between ``fmt `` and ``data``
are tolerated; only channel 0 of a multi-channel file is returned.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import IoFailure, MalformedWav, SampleOutOfRange, UnsupportedFormat
from .signals import Signal

PCM_FORMAT_TAG = 1
FULL_SCALE = 32768
_RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class WavMetadata:
    sample_rate_hz: int
    channel_count: int
    bits_per_sample: int


def _parse(blob: bytes) -> tuple[WavMetadata, bytes]:
    if len(blob) < 12:
        raise MalformedWav("file too short for a RIFF header")
    riff, _, wave = struct.unpack("<4sI4s", blob[:12])
    if riff != b"RIFF" or wave != b"WAVE":
        raise MalformedWav("missing RIFF/WAVE signature")

    meta = None
    pos = 12
    while pos + 8 <= len(blob):
        cid, size = struct.unpack("<4sI", blob[pos:pos + 8])
        body = blob[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise MalformedWav("fmt chunk shorter than 16 bytes")
            tag, channels, rate, _, _, bits = struct.unpack("<HHIIHH", body[:16])
            if tag != PCM_FORMAT_TAG:
                raise UnsupportedFormat(f"audio format tag {tag} is not PCM")
            if bits != 16:
                raise UnsupportedFormat(f"{bits}-bit samples are not supported (16 only)")
            if channels < 1 or rate < 1:
                raise MalformedWav(f"invalid fmt fields: channels={channels}, rate={rate}")
            meta = WavMetadata(rate, channels, bits)
        elif cid == b"data":
            if meta is None:
                raise MalformedWav("data chunk precedes fmt chunk")
            if len(body) < size:
                raise MalformedWav(f"data chunk declares {size} bytes, only {len(body)} present")
            return meta, body
        pos += 8 + size + (size & 1)
    raise MalformedWav("no data chunk" if meta is not None else "no fmt chunk")


def read_wav_with_metadata(path: str | os.PathLike) -> tuple[Signal, WavMetadata]:
    with open(path, "rb") as fh:
        blob = fh.read()
    meta, data = _parse(blob)
    frame = 2 * meta.channel_count
    usable = len(data) - len(data) % frame
    pcm = np.frombuffer(data[:usable], dtype="<i2").reshape(-1, meta.channel_count)
    samples = pcm[:, 0].astype(np.float64) / FULL_SCALE
    return Signal(samples, meta.sample_rate_hz), meta


def read_wav(path: str | os.PathLike) -> Signal:
    """Channel 0 of a 16-bit PCM WAV file, scaled to [-1, 1)."""
    return read_wav_with_metadata(path)[0]


def quantize(samples: np.ndarray) -> np.ndarray:
    """Round half away from zero onto the int16 grid, clamping +1.0 to 32767."""
    scaled = np.asarray(samples, dtype=np.float64) * FULL_SCALE
    rounded = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    return np.clip(rounded, -FULL_SCALE, FULL_SCALE - 1).astype("<i2")


def encode_wav(signal: Signal) -> bytes:
    rate = signal.sample_rate_hz
    if rate != int(rate):
        raise UnsupportedFormat(f"WAV needs an integer sample rate, got {rate}")
    if len(signal) and np.max(np.abs(signal.samples)) > 1.0 + _RANGE_SLACK:
        raise SampleOutOfRange(
            f"peak {np.max(np.abs(signal.samples)):.6g} exceeds full scale; scale or clip first"
        )
    pcm = quantize(signal.samples).tobytes()
    rate = int(rate)
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, PCM_FORMAT_TAG, 1, rate, rate * 2, 2, 16,
        b"data", len(pcm),
    )
    return header + pcm


def write_wav(path: str | os.PathLike, signal: Signal) -> None:
    """Write ``signal`` as mono 16-bit PCM, replacing any existing file."""
    blob = encode_wav(signal)
    try:
        with open(path, "wb") as fh:
            fh.write(blob)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
