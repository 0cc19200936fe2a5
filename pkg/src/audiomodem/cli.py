"""Command-line front end: every modem chain as a file-in/file-out subcommand.

Exit status is 0 on success, 1 for a domain error (bad file, overmodulation,
no signal found, ...) and 2 for a usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import analog, digital
from .analog import AmParams, FmParams
from .channel import ChannelSpec, apply_channel
from .digital import BfskParams, QamParams
from .errors import IoFailure, ModemError, RateMismatch, UnsupportedFormat
from .signals import (
    Signal,
    Spectrum,
    align_by_crosscorrelation,
    generate_tone,
    normalize_peak,
    power_spectral_density,
)
from .wavio import read_wav, write_wav

CLI_SAMPLE_RATES = (44100, 22050)
OUTPUT_PEAK = 0.9
CSV_HEADER = ("frequency_hz", "power")

PARAM_RECORDS = {
    "am": AmParams,
    "fm": FmParams,
    "bfsk": BfskParams,
    "qam": QamParams,
}


class UsageError(Exception):
    pass


def export_spectrum_csv(spectrum: Spectrum, path: str | os.PathLike) -> None:
    """One ``frequency_hz,power`` row per bin, ascending, shortest round-trip floats."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for f, p in zip(spectrum.frequencies, spectrum.power):
                w.writerow((repr(float(f)), repr(float(p))))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_spectrum_csv(path: str | os.PathLike) -> Spectrum:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ModemError(f"{path}: not a spectrum CSV")
    freqs = np.array([float(r[0]) for r in rows[1:]])
    power = np.array([float(r[1]) for r in rows[1:]])
    bin_hz = freqs[1] - freqs[0] if freqs.size > 1 else 1.0
    return Spectrum(bin_hz, power)


def _parse_overrides(pairs: list[str] | None, record: type) -> dict:
    names = {f.name: f for f in dataclasses.fields(record)}
    out = {}
    for pair in pairs or []:
        key, sep, raw = pair.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise UsageError(f"override {pair!r} is not KEY=VALUE")
        if key not in names:
            raise UsageError(f"unknown parameter {key!r} for {record.__name__}; "
                             f"choose from {', '.join(names)}")
        kind = type(names[key].default)
        try:
            value = kind(raw) if kind is not int else int(raw, 10)
        except ValueError:
            raise UsageError(f"{key} expects a {kind.__name__}, got {raw!r}") from None
        if key == "sample_rate_hz" and value not in CLI_SAMPLE_RATES:
            raise UsageError(f"sample_rate_hz must be one of {CLI_SAMPLE_RATES}, got {raw}")
        out[key] = value
    return out


def _build_params(record: type, overrides: dict, sample_rate_hz: float | None = None):
    if sample_rate_hz is not None:
        given = overrides.get("sample_rate_hz")
        if given is not None and given != sample_rate_hz:
            raise RateMismatch(f"input is {sample_rate_hz:g} Hz but sample_rate_hz={given:g} was requested")
        overrides = {**overrides, "sample_rate_hz": float(sample_rate_hz)}
    return record(**overrides)


def _read(path: str) -> Signal:
    sig = read_wav(path)
    if sig.sample_rate_hz not in CLI_SAMPLE_RATES:
        raise UnsupportedFormat(
            f"{path}: sample rate {sig.sample_rate_hz:g} Hz; use one of {CLI_SAMPLE_RATES}"
        )
    return sig


def _write_passband(path: str, sig: Signal) -> None:
    # transmitter gains can push the wave past full scale; rescale rather than clip
    if len(sig) and np.max(np.abs(sig.samples)) > 1.0:
        sig = normalize_peak(sig, OUTPUT_PEAK)
    write_wav(path, sig)


def _write_demodulated(path: str, sig: Signal) -> None:
    sig = normalize_peak(sig, OUTPUT_PEAK)
    write_wav(path, sig.replace_samples(np.clip(sig.samples, -1.0, 1.0)))


def _channel_spec(args) -> ChannelSpec:
    return ChannelSpec(
        noise_sigma=args.noise_sigma,
        gain=args.gain,
        lead_pad_s=args.lead_pad,
        pad_noise_sigma=args.noise_sigma if args.pad_noise_sigma is None else args.pad_noise_sigma,
        rng_seed=args.seed,
    )


# --- subcommands -----------------------------------------------------------

def cmd_am_mod(args, out):
    msg = _read(args.input)
    p = _build_params(AmParams, args.overrides, msg.sample_rate_hz)
    _write_passband(args.output, analog.am_modulate(msg, p))


def cmd_am_demod(args, out):
    rx = _read(args.input)
    p = _build_params(AmParams, args.overrides, rx.sample_rate_hz)
    _write_demodulated(args.output, analog.am_demodulate(rx, p))


def cmd_fm_mod(args, out):
    msg = _read(args.input)
    p = _build_params(FmParams, args.overrides, msg.sample_rate_hz)
    _write_passband(args.output, analog.fm_modulate(msg, p, preemphasis_enabled=args.preemphasis))


def cmd_fm_demod(args, out):
    rx = _read(args.input)
    p = _build_params(FmParams, args.overrides, rx.sample_rate_hz)
    y = analog.fm_demodulate(rx, p, deemphasis_enabled=args.deemphasis,
                             dc_removal_enabled=args.dc_removal)
    _write_demodulated(args.output, y)


def cmd_bfsk_mod(args, out):
    p = _build_params(BfskParams, args.overrides)
    frame = digital.text_to_bits(args.text, p.bit_rate)
    _write_passband(args.output, digital.bfsk_modulate(frame, p))


def cmd_bfsk_demod(args, out):
    rx = _read(args.input)
    p = _build_params(BfskParams, args.overrides, rx.sample_rate_hz)
    frame = digital.bfsk_demodulate(rx, args.bits, p)
    print(digital.bits_to_text(frame), file=out)


def cmd_qam_mod(args, out):
    p = _build_params(QamParams, args.overrides)
    text_q = args.text_q if args.text_q is not None else ""
    if len(text_q) != len(args.text):
        raise UsageError("--text and --text-q must have the same length")
    fi = digital.text_to_bits(args.text, p.bit_rate)
    fq = digital.text_to_bits(text_q, p.bit_rate)
    _write_passband(args.output, digital.qam_modulate(fi, fq, p))


def cmd_qam_demod(args, out):
    rx = _read(args.input)
    p = _build_params(QamParams, args.overrides, rx.sample_rate_hz)
    fi, fq = digital.qam_demodulate(rx, args.bits, p, prefilter=args.prefilter)
    print(digital.bits_to_text(fi), file=out)
    print(digital.bits_to_text(fq), file=out)


def cmd_channel(args, out):
    x = _read(args.input)
    y = apply_channel(x, _channel_spec(args))
    write_wav(args.output, y.replace_samples(np.clip(y.samples, -1.0, 1.0)))


def cmd_psd(args, out):
    x = _read(args.input)
    export_spectrum_csv(power_spectral_density(x, args.segment), args.output)


def _loopback_message(args, fs: float, workdir: Path) -> str:
    if args.message:
        return args.message
    path = workdir / "message.wav"
    write_wav(path, generate_tone(args.tone_hz, args.tone_amplitude, 0.0, args.duration, fs))
    return str(path)


def cmd_loopback(args, out):
    """Transmit, pass through the channel and receive, all via WAV files."""
    scheme = args.scheme
    record = PARAM_RECORDS[scheme]
    fs = args.overrides.get("sample_rate_hz", 44100.0)
    with tempfile.TemporaryDirectory() as tmp:
        work = Path(args.workdir) if args.workdir else Path(tmp)
        work.mkdir(parents=True, exist_ok=True)
        tx, rx, dem = (str(work / name) for name in ("tx.wav", "rx.wav", "demod.wav"))
        ns = argparse.Namespace(**vars(args))

        def step(fn, **kw):
            for k, v in kw.items():
                setattr(ns, k, v)
            fn(ns, out)

        if scheme in ("am", "fm"):
            msg_path = _loopback_message(args, fs, work)
            step(cmd_am_mod if scheme == "am" else cmd_fm_mod, input=msg_path, output=tx)
            step(cmd_channel, input=tx, output=rx)
            step(cmd_am_demod if scheme == "am" else cmd_fm_demod, input=rx, output=dem)
            lag, r = align_by_crosscorrelation(_read(msg_path), _read(dem))
            print(f"scheme={scheme} correlation={r:.6f} lag={lag}", file=out)
            return

        if args.text is None:
            raise UsageError(f"loopback --scheme {scheme} needs --text")
        p = _build_params(record, args.overrides)
        step(cmd_bfsk_mod if scheme == "bfsk" else cmd_qam_mod, output=tx)
        step(cmd_channel, input=tx, output=rx)
        received = _read(rx)
        if scheme == "bfsk":
            sent = [digital.text_to_bits(args.text, p.bit_rate)]
            got = [digital.bfsk_demodulate(received, len(sent[0]), p)]
        else:
            text_q = args.text_q if args.text_q is not None else ""
            sent = [digital.text_to_bits(args.text, p.bit_rate), digital.text_to_bits(text_q, p.bit_rate)]
            got = list(digital.qam_demodulate(received, len(sent[0]), p, prefilter=args.prefilter))
        errors = sum(s.bit_errors(g) for s, g in zip(sent, got))
        total = sum(len(s) for s in sent)
        decoded = "|".join(digital.bits_to_text(g) for g in got)
        print(f"scheme={scheme} bits={total} bit_errors={errors} decoded={decoded!r}", file=out)


# --- parser ----------------------------------------------------------------

def _defaults_epilog(*records: type) -> str:
    lines = ["parameters (--set KEY=VALUE):"]
    for rec in records:
        for f in dataclasses.fields(rec):
            lines.append(f"  {f.name} (default: {f.default})")
    return "\n".join(lines)


def _add_channel_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("channel")
    g.add_argument("--noise-sigma", type=float, default=0.0, help="AWGN standard deviation (volts)")
    g.add_argument("--gain", type=float, default=1.0, help="channel gain")
    g.add_argument("--lead-pad", type=float, default=0.0, help="seconds of noise-only lead-in")
    g.add_argument("--pad-noise-sigma", type=float, default=None,
                   help="noise sigma in the lead-in (default: same as --noise-sigma)")
    g.add_argument("--seed", type=int, default=0, help="noise generator seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="audiomodem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    def add(name, fn, help_, records=()):
        sp = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt,
                            epilog=_defaults_epilog(*records) if records else None)
        sp.set_defaults(func=fn, records=records)
        if records:
            sp.add_argument("--set", dest="set", action="append", metavar="KEY=VALUE",
                            help="override a parameter (repeatable)")
        return sp

    for name, fn, rec, what in [
        ("am-mod", cmd_am_mod, AmParams, "AM-modulate a WAV message"),
        ("am-demod", cmd_am_demod, AmParams, "envelope-detect an AM WAV"),
        ("fm-mod", cmd_fm_mod, FmParams, "FM-modulate a WAV message"),
        ("fm-demod", cmd_fm_demod, FmParams, "discriminate an FM WAV"),
    ]:
        sp = add(name, fn, what, (rec,))
        sp.add_argument("--in", dest="input", required=True)
        sp.add_argument("--out", dest="output", required=True)
        if name == "fm-mod":
            sp.add_argument("--no-preemphasis", dest="preemphasis", action="store_false")
        if name == "fm-demod":
            sp.add_argument("--no-deemphasis", dest="deemphasis", action="store_false")
            sp.add_argument("--dc-removal", action="store_true",
                            help="enable the DC-removal high-pass stage")

    sp = add("bfsk-mod", cmd_bfsk_mod, "BFSK-modulate ASCII text", (BfskParams,))
    sp.add_argument("--text", required=True)
    sp.add_argument("--out", dest="output", required=True)

    sp = add("bfsk-demod", cmd_bfsk_demod, "decode a BFSK WAV to text", (BfskParams,))
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--bits", type=int, required=True)

    sp = add("qam-mod", cmd_qam_mod, "QAM-modulate two equal-length texts", (QamParams,))
    sp.add_argument("--text", required=True, help="in-phase (cosine) message")
    sp.add_argument("--text-q", required=True, help="quadrature (sine) message")
    sp.add_argument("--out", dest="output", required=True)

    sp = add("qam-demod", cmd_qam_demod, "decode a QAM WAV to two texts", (QamParams,))
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--bits", type=int, required=True)
    sp.add_argument("--prefilter", action="store_true", help="band-pass front-end before mixing")

    sp = add("channel", cmd_channel, "pass a WAV through the simulated channel")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output", required=True)
    _add_channel_flags(sp)

    sp = add("psd", cmd_psd, "write the power spectral density of a WAV as CSV")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--segment", type=int, default=4096)
    sp.add_argument("--out", dest="output", required=True)

    sp = add("loopback", cmd_loopback, "transmit, impair and receive through files",
             tuple(PARAM_RECORDS.values()))
    sp.add_argument("--scheme", choices=sorted(PARAM_RECORDS), required=True)
    sp.add_argument("--text", help="message for bfsk/qam (in-phase text for qam)")
    sp.add_argument("--text-q", help="quadrature text for qam")
    sp.add_argument("--message", help="WAV message for am/fm (default: a generated tone)")
    sp.add_argument("--tone-hz", type=float, default=500.0)
    sp.add_argument("--tone-amplitude", type=float, default=1.0)
    sp.add_argument("--duration", type=float, default=10.0, help="tone length in seconds")
    sp.add_argument("--workdir", help="keep intermediate WAV files here")
    sp.add_argument("--no-preemphasis", dest="preemphasis", action="store_false")
    sp.add_argument("--no-deemphasis", dest="deemphasis", action="store_false")
    sp.add_argument("--dc-removal", action="store_true")
    sp.add_argument("--prefilter", action="store_true")
    _add_channel_flags(sp)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.records:
            record = PARAM_RECORDS[args.scheme] if args.command == "loopback" else args.records[0]
            args.overrides = _parse_overrides(args.set, record)
        else:
            args.overrides = {}
        args.func(args, out)
    except UsageError as exc:
        parser.error(str(exc))
    except ModemError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: FileNotFound: {exc.filename or exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: IoFailure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
