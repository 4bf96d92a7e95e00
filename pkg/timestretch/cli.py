from __future__ import annotations

import argparse
import sys
from collections.abc import Iterable
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import ValidationError

from .analysis.onsets import detect_onsets
from .config import (
    MAX_RATE,
    PROFILES,
    CorpusConfig,
    Profile,
    SpectrogramConfig,
    override,
    profile_for_rate,
)
from .errors import InvalidConfig, TimeStretchError
from .evaluation.corpus import run_corpus
from .evaluation.melody import MelodySpec, perfect_stretch, synth_melody
from .evaluation.metrics import spectrogram_export
from .log import configure_logging
from .signal.io import Signal, read_wav, write_wav
from .vocoders import get_vocoder
from .vocoders.nonstationary import NspvResult


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: error: {message}")


def _rate(text: str) -> float:
    try:
        rate = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid rate {text!r}") from exc
    if not (0 < rate <= MAX_RATE):
        raise argparse.ArgumentTypeError(f"rate {rate} outside (0, {MAX_RATE}]")
    return rate


def _count(text: str, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from exc
    if value < minimum:
        raise argparse.ArgumentTypeError(f"expected an integer >= {minimum}: {value}")
    return value


def _seed(text: str) -> int:
    return _count(text, 0)


def _positive(text: str) -> int:
    return _count(text, 1)


def _profile(args: argparse.Namespace, signal: Signal) -> Profile:
    if args.profile == "auto":
        profile = profile_for_rate(signal.sample_rate)
    else:
        profile = PROFILES[args.profile]
    pv = override(
        profile.pv,
        hop=args.pv_hop,
        channels=args.pv_channels,
        window_length=args.pv_window,
        interpolate=args.pv_interpolate or None,
    )
    frames = override(
        profile.nspv.frames,
        min_win=args.min_win,
        num_scales=args.scales,
        min_channels=args.min_channels,
    )
    onsets = override(
        profile.nspv.onsets, neighborhood=args.sf_neighborhood, bias=args.sf_bias
    )
    nspv = override(profile.nspv, eps_db=args.epsilon_db).model_copy(
        update={"frames": frames, "onsets": onsets}
    )
    return profile.model_copy(update={"pv": pv, "nspv": nspv})


def _stretch(args: argparse.Namespace) -> int:
    signal = read_wav(args.input)
    profile = _profile(args, signal)
    if args.algo == "pv":
        vocoder = get_vocoder("pv", profile.pv)
    else:
        vocoder = get_vocoder("nspv", profile.nspv)
    result = vocoder.stretch(signal, args.rate)
    write_wav(args.output, result.signal)
    if isinstance(result, NspvResult):
        if args.dump_plan:
            result.plan.dump_json(args.dump_plan)
        if args.dump_peaks:
            result.dump_peaks(args.dump_peaks)
    elif args.dump_plan or args.dump_peaks:
        logger.warning("--dump-plan and --dump-peaks only apply to --algo nspv")
    logger.info(
        f"Stretched {args.input} ({len(signal)} samples) to {args.output} "
        f"({len(result.signal)} samples) with {vocoder.name}, profile {profile.name}, "
        f"realized rate {result.realized_rate:.6f}, redundancy {result.redundancy:.3f}"
    )
    return 0


def _onsets(args: argparse.Namespace) -> int:
    signal = read_wav(args.input)
    config = override(
        profile_for_rate(signal.sample_rate).nspv.onsets,
        neighborhood=args.sf_neighborhood,
        bias=args.sf_bias,
    )
    onsets = detect_onsets(signal, config)
    table = np.column_stack(
        [onsets.onsets, onsets.seconds(signal.sample_rate), onsets.strengths]
    )
    header = "onset_sample,onset_seconds,sf_value"
    fmt = ["%d", "%.6f", "%.9g"]
    target = args.output if args.output else sys.stdout
    np.savetxt(target, table, fmt=fmt, delimiter=",", header=header, comments="")
    logger.info(f"Found {len(onsets)} onset(s) in {args.input}")
    return 0


def _spectrogram_config(args: argparse.Namespace) -> SpectrogramConfig:
    return override(
        SpectrogramConfig(),
        hop=args.hop,
        channels=args.channels,
        window_length=args.window,
    )


def _spectrogram(args: argparse.Namespace) -> int:
    signal = read_wav(args.input)
    spectrogram_export(signal, args.output, _spectrogram_config(args))
    return 0


def _synth(args: argparse.Namespace) -> int:
    spec = MelodySpec.random(args.seed)
    signal = synth_melody(spec)
    write_wav(args.output, signal)
    logger.info(
        f"Melody seed {args.seed}: {len(spec.notes)} notes, {len(signal)} samples"
    )
    if args.rate is None:
        if args.perfect_out or args.stretch_report:
            raise UsageError(
                "synth: error: --perfect-out and --stretch-report need --rate"
            )
        return 0

    perfect = perfect_stretch(spec, args.rate)
    if args.perfect_out:
        write_wav(args.perfect_out, perfect)
    if args.stretch_report:
        directory = Path(args.stretch_report)
        directory.mkdir(parents=True, exist_ok=True)
        profile = profile_for_rate(signal.sample_rate)
        spectrogram_export(perfect, directory / "perfect.csv")
        for name, config in (("pv", profile.pv), ("nspv", profile.nspv)):
            stretched = get_vocoder(name, config).stretch(signal, args.rate).signal
            spectrogram_export(stretched, directory / f"{name}.csv")
    return 0


def _evaluate(args: argparse.Namespace) -> int:
    config = CorpusConfig(count=args.count, seed=args.seed, rates=args.rates)
    report = run_corpus(config, progress=not args.no_progress)
    if args.output:
        report.write(args.output)
    else:
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    return 0


def _add_stretch_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--in", dest="input", required=True, help="Input WAV file.")
    parser.add_argument("--out", dest="output", required=True, help="Output WAV file.")
    parser.add_argument("--rate", type=_rate, required=True, help="Stretch factor.")
    parser.add_argument("--algo", choices=["pv", "nspv"], default="nspv")
    parser.add_argument(
        "--profile",
        choices=["auto", *PROFILES],
        default="auto",
        help="Parameter defaults; 'auto' picks them from the sample rate.",
    )
    parser.add_argument("--pv-hop", type=int, default=None)
    parser.add_argument("--pv-channels", type=int, default=None)
    parser.add_argument("--pv-window", type=int, default=None)
    parser.add_argument(
        "--pv-interpolate",
        action="store_true",
        help="Interpolate magnitudes and phase increments between analysis frames.",
    )
    parser.add_argument("--min-win", type=int, default=None)
    parser.add_argument("--scales", type=int, default=None)
    parser.add_argument("--min-channels", type=int, default=None)
    parser.add_argument("--epsilon-db", type=float, default=None)
    parser.add_argument("--sf-neighborhood", type=int, default=None)
    parser.add_argument("--sf-bias", type=float, default=None)
    parser.add_argument("--dump-plan", default=None, help="Stretch plan JSON path.")
    parser.add_argument("--dump-peaks", default=None, help="Per-frame peaks CSV path.")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=argparse.SUPPRESS,
        help="Log progress (-v) or debug details (-vv) to stderr.",
    )
    parser = _Parser(
        prog="timestretch",
        description="Time stretching with phase vocoders on Gabor frames.",
        parents=[common],
    )
    commands = parser.add_subparsers(
        dest="command", required=True, parser_class=_Parser
    )

    stretch = commands.add_parser(
        "stretch", parents=[common], help="Stretch a WAV file."
    )
    _add_stretch_options(stretch)
    stretch.set_defaults(handler=_stretch)

    onsets = commands.add_parser(
        "onsets", parents=[common], help="Detect onsets (CSV on stdout by default)."
    )
    onsets.add_argument("--in", dest="input", required=True)
    onsets.add_argument("--out", dest="output", default=None)
    onsets.add_argument("--sf-neighborhood", type=int, default=None)
    onsets.add_argument("--sf-bias", type=float, default=None)
    onsets.set_defaults(handler=_onsets)

    spectrogram = commands.add_parser(
        "spectrogram", parents=[common], help="Export a dB spectrogram as CSV."
    )
    spectrogram.add_argument("--in", dest="input", required=True)
    spectrogram.add_argument("--out", dest="output", required=True)
    spectrogram.add_argument("--hop", type=int, default=None)
    spectrogram.add_argument("--channels", type=int, default=None)
    spectrogram.add_argument("--window", type=int, default=None)
    spectrogram.set_defaults(handler=_spectrogram)

    synth = commands.add_parser(
        "synth", parents=[common], help="Write a seeded synthetic melody."
    )
    synth.add_argument("--seed", type=_seed, required=True)
    synth.add_argument("--out", dest="output", required=True)
    synth.add_argument("--rate", type=_rate, default=None)
    synth.add_argument("--perfect-out", default=None)
    synth.add_argument(
        "--stretch-report",
        default=None,
        help="Directory for perfect/pv/nspv spectrogram CSVs at --rate.",
    )
    synth.set_defaults(handler=_synth)

    evaluate = commands.add_parser(
        "evaluate", parents=[common], help="Run the synthetic corpus evaluation."
    )
    evaluate.add_argument("--count", type=_positive, default=50)
    evaluate.add_argument("--seed", type=_seed, default=0)
    evaluate.add_argument(
        "--rates",
        type=_rate,
        nargs="+",
        default=None,
        help="Fixed stretch factors; random in [0.5, 3.75] when omitted.",
    )
    evaluate.add_argument(
        "--out", dest="output", default=None, help="Report path (.json or .csv)."
    )
    evaluate.add_argument("--no-progress", action="store_true")
    evaluate.set_defaults(handler=_evaluate)
    return parser


def main(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{exc}\n")
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(getattr(args, "verbose", 0))
    try:
        return args.handler(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except ValidationError as exc:
        # rejected flag overrides are usage errors
        sys.stderr.write(f"{InvalidConfig.__name__}: {exc}\n")
        return 1
    except TimeStretchError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except ValueError as exc:
        logger.opt(exception=exc).debug("Unexpected processing error")
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
