"""Command-line entry point: decompose, upmix, rfr, loudness, report, serve.

Metrics go to stdout (optionally as a JSON record with --json),
diagnostics to stderr. Exit codes: 0 success, 1 runtime failure,
2 usage or precondition error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .audio_io import QUAD, AudioBuffer, AudioFileError, read_wav, to_5_1, write_wav
from .loudness import LoudnessError, integrated_loudness
from .pipeline import MATCH_INPUT, PipelineConfig, decompose_ce, decompose_pad, upmix_render
from .report import dial_sweep_report
from .stft import StftConfig
from .upmix import NUM_DIAL_POSITIONS, rfr

DEFAULT_PORT_ENV = "PADMIX_PORT"


class UsageError(Exception):
    """Bad flags or violated preconditions; exits with status 2."""


def _json_safe(value):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def _print_record(record: dict):
    print(json.dumps({k: _json_safe(v) for k, v in record.items()}))


def _add_pipeline_flags(p: argparse.ArgumentParser):
    p.add_argument("--frame", type=int, default=None, help="STFT frame length (1024)")
    p.add_argument("--hop", type=int, default=None, help="STFT hop (frame/2)")
    p.add_argument("--cov-smooth", type=int, default=None,
                   help="covariance smoothing frames (5)")
    p.add_argument("--unmix-smooth", type=int, default=None,
                   help="un-mixing matrix smoothing frames (3)")
    p.add_argument("--config", type=Path, default=None,
                   help="JSON config file mirroring the flags (flags win)")


def _pick(args, config: dict, key: str, default):
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _pipeline_config(args, mode: str = "pad", target=MATCH_INPUT) -> PipelineConfig:
    config = {}
    if getattr(args, "config", None):
        config = json.loads(Path(args.config).read_text())
    frame = _pick(args, config, "frame", 1024)
    hop = _pick(args, config, "hop", frame // 2)
    try:
        return PipelineConfig(
            stft=StftConfig(frame_len=frame, hop=hop),
            cov_smooth_frames=_pick(args, config, "cov-smooth", 5),
            unmix_smooth_frames=_pick(args, config, "unmix-smooth", 3),
            mode=_pick(args, config, "mode", mode),
            loudness_target=_pick(args, config, "target-lufs", target),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _read_stereo(path) -> "AudioBuffer":
    buf = read_wav(path)
    if buf.channels != 2:
        raise UsageError("stereo input required")
    return buf


def _energy_db(samples, reference) -> float:
    e = float(np.sum(samples**2))
    if e == 0.0:
        return float("-inf")
    return 10.0 * np.log10(e / reference)


def cmd_decompose(args) -> int:
    buf = _read_stereo(args.input)
    cfg = _pipeline_config(args, mode=args.mode or "pad")
    out_dir = Path(args.output or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    in_energy = float(np.sum(buf.samples**2))
    files = []
    if cfg.mode == "pad":
        primary, ambient = decompose_pad(buf, cfg)
        for name, part in (("primary", primary), ("ambient", ambient)):
            path = out_dir / f"{stem}.{name}.wav"
            write_wav(path, part, args.format)
            files.append((str(path), _energy_db(part.samples, in_energy)))
    else:
        left, right, center = decompose_ce(buf, cfg)
        zeros = np.zeros_like(left.samples[0])
        stems = (
            ("l", AudioBuffer(np.stack([left.samples[0], zeros]), buf.sample_rate)),
            ("r", AudioBuffer(np.stack([zeros, right.samples[0]]), buf.sample_rate)),
            ("c", center),
        )
        for name, part in stems:
            path = out_dir / f"{stem}.{name}.wav"
            write_wav(path, part, args.format)
            files.append((str(path), _energy_db(part.samples, in_energy)))
    if args.json:
        _print_record(
            {"mode": cfg.mode, "files": [f for f, _ in files],
             "energy_db": {Path(f).name: _json_safe(e) for f, e in files}}
        )
    else:
        for path, e_db in files:
            print(f"{path}  energy {e_db:+.2f} dB re input")
    return 0


def cmd_upmix(args) -> int:
    buf = _read_stereo(args.input)
    if not 0 <= args.dial < NUM_DIAL_POSITIONS:
        raise UsageError(f"dial must be 0..{NUM_DIAL_POSITIONS - 1}")
    cfg = _pipeline_config(args, target=args.target_lufs
                           if args.target_lufs is not None else MATCH_INPUT)
    quad = upmix_render(buf, args.dial, cfg)
    audio = to_5_1(quad.audio) if args.layout == "5.1" else quad.audio
    out = Path(args.output or f"{Path(args.input).stem}.dial{args.dial:02d}.wav")
    write_wav(out, audio, args.format)
    record = {
        "rfr_db": quad.rfr_db,
        "loudness_lufs": quad.loudness_lufs,
        "norm_gain_db": quad.norm_gain_db,
        "dial_index": args.dial,
    }
    if args.json:
        _print_record({**record, "output": str(out)})
    else:
        print(f"wrote {out}")
        print(f"RFR: {quad.rfr_db:.2f} dB")
        print(f"loudness: {quad.loudness_lufs:.2f} LUFS")
        print(f"normalization gain: {quad.norm_gain_db:+.2f} dB")
    return 0


def cmd_rfr(args) -> int:
    buf = read_wav(args.input)
    if buf.channels == 6:
        buf = AudioBuffer(buf.samples[[0, 1, 4, 5]], buf.sample_rate, QUAD)
    elif buf.channels != 4:
        raise UsageError("4-channel FL,FR,SL,SR (or 5.1) input required")
    value = rfr(buf)
    if args.json:
        _print_record({"rfr_db": value})
    else:
        print(f"RFR: {value:.2f} dB" if np.isfinite(value) else f"RFR: {value} dB")
    return 0


def cmd_loudness(args) -> int:
    buf = read_wav(args.input)
    value = integrated_loudness(buf)
    if args.json:
        _print_record({"loudness_lufs": value})
    else:
        print(f"loudness: {value:.2f} LUFS" if np.isfinite(value)
              else f"loudness: {value} LUFS")
    return 0


def cmd_report(args) -> int:
    buf = _read_stereo(args.input)
    cfg = _pipeline_config(args)
    result = dial_sweep_report(buf, args.output or ".", Path(args.input).stem, cfg)
    if args.json:
        rows = [{k: _json_safe(v) for k, v in r.items()} for r in result["rows"]]
        _print_record({"csv": result["csv"], "figure": result["figure"], "rows": rows})
    else:
        print(f"wrote {result['csv']}")
        print(f"wrote {result['figure']}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _pipeline_config(args)
    try:
        app = create_app(args.items, log_path=args.log, cfg=cfg, ui_dir=args.ui)
    except RuntimeError as exc:
        raise UsageError(str(exc)) from exc
    port = args.port or int(os.environ.get(DEFAULT_PORT_ENV, "8732"))
    print(f"serving audition loop on http://{args.host}:{port}", file=sys.stderr)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padmix",
        description="Primary-ambient decomposition and stereo-to-quad up-mixing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split stereo into primary/ambient or l/r/c")
    p.add_argument("input")
    p.add_argument("--mode", choices=("pad", "ce"), default=None)
    p.add_argument("-o", "--output", default=None, help="output directory")
    p.add_argument("--format", choices=("pcm16", "pcm24", "float32"), default="float32")
    p.add_argument("--json", action="store_true")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("upmix", help="render one dial position to quad or 5.1")
    p.add_argument("input")
    p.add_argument("--dial", type=int, required=True, help="dial position 0..30")
    p.add_argument("--layout", choices=("quad", "5.1"), default="quad")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--target-lufs", type=float, default=None,
                   help="normalization target (default: match input loudness)")
    p.add_argument("--format", choices=("pcm16", "pcm24", "float32"), default="float32")
    p.add_argument("--json", action="store_true")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_upmix)

    p = sub.add_parser("rfr", help="rear-to-front energy ratio of a quad file")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_rfr)

    p = sub.add_parser("loudness", help="BS.1770 integrated loudness of a file")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_loudness)

    p = sub.add_parser("report", help="sweep all 31 dials; write CSV and figure")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None, help="output directory")
    p.add_argument("--json", action="store_true")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the interactive audition service")
    p.add_argument("--items", required=True, help="directory of stereo WAV items")
    p.add_argument("--port", type=int, default=None,
                   help=f"HTTP port (default ${DEFAULT_PORT_ENV} or 8732)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--log", default=None, help="session log path (JSONL)")
    p.add_argument("--ui", default=None, help="directory with the built browser UI")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AudioFileError, LoudnessError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
