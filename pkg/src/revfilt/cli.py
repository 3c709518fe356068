"""Batch command-line front end.

Each input file is processed independently; one JSON object per file is
written to stdout. The exit status is 0 only if every file succeeded.

    revfilt llie dark/*.png --p auto --out-dir bright/
    revfilt dehaze hazy.png -o clear.png --clahe
    revfilt enhance dehazed.png --no-stretch
    revfilt filter amf step.png --sigma-s 4 --sigma-r 0.2 --rgb
    revfilt metrics a.png b.png --psnr
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
import time
from pathlib import Path
from typing import Callable

from .enhance import (
    ClarifyParams,
    LlieParams,
    apply_to_value,
    clarify_pipeline,
    enhance_gf,
    im_beam,
    percentile_stretch,
    psnr,
    resolve_p,
)
from .filters import (
    ClaheParams,
    EdgeAwareParams,
    GuidedFilterParams,
    box_filter,
    clahe,
    edge_aware_smooth,
    gaussian_blur,
    guided_filter,
)
from .image import RgbImage, mean_value, rgb_to_hsv
from .io import ImageIOError, load_image, save_image

FILTERS = ("guided", "amf", "clahe", "box", "gaussian")
OUTPUT_EXTENSIONS = (".png", ".ppm")


class UsageError(Exception):
    pass


def _stretch_arg(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <lo>,<hi>, got {text!r}") from None
    if not 0 <= lo < hi <= 100:
        raise argparse.ArgumentTypeError(f"need 0 <= lo < hi <= 100, got {text!r}")
    return lo, hi


def _p_arg(text: str) -> float | str:
    if text == "auto":
        return text
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--p must be a real in (0, 1] or 'auto', got {text!r}") from None
    if not 0 < p <= 1:
        raise argparse.ArgumentTypeError(f"--p must lie in (0, 1], got {p}")
    return p


def _positive(kind):
    def parse(text: str):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a {kind.__name__}, got {text!r}") from None
        if not value > 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
        return value
    return parse


def _non_negative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative value, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revfilt",
        description="Reverse-filtering low-light brightening and haze clarification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p):
        p.add_argument("inputs", nargs="+", help="input PNG/PPM files or glob patterns")
        group = p.add_mutually_exclusive_group()
        group.add_argument("-o", dest="output", metavar="PATH",
                           help="output file (single input only)")
        group.add_argument("--out-dir", metavar="PATH",
                           help="directory for <stem>.<command>.png outputs")

    def guided(p):
        p.add_argument("--radius", type=_positive(int), default=2, help="window radius (default 2)")
        p.add_argument("--eps", type=_positive(float), default=0.01,
                       help="guided filter regulariser (default 0.01)")

    def stretch(p, default):
        p.add_argument("--stretch", type=_stretch_arg, default=default, metavar="LO,HI",
                       help="percentile stretch bounds" + (f" (default {default[0]:g},{default[1]:g})"
                                                          if default else ""))
        p.add_argument("--no-stretch", action="store_true", help="skip the percentile stretch")

    llie = sub.add_parser("llie", help="brighten low-light images")
    outputs(llie)
    llie.add_argument("--p", type=_p_arg, default="auto", help="exponent in (0, 1] or 'auto'")
    llie.add_argument("--r", type=_non_negative, default=0.01, help="regulariser (default 0.01)")
    llie.add_argument("--clahe", action="store_true", help="apply CLAHE to the value channel")
    guided(llie)
    stretch(llie, None)

    dehaze = sub.add_parser("dehaze", help="clarify hazy, sand-dust or underwater images")
    outputs(dehaze)
    dehaze.add_argument("--sigma-s", type=_positive(float), default=20.0)
    dehaze.add_argument("--sigma-r", type=_positive(float), default=0.4)
    dehaze.add_argument("--clahe", action="store_true", help="apply CLAHE after the first stage")
    dehaze.add_argument("--no-gf-stage", action="store_true", help="skip the guided-filter stage")
    guided(dehaze)
    stretch(dehaze, (1.0, 99.0))

    enhance = sub.add_parser("enhance", help="guided-filter inverse-sqrt enhancement only")
    outputs(enhance)
    guided(enhance)
    stretch(enhance, (1.0, 99.0))

    filt = sub.add_parser("filter", help="run one filter on the value channel")
    filt.add_argument("name", choices=FILTERS)
    outputs(filt)
    guided(filt)
    filt.add_argument("--sigma-s", type=_positive(float), default=20.0,
                      help="spatial sigma (amf) or blur sigma (gaussian)")
    filt.add_argument("--sigma-r", type=_positive(float), default=0.4, help="range sigma (amf)")
    filt.add_argument("--rgb", action="store_true", help="amf: filter RGB jointly, not V")

    metrics = sub.add_parser("metrics", help="compare two images")
    metrics.add_argument("a")
    metrics.add_argument("b")
    metrics.add_argument("--psnr", action="store_true", default=True,
                         help="report PSNR in dB (default)")
    return parser


def _stretch_bounds(args) -> tuple[float, float] | None:
    return None if args.no_stretch else args.stretch


def build_job(args) -> Callable[[RgbImage], tuple[RgbImage, dict]]:
    """Return the library composition a command runs on one decoded image."""
    gf = GuidedFilterParams(args.radius, args.eps)
    stretch = _stretch_bounds(args) if hasattr(args, "no_stretch") else None

    if args.command == "llie":
        auto = args.p == "auto"
        llie = LlieParams(p=1.0 if auto else args.p, r=args.r, auto_p=auto)

        def run(img):
            p = resolve_p(llie, rgb_to_hsv(img).v)
            out = im_beam(img, LlieParams(p=p, r=llie.r, auto_p=False), gf)
            if args.clahe:
                out = apply_to_value(out, lambda v: clahe(v, ClaheParams()))
            if stretch is not None:
                out = percentile_stretch(out, *stretch)
            return out, {"p": p, "p_auto": auto}
        return run

    if args.command == "dehaze":
        params = ClarifyParams(
            sigma_s=args.sigma_s, sigma_r=args.sigma_r, use_clahe=args.clahe,
            stretch=stretch is not None,
            stretch_lo=stretch[0] if stretch else 1.0,
            stretch_hi=stretch[1] if stretch else 99.0,
            apply_gf_stage=not args.no_gf_stage, gf=gf)
        return lambda img: (clarify_pipeline(img, params), {})

    if args.command == "enhance":
        return lambda img: (enhance_gf(img, gf, stretch), {})

    if args.command == "filter":
        eap = EdgeAwareParams(args.sigma_s, args.sigma_r)
        if args.name == "amf" and args.rgb:
            return lambda img: (edge_aware_smooth(img, eap), {})
        plane_filters = {
            "guided": lambda v: guided_filter(v, v, gf),
            "amf": lambda v: edge_aware_smooth(v, eap),
            "clahe": lambda v: clahe(v, ClaheParams()),
            "box": lambda v: box_filter(v, args.radius),
            "gaussian": lambda v: gaussian_blur(v, args.sigma_s),
        }
        fn = plane_filters[args.name]
        return lambda img: (apply_to_value(img, fn), {})

    raise UsageError(f"no image job for command {args.command!r}")


def expand_inputs(patterns: list[str]) -> list[str]:
    """Expand glob patterns; literal paths and non-matching patterns pass through."""
    out = []
    for pattern in patterns:
        if Path(pattern).exists() or not glob.has_magic(pattern):
            out.append(pattern)
            continue
        matches = sorted(glob.glob(pattern))
        out.extend(matches if matches else [pattern])
    return out


def output_path(input_path: str, args) -> Path:
    if args.output:
        return Path(args.output)
    src = Path(input_path)
    tag = args.command if args.command != "filter" else f"filter-{args.name}"
    directory = Path(args.out_dir) if args.out_dir else src.parent
    return directory / f"{src.stem}.{tag}.png"


def _validate(args, inputs: list[str]) -> None:
    if args.output:
        if len(inputs) != 1:
            raise UsageError("-o requires exactly one input; use --out-dir for batches")
        if Path(args.output).suffix.lower() not in OUTPUT_EXTENSIONS:
            raise UsageError(f"-o must end in one of {OUTPUT_EXTENSIONS}")
    if args.out_dir and Path(args.out_dir).exists() and not Path(args.out_dir).is_dir():
        raise UsageError(f"--out-dir {args.out_dir} is not a directory")
    if args.command == "filter" and args.rgb and args.name != "amf":
        raise UsageError("--rgb is only meaningful for 'filter amf'")


def process_file(path: str, job, args) -> dict:
    start = time.perf_counter()
    record = {"command": args.command, "input": path}
    try:
        img = load_image(path)
        out, extra = job(img)
        dest = output_path(path, args)
        dest.parent.mkdir(parents=True, exist_ok=True)
        save_image(out, dest)
    except (ImageIOError, ValueError, OSError) as exc:
        record.update(status="error", error=f"{type(exc).__name__}: {exc}")
    else:
        record.update(
            status="ok",
            output=str(dest),
            mean_v_before=mean_value(rgb_to_hsv(img).v),
            mean_v_after=mean_value(rgb_to_hsv(out).v),
            **extra)
    record["wall_time_s"] = round(time.perf_counter() - start, 6)
    return record


def _emit(record: dict, stream) -> None:
    stream.write(json.dumps(record) + "\n")
    stream.flush()


def run_metrics(args, stream) -> int:
    record = {"command": "metrics", "a": args.a, "b": args.b}
    try:
        a, b = load_image(args.a), load_image(args.b)
        record.update(status="ok", psnr_db=psnr(a, b),
                      mean_v_a=mean_value(rgb_to_hsv(a).v),
                      mean_v_b=mean_value(rgb_to_hsv(b).v))
    except (ImageIOError, ValueError) as exc:
        record.update(status="error", error=f"{type(exc).__name__}: {exc}")
    _emit(record, stream)
    return 0 if record["status"] == "ok" else 1


def main(argv: list[str] | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "metrics":
        return run_metrics(args, stream)

    inputs = expand_inputs(args.inputs)
    try:
        _validate(args, inputs)
        job = build_job(args)
    except (UsageError, ValueError) as exc:
        parser.error(str(exc))

    failed = 0
    for path in inputs:
        record = process_file(path, job, args)
        if record["status"] != "ok":
            failed += 1
            print(f"revfilt: {path}: {record['error']}", file=sys.stderr)
        _emit(record, stream)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
