"""Command line interface.

    texpack <input.obj> -o <dir> [--resolution N] [--weights cotangent|uniform]
            [--auto-fallback] [--filter nearest|bilinear] [--max-hole-edges N]
            [--handle-threshold F] [--aspect W:H] [--threads N] [--report out.json]

The report path additionally gets a CSV with the same per-component numbers
and rendered UV-layout figures (disable with --no-figures).
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import report as report_mod
from .pipeline import PipelineConfig, PipelineError, run


def _parse_aspect(text):
    try:
        w, h = text.split(":")
        w, h = float(w), float(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"aspect must look like W:H, got {text!r}")
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("aspect components must be positive")
    return (w, h)


def build_parser():
    p = argparse.ArgumentParser(
        prog="texpack",
        description="Rebuild a fragmented texture atlas as one dense square "
                    "texture per component via harmonic parameterization.")
    p.add_argument("input", help="input OBJ file (positions, UVs, materials)")
    p.add_argument("-o", "--output", required=True, metavar="DIR",
                   help="output directory")
    p.add_argument("--resolution", type=int, default=4096, metavar="N",
                   help="output texture resolution of the longer side "
                        "(default 4096)")
    p.add_argument("--weights", choices=("cotangent", "uniform"),
                   default="cotangent", help="harmonic edge-weight scheme")
    p.add_argument("--auto-fallback", action="store_true",
                   help="retry with uniform weights when the cotangent solve "
                        "produces flipped triangles")
    p.add_argument("--filter", choices=("nearest", "bilinear"),
                   default="bilinear", help="source sampling filter")
    p.add_argument("--max-hole-edges", type=int, default=100, metavar="N",
                   help="fill boundary loops up to this many edges (default 100)")
    p.add_argument("--handle-threshold", type=float, default=0.02, metavar="F",
                   help="remove handles whose loop is shorter than this "
                        "fraction of the bbox diagonal (default 0.02)")
    p.add_argument("--solver-tol", type=float, default=1e-10, metavar="TOL",
                   help="relative tolerance of the conjugate-gradient solve "
                        "(default 1e-10)")
    p.add_argument("--aspect", type=_parse_aspect, default=(1.0, 1.0),
                   metavar="W:H", help="stretch the unit-square map onto a "
                                       "W:H texture rectangle")
    p.add_argument("--threads", type=int, default=1, metavar="N",
                   help="worker threads across components (default 1)")
    p.add_argument("--supersample", type=int, choices=(1, 2, 4), default=1,
                   help="box-filtered supersampling factor")
    p.add_argument("--rgba", action="store_true",
                   help="keep the alpha channel in output textures")
    p.add_argument("--no-denoise", action="store_true",
                   help="skip small-handle removal")
    p.add_argument("--no-fill", action="store_true",
                   help="skip small-hole filling")
    p.add_argument("--report", metavar="OUT.JSON", default=None,
                   help="write a JSON report (plus CSV and figures) here")
    p.add_argument("--no-figures", action="store_true",
                   help="skip the rendered figures next to the report")
    p.add_argument("--stem", default=None,
                   help="base name for output files (default: input name "
                        "+ '_packed')")
    p.add_argument("-v", "--verbose", action="store_true",
                   help="verbose logging")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    config = PipelineConfig(
        input_path=args.input,
        output_dir=args.output,
        resolution=args.resolution,
        weights=args.weights,
        auto_fallback=args.auto_fallback,
        filter=args.filter,
        max_hole_edges=args.max_hole_edges,
        handle_threshold=args.handle_threshold,
        solver_tol=args.solver_tol,
        aspect=args.aspect,
        threads=args.threads,
        supersample=args.supersample,
        rgba=args.rgba,
        denoise=not args.no_denoise,
        fill_holes=not args.no_fill,
        report_path=args.report,
        figures=not args.no_figures,
        stem=args.stem,
    )
    try:
        result = run(config)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(report_mod.human_summary(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
