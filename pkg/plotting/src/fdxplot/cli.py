"""fdxplot render: one sweep CSV in, one figure out.

Exit status 0 on success; 1 for any spec/CSV problem, with the message
naming the offending file or column.
"""

from __future__ import annotations

import argparse
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from .render import FigureSpec, RenderError, render

_SPEC_KEYS = {
    "csv", "out", "x_label", "y_label", "y_column",
    "series_column", "log_y", "title",
}


def load_figure_spec(path: str, csv_override: str | None,
                     out_override: str | None) -> FigureSpec:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise RenderError(f"figure spec not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise RenderError(f"figure spec {path} is not valid TOML: {exc}")

    unknown = sorted(set(raw) - _SPEC_KEYS)
    if unknown:
        raise RenderError(f"unknown keys in {path}: {', '.join(unknown)}")

    csv_path = csv_override or raw.get("csv")
    out_path = out_override or raw.get("out")
    if not csv_path:
        raise RenderError("no input CSV given (spec 'csv' key or --csv)")
    if not out_path:
        raise RenderError("no output path given (spec 'out' key or --out)")
    return FigureSpec(
        csv_path=csv_path,
        out_path=out_path,
        x_label=raw.get("x_label", "value"),
        y_label=raw.get("y_label", raw.get("y_column", "mean_rate")),
        y_column=raw.get("y_column", "mean_rate"),
        series_column=raw.get("series_column", "scheme"),
        log_y=bool(raw.get("log_y", False)),
        title=raw.get("title", ""),
    )


def spec_path(name: str) -> str:
    """Path of a bundled figure spec (fig2.toml / fig3.toml / fig4.toml)."""
    return os.path.join(os.path.dirname(__file__), "specs", name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdxplot", description="Render fdxsim sweep CSVs as figures."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one CSV per a figure spec")
    p_render.add_argument("--csv", help="input sweep CSV (overrides spec)")
    p_render.add_argument("--spec", required=True, help="figure spec (TOML)")
    p_render.add_argument("--out", help="output image path (overrides spec)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_figure_spec(args.spec, args.csv, args.out)
        written = render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {written}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
