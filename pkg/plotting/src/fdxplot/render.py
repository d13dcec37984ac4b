"""Turn one sweep CSV into one rendered figure.

The input is the simulator's frozen 9-column CSV (schema header checked
up front).  Each distinct value of the series column becomes one line
with symmetric error bars from its stderr column; axes are labeled from
the figure spec and the y axis may be log-scaled (estimation-MSE plots).
Inputs are only ever read; rendering identical inputs yields identical
image bytes.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import matplotlib
import matplotlib.pyplot as plt

from .style import PNG_METADATA, RC_PARAMS, series_style

EXPECTED_SCHEMA = "fdxsim sweep schema v1"

# the only y quantities the frozen schema carries, with their errors
Y_COLUMNS = {"mean_rate": "stderr_rate", "mean_mse": "stderr_mse"}


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    """What to plot and how to label it."""

    csv_path: str
    out_path: str
    x_label: str
    y_label: str
    y_column: str = "mean_rate"
    series_column: str = "scheme"
    log_y: bool = False
    title: str = ""
    err_column: str = field(init=False, default="")

    def __post_init__(self):
        if self.y_column not in Y_COLUMNS:
            raise RenderError(
                f"y_column must be one of {sorted(Y_COLUMNS)}, got {self.y_column!r}"
            )
        object.__setattr__(self, "err_column", Y_COLUMNS[self.y_column])


def read_rows(csv_path: str) -> list[dict]:
    """Load and validate the sweep CSV; comment lines carry the schema."""
    try:
        with open(csv_path, "r", newline="") as fh:
            first = fh.readline().strip()
            if not first.startswith("#") or EXPECTED_SCHEMA not in first:
                raise RenderError(
                    f"{csv_path}: expected schema marker '{EXPECTED_SCHEMA}', "
                    f"got {first!r}"
                )
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise RenderError(f"cannot read {csv_path}: {exc}")
    if not rows:
        raise RenderError(f"{csv_path}: no data rows")
    return rows


def _column(rows: list[dict], name: str, csv_path: str) -> list[str]:
    out = []
    for row in rows:
        if name not in row or row[name] is None:
            raise RenderError(f"{csv_path}: missing column '{name}'")
        out.append(row[name])
    return out


def build_figure(spec: FigureSpec) -> "matplotlib.figure.Figure":
    """Assemble the figure without writing it (inspectable by tests)."""
    rows = read_rows(spec.csv_path)
    for needed in ("value", spec.series_column, spec.y_column, spec.err_column):
        _column(rows, needed, spec.csv_path)

    series: dict[str, list[tuple[float, float, float]]] = {}
    for row in rows:
        label = row[spec.series_column]
        series.setdefault(label, []).append(
            (float(row["value"]), float(row[spec.y_column]), float(row[spec.err_column]))
        )

    with matplotlib.rc_context(RC_PARAMS):
        fig, ax = plt.subplots()
        for label, points in series.items():  # first-appearance order
            points.sort(key=lambda p: p[0])
            xs, ys, errs = zip(*points)
            ax.errorbar(
                xs, ys, yerr=errs, label=label, capsize=2.5, **series_style(label)
            )
        if spec.log_y:
            ax.set_yscale("log")
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
        if spec.title:
            ax.set_title(spec.title)
        ax.legend()
        fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    """Render the figure to ``spec.out_path``; returns the path written.

    The output is produced only after the input validates, so a bad CSV
    never leaves an empty or stale image behind.
    """
    fig = build_figure(spec)
    try:
        out_dir = os.path.dirname(os.path.abspath(spec.out_path))
        os.makedirs(out_dir, exist_ok=True)
        metadata = PNG_METADATA if spec.out_path.endswith(".png") else None
        fig.savefig(spec.out_path, metadata=metadata)
    finally:
        plt.close(fig)
    return spec.out_path
