"""Fixed plot styling, chosen to echo the source figures.

Tap-budget curves get one marker each (circle/square/triangle for
4/8/16), ideal-CSI references are dotted, and the half-duplex baseline
is a dashed black line.  Everything here is cosmetic; nothing downstream
reads it back.  The style is deliberately frozen (no timestamps, fixed
sizes, Agg backend) so re-rendering identical data reproduces identical
bytes.
"""

import matplotlib

matplotlib.use("Agg")

RC_PARAMS = {
    "figure.figsize": (6.4, 4.6),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.35,
    "grid.linestyle": ":",
    "lines.linewidth": 1.6,
    "lines.markersize": 5,
    "legend.fontsize": 9,
    "legend.framealpha": 0.9,
    "svg.hashsalt": "fdxplot",
}

# one stable look per known series label; anything else falls back to
# the default color cycle with plain solid lines
SERIES_STYLE = {
    "fd_n4": {"color": "tab:blue", "marker": "o", "linestyle": "-"},
    "fd_n8": {"color": "tab:orange", "marker": "s", "linestyle": "-"},
    "fd_n16": {"color": "tab:green", "marker": "^", "linestyle": "-"},
    "fd": {"color": "tab:blue", "marker": "o", "linestyle": "-"},
    "fd_ideal_n8": {"color": "tab:purple", "marker": "", "linestyle": ":"},
    "fd_ideal_n16": {"color": "tab:red", "marker": "", "linestyle": ":"},
    "fd_ideal": {"color": "tab:red", "marker": "", "linestyle": ":"},
    "hd": {"color": "black", "marker": "x", "linestyle": "--"},
}

PNG_METADATA = {"Software": "fdxplot"}


def series_style(label: str) -> dict:
    return dict(SERIES_STYLE.get(label, {"linestyle": "-"}))
