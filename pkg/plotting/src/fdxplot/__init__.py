"""Figure rendering for fdxsim sweep CSVs."""

from .render import FigureSpec, RenderError, build_figure, render

__all__ = ["FigureSpec", "RenderError", "build_figure", "render"]
