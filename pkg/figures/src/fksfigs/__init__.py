"""Figure rendering for fkslab run artifacts (CSV in, images out)."""

from .render import FIGURE_KINDS, FigureSpec, SchemaError, build_figure, render

__version__ = "0.1.0"
