"""Figure rendering for circuit-harmonic-matrix pipeline reports."""

from .render import FIGURE_KINDS, FigureSpec, SchemaError, load_report, render

__version__ = "0.1.0"

__all__ = ["FIGURE_KINDS", "FigureSpec", "SchemaError", "load_report", "render"]
