"""Publication-style figures from ratelab result CSVs.

Strictly presentation: every number on an axis is read straight out of a
CSV cell, never recomputed.  One script per figure kind (bars, hist,
scatter, line); all of them funnel into :func:`figscripts.core.render`.
"""
from .core import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render"]
