"""Figure renderer for pqfi sweep CSVs; all physics stays upstream."""

from .figures import FigureJob, RenderError, RenderResult, render

__version__ = "0.1.0"

__all__ = ["FigureJob", "RenderError", "RenderResult", "render", "__version__"]
