"""Figure rendering for simulator CSV outputs."""

__version__ = "0.1.0"

from .figures import (FIGURE_KINDS, FigureSpec, build_figure, render,
                      render_all)
from .samples import SAMPLES_DIR, default_specs, sample_path
