"""Drawdown magnitude and duration for Lévy processes.

Analytic transforms (scale functions, ladder exponents, Kendall-type
duration formulas) together with a Monte Carlo engine that estimates the
same quantities from simulated paths.
"""

from importlib.metadata import PackageNotFoundError, version

from .levy_models import (ConvergenceError, DomainError, LevyModel, ModelError, PRESETS,
                          brownian, kou, preset, sn_compound_poisson, sn_gamma, stable)
from .scale_fn import ScaleFunction
from .magnitude import DrawdownQuery, quadruple_lt
from .ladder import build_ladder
from .duration import duration_lt, example_closed_form

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "DomainError", "LevyModel", "ModelError", "PRESETS",
    "brownian", "kou", "preset", "sn_compound_poisson", "sn_gamma", "stable",
    "ScaleFunction", "DrawdownQuery", "quadruple_lt", "build_ladder",
    "duration_lt", "example_closed_form", "__version__",
]
