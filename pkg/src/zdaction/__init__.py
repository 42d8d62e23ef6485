"""Uniform convergence of periodic-point measures for algebraic Z^d-actions
on S-integer modules.

Typical use::

    from zdaction import config, lyapunov
    pres = config.load_presentation(config.load_document("x2x3")[0])
    L = lyapunov.lyapunov_vectors(pres)
    lyapunov.separation_constant(L, pres).describe()
"""
from .errors import ZdactionError
from .fields import Presentation, parse_presentation

__version__ = "0.1.0"

__all__ = ["Presentation", "ZdactionError", "parse_presentation", "__version__"]
