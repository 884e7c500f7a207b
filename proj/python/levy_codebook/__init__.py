"""Levy-codebook option surface models.

Thin python layer over the C++ core: characteristic exponents, codebook
surfaces, Fourier pricing in both directions, pathwise evolution of the
codebook and risk-neutrality checks.
"""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
    from . import _core as core
except ImportError:  # pragma: no cover - in-tree builds put _core on sys.path
    from _core import *  # noqa: F401,F403
    import _core as core

__all__ = [name for name in dir(core) if not name.startswith("_")]
__version__ = "0.1.0"
