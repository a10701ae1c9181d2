"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``_cykernels``) is preferred when importable; set
``PROXMINE_BACKEND=python`` or ``PROXMINE_BACKEND=cython`` to force a
backend.  ``BACKEND`` names the one in use.
"""

import os

from ._pykernels import AT_LEAST_ONE_PHRASE, PHRASE_PHRASE_ONLY

_forced = os.environ.get("PROXMINE_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _pykernels as _impl

    BACKEND = "python"
elif _forced == "cython":
    from . import _cykernels as _impl  # noqa: F401  (ImportError is the diagnostic)

    BACKEND = "cython"
else:
    try:
        from . import _cykernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"

accumulate_pairs = _impl.accumulate_pairs
estep_s = _impl.estep_s
estep_l = _impl.estep_l

__all__ = [
    "BACKEND",
    "AT_LEAST_ONE_PHRASE",
    "PHRASE_PHRASE_ONLY",
    "accumulate_pairs",
    "estep_s",
    "estep_l",
]
