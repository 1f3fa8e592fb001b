"""Hot loops, compiled when the extension is built and pure Python otherwise.

The backend is chosen once at import.  Setting ``HPSIG_PURE_PYTHON=1`` forces
the fallback.  Both implementations stay importable so that tests and the
benchmark can compare them directly.
"""

import os

from . import _pykernels as python

try:
    if os.environ.get("HPSIG_PURE_PYTHON"):
        raise ImportError("pure-python backend forced")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

rank_mod_p = _impl.rank_mod_p
propagate_orientation = _impl.propagate_orientation

__all__ = ["BACKEND", "compiled", "python", "rank_mod_p", "propagate_orientation"]
