"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``ECOLINK_PURE_KERNELS=1`` to force the fallback (used by tests and the
benchmark to compare both implementations).
"""

from __future__ import annotations

import os

from ecolink._kernels import _pykernels
from ecolink._kernels._pykernels import l2_normalize

if os.environ.get("ECOLINK_PURE_KERNELS") == "1":
    _impl = _pykernels
else:
    try:
        from ecolink._kernels import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

IMPLEMENTATION = "cython" if _impl.__name__.endswith("_ckernels") else "python"

fnv1a64 = _impl.fnv1a64
hash_embed = _impl.hash_embed
matvec_scores = _impl.matvec_scores

__all__ = ["IMPLEMENTATION", "fnv1a64", "hash_embed", "l2_normalize", "matvec_scores"]
