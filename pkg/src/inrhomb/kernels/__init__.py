"""Batched numeric kernels for gauge evaluation and line/body intersection.

Two interchangeable backends:

* ``_core`` -- Cython extension, used when the compiled module importable.
* ``pure``  -- vectorised numpy implementation with identical semantics.

Set the environment variable ``INRHOMB_PURE=1`` to force the fallback
(useful for benchmarking and for installs without a C compiler).

All kernels operate on a flattened body: ``K`` strictly convex leaves, leaf
``k`` contributing ``sum_i |(A_k (x - c_k))_i| ** q_k`` to the gauge, the
gauge being the max over leaves.  ``A_k`` already folds the inverse
semi-axes into the inverse rotation.
"""

import os

BACKEND: str

if os.environ.get("INRHOMB_PURE", "").strip() not in ("", "0"):
    from . import pure as _impl
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl
        BACKEND = "pure"

from . import pure  # always importable, e.g. for benchmarks

gauge_many = _impl.gauge_many
chord_many = _impl.chord_many
ray_many = _impl.ray_many
clamp_many = _impl.clamp_many

# chord_many status codes
EMPTY, TANGENT, CHORD, BRACKET_ERROR = 0, 1, 2, 3

__all__ = [
    "BACKEND", "gauge_many", "chord_many", "ray_many", "clamp_many",
    "EMPTY", "TANGENT", "CHORD", "BRACKET_ERROR", "pure",
]
