"""Numerical kernels behind the geometry and projection routines.

The compiled extension ``_core`` is used when it was built; otherwise the
NumPy implementation in ``_fallback`` is loaded. Setting the environment
variable ``BANACHVI_PURE_PYTHON=1`` forces the fallback.
"""

import os

if os.environ.get("BANACHVI_PURE_PYTHON", "") not in ("", "0"):
    from ._fallback import (BACKEND, box_halfspace_solve, duality_map,
                            lp_norm, quad_resolvent_scan, separable_solve)
else:
    try:
        from ._core import (BACKEND, box_halfspace_solve, duality_map,
                            lp_norm, quad_resolvent_scan, separable_solve)
    except ImportError:
        from ._fallback import (BACKEND, box_halfspace_solve, duality_map,
                                lp_norm, quad_resolvent_scan, separable_solve)

__all__ = [
    "BACKEND",
    "box_halfspace_solve",
    "duality_map",
    "lp_norm",
    "quad_resolvent_scan",
    "separable_solve",
]
