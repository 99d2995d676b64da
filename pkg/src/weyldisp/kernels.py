"""Hot loops, compiled when the extension is available.

Set WEYLDISP_PURE=1 to force the pure-Python implementations.
"""

import os

BACKEND = "python"
if os.environ.get("WEYLDISP_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import flag_spectrum, group_layers, twisted_orbit

        BACKEND = "cython"
    except ImportError:
        pass
if BACKEND == "python":
    from ._pykernels import flag_spectrum, group_layers, twisted_orbit


def enumerate_group(system):
    """All (perm, length) pairs of W, ordered by length."""
    return group_layers([g.perm for g in system.generators], system.simple_index, system.positive_count)


__all__ = ["BACKEND", "enumerate_group", "flag_spectrum", "group_layers", "twisted_orbit"]
