"""Stepping kernels with a compiled core and a pure numpy fallback.

The two implementations consume random variates in the same order and use
the same floating-point expression forms, so a given seed produces
bit-identical paths on either backend.  Selection order:

* ``RESBAND_BACKEND=c``  force the compiled kernels (ImportError if missing)
* ``RESBAND_BACKEND=py`` force the numpy fallback
* unset                  compiled if available, fallback otherwise
"""

import os

_forced = os.environ.get("RESBAND_BACKEND", "").strip().lower()
if _forced not in ("", "c", "py"):
    raise ImportError(
        f"RESBAND_BACKEND must be 'c' or 'py' if set, got {_forced!r}"
    )

if _forced == "py":
    from . import pyref as _impl

    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _forced == "c":
            raise
        from . import pyref as _impl  # type: ignore[no-redef]

        BACKEND = "python"

simulate_conditioned = _impl.simulate_conditioned
simulate_crossings = _impl.simulate_crossings

__all__ = ["BACKEND", "simulate_conditioned", "simulate_crossings"]
