"""Backend selection for the exact arithmetic core.

The compiled extension is preferred when it imported cleanly; set
``TCEKIT_PURE_PYTHON=1`` to force the pure implementation (useful for
debugging and for benchmarking one backend against the other).
"""

import os

if os.environ.get("TCEKIT_PURE_PYTHON"):
    from . import _pure as backend
else:
    try:
        from . import _speedups as backend  # type: ignore[no-redef]
    except ImportError:
        from . import _pure as backend  # type: ignore[no-redef]
