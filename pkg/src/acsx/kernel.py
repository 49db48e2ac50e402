"""Scan kernel selection.

Two interchangeable kernels drive the scanner: a compiled one (Cython) and
a pure-python one.  Selection order: explicit argument, then the
ACSX_KERNEL environment variable ("c", "py", or "auto"), then auto.  The
compiled kernel additionally needs the dense transition bitmap, which the
navigation cache only builds for moderate alphabet*vertex products; when
it is unavailable the auto mode silently uses the python kernel.
"""

import os


def _compiled_run():
    from . import _scan_kernel
    return _scan_kernel.run_scan


def compiled_available():
    try:
        _compiled_run()
        return True
    except ImportError:
        return False


def select_kernel(nav, preference=None):
    """Return (name, run_scan callable) for the given navigation cache."""
    pref = preference or os.environ.get("ACSX_KERNEL", "auto")
    if pref not in ("auto", "c", "py"):
        raise ValueError("unknown kernel %r (want auto, c, or py)" % (pref,))
    if pref == "py":
        from . import _scan_kernel_py
        return "py", _scan_kernel_py.run_scan
    if pref == "c":
        if not nav.dense:
            raise RuntimeError("compiled kernel needs the dense transition "
                               "bitmap; this index is too wide for it")
        return "c", _compiled_run()
    if nav.dense and compiled_available():
        return "c", _compiled_run()
    from . import _scan_kernel_py
    return "py", _scan_kernel_py.run_scan
