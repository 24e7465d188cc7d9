"""Kernel backend selection.

The compiled extension is used when present; the numpy fallback otherwise.
Set FBSDELAB_PURE=1 to force the fallback (the benchmark uses this).  Both
backends are bit-identical, so the choice never changes numeric output.
"""

import os

if os.environ.get("FBSDELAB_PURE"):
    from . import _fallback as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND: str = _impl.BACKEND
catmull_rom_1d = _impl.catmull_rom_1d
catmull_rom_2d = _impl.catmull_rom_2d
invert_shift_1d = _impl.invert_shift_1d
invert_shift_2d = _impl.invert_shift_2d

__all__ = [
    "BACKEND",
    "catmull_rom_1d",
    "catmull_rom_2d",
    "invert_shift_1d",
    "invert_shift_2d",
]
