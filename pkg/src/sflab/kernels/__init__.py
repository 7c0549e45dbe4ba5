"""Kernel lane selection.

The package ships two interchangeable implementations of its hot loops: a
compiled Cython extension (_speed) and a pure-Python reference (_ref) that
the extension mirrors operation for operation. The compiled lane is used
when it imported cleanly; setting SFLAB_PURE=1 in the environment forces
the reference lane. Everything downstream imports names from this module
and never touches the lanes directly.
"""

import os

from . import _ref

STATUS_BUDGET = _ref.STATUS_BUDGET
STATUS_ESCAPED = _ref.STATUS_ESCAPED
STATUS_CYCLE = _ref.STATUS_CYCLE
STATUS_OVERFLOW = _ref.STATUS_OVERFLOW
STATUS_LEFT_TRUST = _ref.STATUS_LEFT_TRUST

if os.environ.get("SFLAB_PURE"):
    _impl = _ref
    LANE = "pure"
else:
    try:
        from . import _speed as _impl
        LANE = "compiled"
    except ImportError:
        _impl = _ref
        LANE = "pure"

horner = _impl.horner
series_orbit = _impl.series_orbit
escape_grid = _impl.escape_grid
schroeder_core = _impl.schroeder_core


def lane() -> str:
    """Which implementation is active: 'compiled' or 'pure'."""
    return LANE


def reference_module():
    """The pure lane, always importable (used by the parity tests)."""
    return _ref


def active_module():
    return _impl
