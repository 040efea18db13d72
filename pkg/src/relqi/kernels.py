"""Backend selection for the occupation-basis kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation is used. ``use_backend`` switches explicitly (tests and the
benchmark compare both).
"""

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _compiled if _compiled is not None else _kernels_py


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    """Select ``"compiled"`` or ``"python"``; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def occupation_table(dims):
    return _active.occupation_table(tuple(int(d) for d in dims))


def ladder_coo(dims, mode, create, fermionic):
    return _active.ladder_coo(tuple(int(d) for d in dims), int(mode), bool(create), bool(fermionic))


def ladder_apply(amps, dims, mode, create, fermionic):
    return _active.ladder_apply(amps, tuple(int(d) for d in dims), int(mode), bool(create), bool(fermionic))
