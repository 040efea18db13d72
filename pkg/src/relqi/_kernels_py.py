"""Pure-Python (numpy) occupation-basis kernels.

Same interface as the compiled ``_kernels`` extension. The basis is the
row-major enumeration of occupation tuples with mode 0 most significant;
``dims[i]`` is the number of occupation levels of mode ``i``. Fermionic
signs follow Jordan-Wigner ordering by mode position.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _occupations(dims):
    occ = np.array(list(np.ndindex(*dims)), dtype=np.int64).reshape(-1, len(dims))
    occ.setflags(write=False)  # shared through the cache
    return occ


def occupation_table(dims):
    return _occupations(tuple(int(d) for d in dims))


def _strides(dims):
    strides = np.ones(len(dims), dtype=np.int64)
    for i in range(len(dims) - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    return strides


def ladder_coo(dims, mode, create, fermionic):
    """Non-zero entries ``(rows, cols, values)`` of one ladder operator."""
    dims = tuple(int(d) for d in dims)
    occ = _occupations(dims)
    stride = _strides(dims)[mode]
    n = occ[:, mode]
    cols = np.arange(occ.shape[0], dtype=np.int64)
    if create:
        keep = n < dims[mode] - 1
        rows = cols[keep] + stride
        vals = np.sqrt(n[keep] + 1.0)
    else:
        keep = n > 0
        rows = cols[keep] - stride
        vals = np.sqrt(n[keep].astype(float))
    cols = cols[keep]
    vals = vals.astype(complex)
    if fermionic:
        parity = occ[keep, :mode].sum(axis=1) & 1
        vals = np.where(parity == 1, -vals, vals)
    return rows, cols, vals


def ladder_apply(amps, dims, mode, create, fermionic):
    """Apply one ladder operator to a dense amplitude vector.

    Returns ``(out, lost)`` where ``lost`` is the squared norm pushed past a
    bosonic cutoff by a creation operator (zero otherwise).
    """
    dims = tuple(int(d) for d in dims)
    amps = np.asarray(amps, dtype=complex)
    if amps.shape != (int(np.prod(dims)),):
        raise ValueError("amplitude vector does not match dims")
    rows, cols, vals = ladder_coo(dims, mode, create, fermionic)
    out = np.zeros_like(amps)
    out[rows] = vals * amps[cols]
    lost = 0.0
    if create and not fermionic:
        top = dims[mode] - 1
        occ = _occupations(dims)
        edge = occ[:, mode] == top
        lost = float((top + 1) * np.sum(np.abs(amps[edge]) ** 2))
    return out, lost
