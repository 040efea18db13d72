"""Quadratic mode Hamiltonians, their Heisenberg maps, and Fock-space evolution.

Bosonic form::

    H = a^dagger B a + 1/2 (a^dagger A a^dagger + a A^* a)

with ``B`` Hermitian and ``A`` complex symmetric. Fermionic form over the
tuple ``s = (b_1 .. b_N, d_1^dagger .. d_M^dagger)``::

    H = s^dagger calB s + 1/2 (s^dagger calA s^dagger - s calA^* s)

with ``calB`` Hermitian and ``calA`` antisymmetric. The Heisenberg map
``K(a) = exp(iH) a exp(-iH)`` is ``expm(-i G)`` acting on ``(a, a^dagger)``
where ``G = [[B, A], [-A^*, -B^*]]`` (same layout for the fermionic blocks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components

from .errors import InvalidOverlapError, TruncationError, ValidationError
from .fock import FockState, extend_cutoff, ladder_matrix, restrict_cutoff
from .modes import BogoliubovMap, ModeLabel, default_modes, mode_index, species_kind

HERMITIAN_TOL = 1e-12
OVERLAP_TOL = 1e-8
EVOLVE_MARGIN = 4
TRUNCATION_TOL = 1e-6


def _scaled_tol(*mats) -> float:
    scale = max([1.0] + [float(np.max(np.abs(m))) for m in mats if m.size])
    return HERMITIAN_TOL * scale


def _as_matrix(m, n, name) -> np.ndarray:
    arr = np.zeros((n, n), dtype=complex) if m is None else np.array(m, dtype=complex)
    if arr.shape != (n, n):
        raise ValidationError(f"{name} must be {n}x{n}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def _check_distinct(modes):
    for i, m in enumerate(modes):
        if any(m == other for other in modes[:i]):
            raise ValidationError(f"mode {m!r} listed twice")


def _embed(mat, src_modes, dst_modes):
    idx = [mode_index(dst_modes, m) for m in src_modes]
    out = np.zeros((len(dst_modes), len(dst_modes)), dtype=complex)
    out[np.ix_(idx, idx)] = mat
    return out


def _union(a, b):
    return tuple(a) + tuple(m for m in b if not any(m == x for x in a))


@dataclass(frozen=True, eq=False)
class BosonicBilinearH:
    """Bosonic quadratic Hamiltonian; ``A`` complex symmetric, ``B`` Hermitian."""

    A: np.ndarray
    B: np.ndarray
    modes: tuple

    def __post_init__(self):
        modes = tuple(self.modes)
        if species_kind(modes) != "boson":
            raise ValidationError("bosonic Hamiltonian needs bosonic modes")
        _check_distinct(modes)
        n = len(modes)
        a = _as_matrix(self.A, n, "A")
        b = _as_matrix(self.B, n, "B")
        tol = _scaled_tol(a, b)
        if np.max(np.abs(b - b.conj().T), initial=0.0) > tol:
            raise ValidationError("B must be Hermitian")
        if np.max(np.abs(a - a.T), initial=0.0) > tol:
            raise ValidationError("A must be symmetric")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)

    species = "boson"

    @classmethod
    def zero(cls, modes) -> BosonicBilinearH:
        return cls(None, None, tuple(modes))

    @property
    def number_conserving(self) -> bool:
        return not np.any(self.A)

    def nambu(self) -> np.ndarray:
        """Matrix ``[[B, A], [A^*, B^*]]`` with ``H = 1/2 (a, a^dagger)^dagger . (a, a^dagger) + const``."""
        return np.block([[self.B, self.A], [self.A.conj(), self.B.conj()]])

    def generator(self) -> np.ndarray:
        return np.block([[self.B, self.A], [-self.A.conj(), -self.B.conj()]])

    def embed(self, modes) -> BosonicBilinearH:
        modes = tuple(modes)
        return BosonicBilinearH(_embed(self.A, self.modes, modes), _embed(self.B, self.modes, modes), modes)

    def __add__(self, other: BosonicBilinearH) -> BosonicBilinearH:
        if not isinstance(other, BosonicBilinearH):
            return NotImplemented
        modes = _union(self.modes, other.modes)
        x, y = self.embed(modes), other.embed(modes)
        return BosonicBilinearH(x.A + y.A, x.B + y.B, modes)


@dataclass(frozen=True, eq=False)
class FermionicBilinearH:
    """Fermionic quadratic Hamiltonian over ``s = (b, d^dagger)``.

    ``modes`` lists fermion modes before antifermion modes; row ``i`` of the
    blocks refers to ``b_i`` for a fermion label and ``d_i^dagger`` for an
    antifermion label. With ``strict_blocks`` the block structure is
    enforced::

        calA = [[A1, C], [-C, A2]],  calB = [[B1, D], [-D, B2]]

        A1, A2, C, B1, B2 antisymmetric

    Otherwise only Hermiticity of ``calB`` and antisymmetry of ``calA``
    (the parts that reach the operator) are required.
    """

    calA: np.ndarray
    calB: np.ndarray
    modes: tuple
    strict_blocks: bool = True

    def __post_init__(self):
        modes = tuple(self.modes)
        if modes and species_kind(modes) != "fermion":
            raise ValidationError("fermionic Hamiltonian needs fermion/antifermion modes")
        _check_distinct(modes)
        species = [m.species for m in modes]
        nf = species.count("fermion")
        if species != ["fermion"] * nf + ["antifermion"] * (len(modes) - nf):
            raise ValidationError("list fermion modes before antifermion modes")
        n = len(modes)
        a = _as_matrix(self.calA, n, "calA")
        b = _as_matrix(self.calB, n, "calB")
        tol = _scaled_tol(a, b)
        if np.max(np.abs(b - b.conj().T), initial=0.0) > tol:
            raise ValidationError("calB must be Hermitian")
        if np.max(np.abs(a + a.T), initial=0.0) > tol:
            raise ValidationError("calA must be antisymmetric")
        if self.strict_blocks:
            _check_block_structure(a, b, nf, tol)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "calA", a)
        object.__setattr__(self, "calB", b)

    species = "fermion"

    @classmethod
    def from_blocks(cls, fermion_modes, antifermion_modes, A1=None, A2=None, C=None,
                    B1=None, B2=None, D=None, strict_blocks: bool = True) -> FermionicBilinearH:
        nf, nd = len(fermion_modes), len(antifermion_modes)

        def blk(m, r, c):
            return np.zeros((r, c), dtype=complex) if m is None else np.asarray(m, dtype=complex)

        if nd == 0 or nf == 0:
            cal_a = blk(A1, nf, nf) if nd == 0 else blk(A2, nd, nd)
            cal_b = blk(B1, nf, nf) if nd == 0 else blk(B2, nd, nd)
        else:
            c = blk(C, nf, nd)
            d = blk(D, nf, nd)
            if nf != nd and (c.any() or d.any()):
                raise ValidationError("off-diagonal blocks need equal fermion and antifermion counts")
            cc = -c if nf == nd else np.zeros((nd, nf))
            dd = -d if nf == nd else np.zeros((nd, nf))
            cal_a = np.block([[blk(A1, nf, nf), c], [cc, blk(A2, nd, nd)]])
            cal_b = np.block([[blk(B1, nf, nf), d], [dd, blk(B2, nd, nd)]])
        return cls(cal_a, cal_b, tuple(fermion_modes) + tuple(antifermion_modes), strict_blocks)

    @classmethod
    def zero(cls, modes) -> FermionicBilinearH:
        return cls(None, None, tuple(modes))

    @property
    def number_conserving(self) -> bool:
        return not np.any(self.calA)

    def nambu(self) -> np.ndarray:
        """``[[calB, calA], [-calA^*, -calB^*]]``; ``H = 1/2 (s, s^dagger)^dagger . (s, s^dagger) + const``."""
        return self.generator()

    def generator(self) -> np.ndarray:
        return np.block([[self.calB, self.calA], [-self.calA.conj(), -self.calB.conj()]])

    def embed(self, modes) -> FermionicBilinearH:
        modes = _fermion_order(modes)
        return FermionicBilinearH(_embed(self.calA, self.modes, modes), _embed(self.calB, self.modes, modes),
                                  modes, self.strict_blocks)

    def __add__(self, other: FermionicBilinearH) -> FermionicBilinearH:
        if not isinstance(other, FermionicBilinearH):
            return NotImplemented
        modes = _fermion_order(_union(self.modes, other.modes))
        x = self.embed(modes)
        y = other.embed(modes)
        return FermionicBilinearH(x.calA + y.calA, x.calB + y.calB, modes,
                                  self.strict_blocks and other.strict_blocks)


def _fermion_order(modes):
    modes = tuple(modes)
    return tuple(m for m in modes if m.species == "fermion") + tuple(m for m in modes if m.species == "antifermion")


def _check_block_structure(a, b, nf, tol):
    for name, mat in (("calA", a), ("calB", b)):
        top, bottom = mat[:nf, nf:], mat[nf:, :nf]
        if top.shape[0] != top.shape[1]:
            if np.any(np.abs(top) > tol) or np.any(np.abs(bottom) > tol):
                raise ValidationError(f"{name} off-diagonal blocks need equal fermion and antifermion counts")
        elif np.max(np.abs(bottom + top), initial=0.0) > tol:
            raise ValidationError(f"{name} off-diagonal blocks must be (X, -X)")
        for blk_name, blk in (("1", mat[:nf, :nf]), ("2", mat[nf:, nf:])):
            if np.max(np.abs(blk + blk.T), initial=0.0) > tol:
                raise ValidationError(f"{name} diagonal block {blk_name} must be antisymmetric")
    c = a[:nf, nf:]
    if c.shape[0] == c.shape[1] and np.max(np.abs(c + c.T), initial=0.0) > tol:
        raise ValidationError("calA block C must be antisymmetric")


# -- constructors --------------------------------------------------------------


def beam_splitter(mode1: ModeLabel, mode2: ModeLabel, ratio: float = 0.5):
    """Lossless beam splitter coupling two modes.

    ``H = i theta (a_1^dagger a_2 - a_2^dagger a_1)`` with
    ``cos^2 theta = ratio`` so the Heisenberg map sends
    ``a_1 -> cos(theta) a_1 + sin(theta) a_2``. Fermionic labels give the
    same ``calB`` block (it is antisymmetric, as the block structure needs).
    """
    if mode1 == mode2:
        raise ValidationError("beam splitter needs two distinct modes")
    ratio = float(ratio)
    if not 0.0 <= ratio <= 1.0:
        raise ValidationError(f"ratio must lie in [0, 1], got {ratio}")
    theta = float(np.arccos(np.sqrt(ratio)))
    b = np.array([[0.0, 1j * theta], [-1j * theta, 0.0]])
    modes = (mode1, mode2)
    if species_kind(modes) == "boson":
        return BosonicBilinearH(None, b, modes)
    if mode1.species != mode2.species:
        raise ValidationError("beam splitter cannot couple a fermion to an antifermion")
    return FermionicBilinearH(None, b, modes)


def _s_permutation(modes) -> np.ndarray:
    # (c, c^dagger) = P (s, s^dagger); antifermion rows swap d with d^dagger
    n = len(modes)
    p = np.zeros((2 * n, 2 * n))
    for i, m in enumerate(modes):
        if m.species == "antifermion":
            p[i, n + i] = 1.0
            p[n + i, i] = 1.0
        else:
            p[i, i] = 1.0
            p[n + i, n + i] = 1.0
    return p


def heisenberg_transform(H) -> BogoliubovMap:
    """Exact map ``exp(iH) a exp(-iH) = alpha a + beta a^dagger``."""
    k = expm(-1j * H.generator())
    if isinstance(H, BosonicBilinearH):
        return BogoliubovMap.from_nambu(k, "boson", H.modes)
    p = _s_permutation(H.modes)
    return BogoliubovMap.from_nambu(p @ k @ p.T, "fermion", H.modes)


def transport_hamiltonian(H, frame_map: BogoliubovMap):
    """Rewrite ``H`` in the operators of another frame.

    ``frame_map`` expresses this frame's operators (its ``modes``) through
    the other frame's (its ``target_modes``); every mode of ``H`` must be
    among ``frame_map.modes``. Substituting into the doubled form gives
    ``H' = T^dagger H T`` with ``T`` the doubled map.
    """
    missing = [m for m in H.modes if not any(m == x for x in frame_map.modes)]
    if missing:
        raise ValidationError(f"frame map does not cover modes {missing!r}")
    if frame_map.species != H.species:
        raise ValidationError("frame map and Hamiltonian species differ")
    src, dst = frame_map.modes, frame_map.target_modes
    n_dst = len(dst)
    t = frame_map.nambu()
    if isinstance(H, BosonicBilinearH):
        full = H.embed(src)
        hp = t.conj().T @ full.nambu() @ t
        a = hp[:n_dst, n_dst:]
        b = hp[:n_dst, :n_dst]
        return BosonicBilinearH((a + a.T) / 2, (b + b.conj().T) / 2, dst)
    if _fermion_order(src) != src or _fermion_order(dst) != dst:
        raise ValidationError("frame map must list fermion modes before antifermion modes")
    full = H.embed(src)
    ts = _s_permutation(src).T @ t @ _s_permutation(dst)
    hp = ts.conj().T @ full.nambu() @ ts
    a = hp[:n_dst, n_dst:]
    b = hp[:n_dst, :n_dst]
    return FermionicBilinearH((a - a.T) / 2, (b + b.conj().T) / 2, dst, strict_blocks=False)


def mode_overlap_map(g_f, fstar_g, modes=None, target_modes=None, tol: float = OVERLAP_TOL) -> BogoliubovMap:
    """Bosonic map from mode-function overlaps.

    ``g_f[j, k] = (g_j, f_k)`` and ``fstar_g[k, j] = (f_k^*, g_j)``; the
    result expresses ``a_k = sum_j (g_j, f_k) b_j - (f_k^*, g_j) b_j^dagger``.
    Raises InvalidOverlapError unless the overlaps are complete, i.e. the
    map is symplectic within ``tol``.
    """
    g_f = np.atleast_2d(np.asarray(g_f, dtype=complex))
    fstar_g = np.atleast_2d(np.asarray(fstar_g, dtype=complex))
    if g_f.shape[0] != g_f.shape[1] or g_f.shape != fstar_g.shape[::-1]:
        raise InvalidOverlapError("overlap matrices must be square and of matching size")
    n = g_f.shape[0]
    modes = tuple(modes) if modes is not None else default_modes(n)
    bmap = BogoliubovMap(g_f.T, -fstar_g, "boson", modes, target_modes)
    dev = bmap.max_deviation()
    if dev > tol:
        raise InvalidOverlapError(f"overlaps violate completeness (symplectic residual {dev:.3g})")
    return bmap


# -- Fock-space evolution -------------------------------------------------------


def fock_hamiltonian(H, modes, dims) -> sp.csr_matrix:
    """Sparse operator of ``H`` on the Fock space of ``modes`` with ``dims``."""
    fermionic = species_kind(modes) == "fermion"
    if fermionic != (H.species == "fermion"):
        raise ValidationError("Hamiltonian and state have different statistics")
    idx = [mode_index(modes, m) for m in H.modes]
    size = int(np.prod(dims))
    ann = [ladder_matrix(dims, i, False, fermionic) for i in idx]
    cre = [ladder_matrix(dims, i, True, fermionic) for i in idx]
    if fermionic:
        # s_i is d_i^dagger for antifermions
        s = [c if m.species == "antifermion" else a for m, a, c in zip(H.modes, ann, cre)]
        sd = [a if m.species == "antifermion" else c for m, a, c in zip(H.modes, ann, cre)]
        bmat, amat, sign = H.calB, H.calA, -1.0
    else:
        s, sd = ann, cre
        bmat, amat, sign = H.B, H.A, 1.0
    out = sp.csr_matrix((size, size), dtype=complex)
    n = len(idx)
    for j in range(n):
        for k in range(n):
            if bmat[j, k] != 0:
                out = out + bmat[j, k] * (sd[j] @ s[k])
            if amat[j, k] != 0:
                out = out + 0.5 * amat[j, k] * (sd[j] @ sd[k]) + sign * 0.5 * np.conj(amat[j, k]) * (s[j] @ s[k])
    return out.tocsr()


def _expi(hmat, vec: np.ndarray) -> np.ndarray:
    """``exp(i hmat) vec``, diagonalising only the invariant blocks ``vec`` touches."""
    hmat = sp.csr_matrix(hmat)
    hmat.eliminate_zeros()
    _, labels = connected_components(abs(hmat), directed=False)
    idx = np.flatnonzero(np.isin(labels, labels[vec != 0]))
    out = np.zeros_like(vec)
    if idx.size:
        w, v = np.linalg.eigh(hmat[idx][:, idx].toarray())
        out[idx] = v @ (np.exp(1j * w) * (v.conj().T @ vec[idx]))
    return out


def _max_total_number(state: FockState) -> int:
    occ = state.occupations().sum(axis=1)
    support = np.abs(state.amplitudes) > 0
    return int(occ[support].max(initial=0))


def evolve(state: FockState, H, margin: int = EVOLVE_MARGIN, tol: float = TRUNCATION_TOL,
           strict: bool = False) -> FockState:
    """Apply ``exp(iH)`` to ``state`` (dense eigendecomposition per invariant block).

    This is the state whose substitution picture is ``heisenberg_transform(H)``.
    Fermionic spaces are exact. A number-conserving bosonic ``H`` is exact
    when no basis state in the support carries more than ``cutoff`` quanta;
    otherwise the state is evolved with ``margin`` extra levels and projected
    back, and the lost norm is added to ``truncation_loss``. With ``strict``
    a loss above ``tol`` raises TruncationError.
    """
    if state.fermionic:
        hmat = fock_hamiltonian(H, state.modes, state.dims)
        return state._replace(_expi(hmat, state.amplitudes))
    if H.number_conserving and _max_total_number(state) <= state.cutoff:
        hmat = fock_hamiltonian(H, state.modes, state.dims)
        return state._replace(_expi(hmat, state.amplitudes))
    big = extend_cutoff(state, state.cutoff + int(margin))
    hmat = fock_hamiltonian(H, big.modes, big.dims)
    out = restrict_cutoff(big._replace(_expi(hmat, big.amplitudes)), state.cutoff)
    if strict and out.truncation_loss > tol:
        raise TruncationError(f"evolution lost {out.truncation_loss:.3g} of the norm past the cutoff")
    return out


def expectation(state: FockState, H) -> float:
    """``<psi|H|psi> / <psi|psi>`` on the state's truncated space."""
    hmat = fock_hamiltonian(H, state.modes, state.dims)
    psi = state.amplitudes
    return float(np.vdot(psi, hmat @ psi).real / np.vdot(psi, psi).real)


__all__ = [
    "BosonicBilinearH",
    "FermionicBilinearH",
    "beam_splitter",
    "evolve",
    "expectation",
    "fock_hamiltonian",
    "heisenberg_transform",
    "mode_overlap_map",
    "transport_hamiltonian",
]
