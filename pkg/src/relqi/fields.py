"""Bogoliubov matrices for scalar, massive vector, photon and Dirac modes.

Every transform maps a source mode at momentum ``k`` to the observer's mode
at ``Lambda k``::

    a'_j(Lambda k) = sum_l M_jl a_l(k) exp(-i (Lambda k).l)

Each function computes the raw matrix from the closed-form contraction,
records how far it is from unitary, and returns the nearest unitary matrix
(polar factor) as the final transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import polar
from scipy.spatial.transform import Rotation

from .errors import DegenerateMomentumError, SingularityError, ValidationError
from .lorentz import (
    METRIC,
    FourVector,
    LorentzTransform,
    apply,
    check_on_shell,
    decompose,
    minkowski_dot,
    standard_boost,
)

# Dirac representation
SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
GAMMA = np.array(
    [np.block([[_I2, _Z2], [_Z2, -_I2]])]
    + [np.block([[_Z2, s], [-s, _Z2]]) for s in SIGMA]
)
ALPHA = np.array([GAMMA[0] @ GAMMA[i] for i in (1, 2, 3)])
SPIN = np.array([np.block([[s, _Z2], [_Z2, s]]) for s in SIGMA])

FIELD_KINDS = ("scalar", "vector", "em", "dirac", "antidirac")


@dataclass(frozen=True, eq=False)
class PolarizationBasis:
    """Polarization four-vectors ``vectors[j]`` for one momentum.

    Vector bases hold three vectors ordered ``j = 1, 0, -1``; photon bases
    hold two (H, V). Vectors are spacelike with ``eps_j . eps_l^* = -delta``.
    """

    vectors: np.ndarray
    kind: str
    momentum: FourVector

    def gauge_residuals(self) -> dict:
        k = self.momentum.array
        lorentz = np.abs(minkowski_dot(self.vectors, k[None, :]))
        coulomb = np.abs(self.vectors[:, 1:] @ k[1:])
        return {"lorentz": float(np.max(lorentz)), "coulomb": float(np.max(coulomb))}

    def gram(self) -> np.ndarray:
        """Matrix ``-eps_j^* . eps_l`` (identity for an orthonormal basis)."""
        return -(self.vectors.conj() @ METRIC @ self.vectors.T)


@dataclass(frozen=True, eq=False)
class DiracSpinor:
    components: np.ndarray
    momentum: FourVector
    mass: float
    spin_index: int
    antiparticle: bool = False

    def bar(self) -> np.ndarray:
        return self.components.conj() @ GAMMA[0]


@dataclass(frozen=True, eq=False)
class ModeTransformMatrix:
    """Final (unitarised) mode matrix plus diagnostics.

    ``raw`` is the un-normalised matrix as given by the closed-form law, or
    ``None`` when its scalar prefactor is singular. ``raw_deviation`` is
    ``max |raw^dagger raw - I|`` (``inf`` when singular).
    """

    kind: str
    matrix: np.ndarray
    phase: complex
    source_momentum: FourVector
    target_momentum: FourVector
    raw: np.ndarray | None
    raw_deviation: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def unitarity_deviation(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))

    @property
    def full(self) -> np.ndarray:
        """Matrix including the translation phase."""
        return self.matrix * self.phase


def _unitarity_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def _closest_unitary(m: np.ndarray) -> np.ndarray:
    u, _ = polar(m)
    return u


def _translation_phase(kp: FourVector, ell: FourVector | None) -> complex:
    if ell is None:
        return 1.0 + 0.0j
    return complex(np.exp(-1j * kp.dot(ell)))


def _fix_global_phase(m: np.ndarray) -> np.ndarray:
    # first diagonal entry of (near) maximal modulus made real positive, so
    # SU(2) ties resolve stably; fall back to the largest entry overall
    diag = np.diag(m)
    mags = np.abs(diag)
    idx = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[0])
    ref = diag[idx]
    if abs(ref) < 1e-12:
        ref = m.flat[int(np.argmax(np.abs(m)))]
    return m * (abs(ref) / ref)


def _as_transform(lam) -> LorentzTransform:
    if isinstance(lam, LorentzTransform):
        return lam
    return LorentzTransform(np.asarray(lam, dtype=float))


# -- scalar ------------------------------------------------------------------


def scalar_bogoliubov(lam: LorentzTransform, k: FourVector, ell: FourVector | None = None) -> ModeTransformMatrix:
    lam = _as_transform(lam)
    check_on_shell(k)
    kp = apply(lam, k)
    one = np.ones((1, 1), dtype=complex)
    return ModeTransformMatrix("scalar", one, _translation_phase(kp, ell), k, kp, one.copy(), 0.0)


# -- massive vector ----------------------------------------------------------


def vector_polarization_basis(k: FourVector, m: float) -> PolarizationBasis:
    """Rest-frame triple ``x, y, z`` carried to ``k`` by the standard boost."""
    if m <= 0:
        raise ValidationError("massive vector basis needs m > 0; use em_polarization_basis for photons")
    check_on_shell(k, m)
    lmat = standard_boost(k, m).matrix
    vectors = lmat[:, 1:].T.astype(complex)
    return PolarizationBasis(vectors, "vector", k)


def vector_bogoliubov(lam, k: FourVector, m: float, ell: FourVector | None = None) -> ModeTransformMatrix:
    lam = _as_transform(lam)
    src = vector_polarization_basis(k, m)
    kp = apply(lam, k)
    dst = vector_polarization_basis(kp, m)
    denom = k.dot(kp)
    if abs(denom) < 1e-12:
        raise SingularityError(f"k . Lambda k vanished ({denom!r})")
    moved = (lam.matrix @ src.vectors.T).T
    contraction = dst.vectors.conj() @ METRIC @ moved.T
    raw = -(m * m) * contraction / denom
    final = _closest_unitary(raw)
    return ModeTransformMatrix(
        "vector",
        final,
        _translation_phase(kp, ell),
        k,
        kp,
        raw,
        _unitarity_deviation(raw),
        {"k_dot_lambda_k": denom},
    )


# -- electromagnetic ---------------------------------------------------------


def em_polarization_basis(k: FourVector) -> PolarizationBasis:
    """Transverse H/V pair for a lightlike momentum.

    H is the unit projection of z-hat transverse to k (x-hat when k is
    along z) and V completes a right-handed triad ``(H, V, k-hat)``.
    """
    p = k.spatial
    pn = np.linalg.norm(p)
    if pn == 0:
        raise DegenerateMomentumError("photon momentum must be non-zero")
    if abs(k.norm2) > 1e-10 * max(1.0, k.t * k.t) or k.t <= 0:
        raise ValidationError(f"photon momentum must be lightlike and future-directed, k.k = {k.norm2!r}")
    khat = p / pn
    ref = np.array([0.0, 0.0, 1.0])
    if np.linalg.norm(np.cross(khat, ref)) < 1e-9:
        ref = np.array([1.0, 0.0, 0.0])
    e1 = ref - (ref @ khat) * khat
    e1 /= np.linalg.norm(e1)
    e1 -= (e1 @ khat) * khat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    vectors = np.zeros((2, 4), dtype=complex)
    vectors[0, 1:] = e1
    vectors[1, 1:] = e2
    return PolarizationBasis(vectors, "em", k)


def em_gauge_fix(lam, k: FourVector, basis: PolarizationBasis | None = None):
    """Transform the polarization vectors and restore the Coulomb gauge.

    Returns ``(alphas, fixed_basis)`` where
    ``fixed_j = Lambda eps_j + i alpha_j k'`` satisfies
    ``k' . fixed_j = 0`` and ``k'_vec . fixed_j_vec = 0`` at ``k' = Lambda k``.
    """
    lam = _as_transform(lam)
    if basis is None:
        basis = em_polarization_basis(k)
    kp = apply(lam, k)
    kpv = kp.spatial
    moved = (lam.matrix @ basis.vectors.T).T
    alphas = 1j * (moved[:, 1:] @ kpv) / (kpv @ kpv)
    fixed = moved + (1j * alphas)[:, None] * kp.array[None, :]
    return alphas, PolarizationBasis(fixed, "em", kp)


def _observer_em_basis(lam: LorentzTransform, k: FourVector) -> PolarizationBasis:
    # Observer's H/V at Lambda k: reference pair at the rotated momentum R k,
    # carried by the boost L' = R L R^T of Lambda = L' R (Coulomb-gauge fixed).
    parts = decompose(lam)
    rot = parts.r2
    left_boost = LorentzTransform(rot.matrix @ parts.l.matrix @ rot.matrix.T)
    rk = apply(rot, k)
    _, carried = em_gauge_fix(left_boost, rk, em_polarization_basis(rk))
    return carried


def em_bogoliubov(lam, k: FourVector, ell: FourVector | None = None) -> ModeTransformMatrix:
    """Photon polarization transform ``U_jl = -eps_j(Lambda k)^* . eps~_l``.

    The observer's basis at ``Lambda k`` is the boost-transported reference
    basis, so ``U`` depends only on the rotation factor of ``Lambda`` and
    equals the identity for every pure boost.
    """
    lam = _as_transform(lam)
    src = em_polarization_basis(k)
    alphas, fixed = em_gauge_fix(lam, k, src)
    kp = fixed.momentum
    dst = _observer_em_basis(lam, k)
    raw = -(dst.vectors.conj() @ METRIC @ fixed.vectors.T)
    final = _closest_unitary(raw)
    return ModeTransformMatrix(
        "em",
        final,
        _translation_phase(kp, ell),
        k,
        kp,
        raw,
        _unitarity_deviation(raw),
        {"alphas": alphas, "gauge_residuals": fixed.gauge_residuals(), "observer_basis": dst.vectors},
    )


# -- Dirac -------------------------------------------------------------------


def spin_matrix(lam) -> np.ndarray:
    """Bispinor representation ``S(Lambda)`` with ``S^-1 gamma^mu S = Lambda^mu_nu gamma^nu``.

    Determined up to an overall sign (the double cover is not visible from
    the 4x4 matrix).
    """
    lam = _as_transform(lam)
    parts = decompose(lam)
    lmat = parts.l.matrix
    gamma = lmat[0, 0]
    u = lmat[0, 1:]
    ch = np.sqrt((gamma + 1.0) / 2.0)
    s_boost = ch * np.eye(4) + np.einsum("i,ijk->jk", u / (2.0 * ch), ALPHA)
    rotvec = Rotation.from_matrix(parts.r2.matrix[1:, 1:]).as_rotvec()
    theta = np.linalg.norm(rotvec)
    if theta < 1e-300:
        s_rot = np.eye(4, dtype=complex)
    else:
        axis = rotvec / theta
        s_rot = np.cos(theta / 2) * np.eye(4) - 1j * np.sin(theta / 2) * np.einsum("i,ijk->jk", axis, SPIN)
    return s_rot @ s_boost


def dirac_spinor(k: FourVector, m: float, j: int) -> DiracSpinor:
    """Positive-energy spinor ``u_j(k)`` normalised to ``u-bar u = 1``."""
    if m <= 0:
        raise ValidationError("Dirac spinors need m > 0")
    if j not in (1, 2):
        raise ValidationError("spin index must be 1 or 2")
    check_on_shell(k, m)
    kx, ky, kz = k.spatial
    e = float(np.sqrt(kx * kx + ky * ky + kz * kz + m * m))
    n = np.sqrt((e + m) / (2 * m))
    if j == 1:
        comps = np.array([1, 0, kz / (e + m), (kx + 1j * ky) / (e + m)], dtype=complex)
    else:
        comps = np.array([0, 1, (kx - 1j * ky) / (e + m), -kz / (e + m)], dtype=complex)
    return DiracSpinor(n * comps, k, float(m), j)


def antifermion_spinor(k: FourVector, m: float, j: int) -> DiracSpinor:
    """Negative-energy spinor ``v_j = i gamma^2 u_j^*`` (``-v-bar v = 1``)."""
    u = dirac_spinor(k, m, j)
    return DiracSpinor(1j * GAMMA[2] @ u.components.conj(), k, float(m), j, antiparticle=True)


def _spinor_columns(k, m, make):
    return np.column_stack([make(k, m, j).components for j in (1, 2)])


def _bar_rows(cols):
    return cols.conj().T @ GAMMA[0]


def _dirac_like(kind, lam, k, m, ell, make, sign, conjugate):
    lam = _as_transform(lam)
    if m <= 0:
        raise ValidationError("Dirac transforms need m > 0")
    check_on_shell(k, m)
    kp = apply(lam, k)
    src = _spinor_columns(k, m, make)
    dst_bar = _bar_rows(_spinor_columns(kp, m, make))

    # closed form 2 u-bar(Lk) u(k) / (1 - k.Lk), without a bispinor factor
    bare = sign * (dst_bar @ src)
    wigner = sign * (dst_bar @ spin_matrix(lam) @ src)
    if conjugate:
        bare = bare.conj()
        wigner = wigner.conj()
    k_lk = k.dot(kp)
    denom = 1.0 - k_lk
    singular = abs(denom) < 1e-12
    raw = None if singular else 2.0 * bare / denom
    final = _fix_global_phase(_closest_unitary(wigner))
    diagnostics = {
        "singular_denominator": singular,
        "k_dot_lambda_k": k_lk,
        "closed_form_det": 0.5 * denom,
        "contraction_det": complex(np.linalg.det(bare)),
        "covariant_det": complex(0.5 * (1.0 + k_lk / (m * m))),
        "wigner_deviation": _unitarity_deviation(wigner),
    }
    return ModeTransformMatrix(
        kind,
        final,
        _translation_phase(kp, ell),
        k,
        kp,
        raw,
        float("inf") if raw is None else _unitarity_deviation(raw),
        diagnostics,
    )


def dirac_bogoliubov(lam, k: FourVector, m: float, ell: FourVector | None = None) -> ModeTransformMatrix:
    """Spin-1/2 transform for fermion annihilators.

    The final matrix is ``u-bar_j(Lambda k) S(Lambda) u_l(k)`` (unitary,
    global phase fixed on the first maximal-modulus diagonal entry).
    ``raw`` is the closed-form law ``2 u-bar_j(Lambda k) u_l(k) / (1 - k.Lambda k)``;
    it is ``None`` when the denominator vanishes, which happens at
    ``Lambda = I`` for ``m = 1``.
    """
    return _dirac_like("dirac", lam, k, m, ell, dirac_spinor, 1.0, False)


def antifermion_bogoliubov(lam, k: FourVector, m: float, ell: FourVector | None = None) -> ModeTransformMatrix:
    """Spin-1/2 transform for antifermion annihilators ``d_j``.

    Projecting with ``-v-bar_j`` extracts ``d'^dagger``; the matrix for the
    annihilators is its complex conjugate.
    """
    return _dirac_like("antidirac", lam, k, m, ell, antifermion_spinor, -1.0, True)


def mode_transform(kind: str, lam, k: FourVector, m: float = 0.0, ell: FourVector | None = None) -> ModeTransformMatrix:
    """Dispatch on field kind (one of ``FIELD_KINDS``)."""
    if kind == "scalar":
        return scalar_bogoliubov(lam, k, ell)
    if kind == "vector":
        return vector_bogoliubov(lam, k, m, ell)
    if kind == "em":
        return em_bogoliubov(lam, k, ell)
    if kind == "dirac":
        return dirac_bogoliubov(lam, k, m, ell)
    if kind == "antidirac":
        return antifermion_bogoliubov(lam, k, m, ell)
    raise ValidationError(f"unknown field kind {kind!r}; expected one of {FIELD_KINDS}")


_INTERNAL_DIMS = {"scalar": 1, "vector": 3, "em": 2, "dirac": 2, "antidirac": 2}


def frame_map(modes, lam, kind: str = "em", mass: float = 0.0, ell: FourVector | None = None):
    """Map expressing one observer's mode operators through a second observer's.

    ``modes`` are labels with momenta ``k``; modes sharing ``(port, k,
    species)`` form one multiplet and must carry every internal index
    ``0 .. d-1`` of the field. Bosonic labels use ``kind`` (scalar, vector
    or em); fermion and antifermion labels always use the Dirac laws. The
    returned map sends label ``(k, j)`` to ``sum_l conj(M_lj) a'_l(Lambda k)``,
    the inverse of ``a'(Lambda k) = M a(k)``; target labels carry ``Lambda k``.
    """
    from .modes import BogoliubovMap, species_kind

    lam = _as_transform(lam)
    modes = tuple(modes)
    species = species_kind(modes)
    n = len(modes)
    alpha = np.zeros((n, n), dtype=complex)
    targets = [None] * n
    groups: list = []
    for i, m in enumerate(modes):
        if m.momentum is None:
            raise ValidationError(f"mode {m!r} has no momentum")
        for g in groups:
            first = modes[g[0]]
            if (first.port, first.species) == (m.port, m.species) and first.momentum.isclose(m.momentum, 1e-12):
                g.append(i)
                break
        else:
            groups.append([i])
    matrices = {}
    for g in groups:
        first = modes[g[0]]
        if first.species == "fermion":
            field_kind = "dirac"
        elif first.species == "antifermion":
            field_kind = "antidirac"
        else:
            field_kind = kind
        if field_kind not in _INTERNAL_DIMS:
            raise ValidationError(f"unknown field kind {field_kind!r}")
        dim = _INTERNAL_DIMS[field_kind]
        internal = sorted(modes[i].internal_index for i in g)
        if internal != list(range(dim)):
            raise ValidationError(f"multiplet at {first!r} needs internal indices 0..{dim - 1}, got {internal}")
        mt = mode_transform(field_kind, lam, first.momentum, mass, ell)
        matrices[g[0]] = mt
        full = mt.full
        for i in g:
            targets[i] = modes[i].with_momentum(mt.target_momentum)
        for i in g:
            for jj in g:
                # a(k)_j = sum_l conj(full_lj) a'_l(Lambda k)
                alpha[i, jj] = np.conj(full[modes[jj].internal_index, modes[i].internal_index])
    bmap = BogoliubovMap(alpha, np.zeros_like(alpha), species, modes, tuple(targets))
    object.__setattr__(bmap, "transforms", tuple(matrices[g[0]] for g in groups))
    return bmap
