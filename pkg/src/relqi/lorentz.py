"""Four-vectors and the restricted Lorentz group.

Conventions: natural units, metric signature ``(+, -, -, -)``, active
right-handed rotations. A boost with positive rapidity along ``n`` gives a
particle at rest a momentum along ``+n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMomentumError, RangeError, ValidationError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
MAX_RAPIDITY = 20.0
AXIS_TOL = 1e-12

_NAMED_AXES = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}


def minkowski_dot(a, b) -> complex | float:
    """Minkowski product ``a^mu g_{mu nu} b^nu`` (no complex conjugation)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def unit_axis(axis) -> np.ndarray:
    """Return ``axis`` as a float 3-vector, accepting ``"x"``, ``"y"``, ``"z"``.

    Raises ValidationError unless the vector has unit length within 1e-12.
    """
    if isinstance(axis, str):
        key = axis.strip().lower().lstrip("+")
        sign = -1.0 if key.startswith("-") else 1.0
        key = key.lstrip("-")
        if key not in _NAMED_AXES:
            raise ValidationError(f"unknown axis name {axis!r}")
        return sign * np.array(_NAMED_AXES[key])
    vec = np.asarray(axis, dtype=float).reshape(-1)
    if vec.shape != (3,) or not np.all(np.isfinite(vec)):
        raise ValidationError(f"axis must be a finite 3-vector, got {axis!r}")
    if abs(np.linalg.norm(vec) - 1.0) > AXIS_TOL:
        raise ValidationError(f"axis must have unit length, |axis| = {np.linalg.norm(vec)!r}")
    return vec


@dataclass(frozen=True)
class FourVector:
    """Real contravariant four-vector ``(t, x, y, z)``."""

    t: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("t", "x", "y", "z"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValidationError(f"four-vector component {name} is not finite")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, values) -> FourVector:
        arr = np.asarray(values, dtype=float).reshape(-1)
        if arr.shape != (4,):
            raise ValidationError(f"four-vector needs 4 components, got {arr.shape}")
        return cls(*arr)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: FourVector) -> float:
        return float(minkowski_dot(self.array, other.array))

    @property
    def norm2(self) -> float:
        """Minkowski square ``t^2 - x^2 - y^2 - z^2``."""
        return self.dot(self)

    def isclose(self, other: FourVector, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.array - other.array) <= atol))

    def __add__(self, other: FourVector) -> FourVector:
        return FourVector.from_array(self.array + other.array)

    def __sub__(self, other: FourVector) -> FourVector:
        return FourVector.from_array(self.array - other.array)

    def __repr__(self):
        return f"FourVector({self.t!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _lorentz_residual(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix.T @ METRIC @ matrix - METRIC)))


@dataclass(frozen=True, eq=False)
class LorentzTransform:
    """Element ``Lambda^mu_nu`` of the restricted Lorentz group SO+(1,3).

    The defining relation is checked with a tolerance that scales with the
    squared matrix norm, since large rapidities amplify rounding.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (4, 4) or not np.all(np.isfinite(m)):
            raise ValidationError("Lorentz transform must be a finite 4x4 real matrix")
        scale = max(1.0, float(np.max(np.abs(m))) ** 2)
        if _lorentz_residual(m) > 1e-10 * scale:
            raise ValidationError("matrix does not preserve the Minkowski metric")
        if m[0, 0] < 1.0 - 1e-10 * scale:
            raise ValidationError("transform is not orthochronous")
        if np.linalg.det(m) < 0:
            raise ValidationError("transform is not proper (det < 0)")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: LorentzTransform) -> LorentzTransform:
        return compose(self, other)

    def inverse(self) -> LorentzTransform:
        return LorentzTransform(METRIC @ self.matrix.T @ METRIC)

    def residual(self) -> float:
        """``max |Lambda^T g Lambda - g|``."""
        return _lorentz_residual(self.matrix)

    def apply(self, v: FourVector) -> FourVector:
        return apply(self, v)

    def __repr__(self):
        return f"LorentzTransform({self.matrix.tolist()!r})"


@dataclass(frozen=True)
class BoostDecomposition:
    """``Lambda = r2 @ l @ r1`` with ``r1``, ``r2`` rotations and ``l`` a pure boost."""

    r2: LorentzTransform
    l: LorentzTransform  # noqa: E741
    r1: LorentzTransform

    def recompose(self) -> LorentzTransform:
        return LorentzTransform(self.r2.matrix @ self.l.matrix @ self.r1.matrix)


def identity() -> LorentzTransform:
    return LorentzTransform(np.eye(4))


def _boost_matrix(gamma: float, u: np.ndarray) -> np.ndarray:
    # u = gamma * velocity; exact pure-boost form, symmetric.
    m = np.eye(4)
    m[0, 0] = gamma
    m[0, 1:] = u
    m[1:, 0] = u
    m[1:, 1:] += np.outer(u, u) / (1.0 + gamma)
    return m


def boost(rapidity: float, axis) -> LorentzTransform:
    """Pure boost with the given rapidity along a unit axis.

    Rapidities beyond 20 in magnitude raise RangeError (``cosh`` would lose
    the metric identity to rounding in float64).
    """
    rapidity = float(rapidity)
    if not np.isfinite(rapidity):
        raise ValidationError("rapidity must be finite")
    if abs(rapidity) > MAX_RAPIDITY:
        raise RangeError(f"|rapidity| must not exceed {MAX_RAPIDITY}, got {rapidity}")
    n = unit_axis(axis)
    return LorentzTransform(_boost_matrix(np.cosh(rapidity), np.sinh(rapidity) * n))


def rotation(angle: float, axis) -> LorentzTransform:
    """Active right-handed rotation ``1 (+) R`` about a unit axis."""
    angle = float(angle)
    if not np.isfinite(angle):
        raise ValidationError("rotation angle must be finite")
    n = unit_axis(axis)
    k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    r = np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
    m = np.eye(4)
    m[1:, 1:] = r
    return LorentzTransform(m)


def compose(a: LorentzTransform, b: LorentzTransform) -> LorentzTransform:
    """Matrix product ``a @ b`` (apply ``b`` first)."""
    return LorentzTransform(a.matrix @ b.matrix)


def decompose(lam: LorentzTransform) -> BoostDecomposition:
    """Polar decomposition ``Lambda = R L`` returned as ``(r2=R, l=L, r1=I)``.

    The boost factor shares the first row of ``Lambda`` because a rotation
    leaves the time row untouched; the rotation is then ``Lambda L^{-1}``.
    """
    m = lam.matrix
    gamma = m[0, 0]
    u = m[0, 1:].copy()
    l_mat = _boost_matrix(gamma, u)
    r_mat = m @ METRIC @ l_mat @ METRIC
    r_mat[0, :] = 0.0
    r_mat[:, 0] = 0.0
    r_mat[0, 0] = 1.0
    # re-orthonormalise the 3x3 block against accumulated rounding
    uu, _, vh = np.linalg.svd(r_mat[1:, 1:])
    r_mat[1:, 1:] = uu @ vh
    return BoostDecomposition(r2=LorentzTransform(r_mat), l=LorentzTransform(l_mat), r1=identity())


def boost_part(lam: LorentzTransform) -> LorentzTransform:
    return decompose(lam).l


def rotation_part(lam: LorentzTransform) -> LorentzTransform:
    return decompose(lam).r2


def standard_boost(k: FourVector, mass: float) -> LorentzTransform:
    """Pure boost taking ``(mass, 0, 0, 0)`` to the on-shell momentum ``k``."""
    if mass <= 0:
        raise ValidationError("standard boost needs a positive mass")
    return LorentzTransform(_boost_matrix(k.t / mass, k.spatial / mass))


def apply(lam: LorentzTransform, v: FourVector) -> FourVector:
    return FourVector.from_array(lam.matrix @ v.array)


def mass_shell(m: float, p) -> FourVector:
    """On-shell four-momentum ``(sqrt(|p|^2 + m^2), p)``."""
    m = float(m)
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape != (3,):
        raise ValidationError("momentum must be a 3-vector")
    if m < 0:
        raise ValidationError(f"mass must be non-negative, got {m}")
    if m == 0 and not np.any(p):
        raise DegenerateMomentumError("massless particle needs non-zero momentum")
    return FourVector(float(np.sqrt(p @ p + m * m)), *p)


def check_on_shell(k: FourVector, mass: float | None = None, rtol: float = 1e-10) -> None:
    """Raise ValidationError unless ``k`` is a future-directed on-shell momentum.

    With ``mass=None`` any non-negative mass is accepted.
    """
    scale = max(1.0, k.t * k.t)
    if k.t <= 0:
        raise ValidationError("momentum must have positive energy")
    n2 = k.norm2
    if mass is None:
        if n2 < -rtol * scale:
            raise ValidationError(f"momentum is spacelike (k.k = {n2!r})")
        return
    if abs(n2 - mass * mass) > rtol * scale:
        raise ValidationError(f"momentum is off-shell: k.k = {n2!r}, m^2 = {mass * mass!r}")
