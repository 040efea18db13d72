"""Mode labels and linear Bogoliubov maps shared by the Fock and interferometer layers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .lorentz import FourVector

SPECIES = ("boson", "fermion", "antifermion")
LABEL_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ModeLabel:
    """One field mode: momentum, spin/polarization index, species and port.

    ``port`` distinguishes spatial input/output ports of an interferometer
    whose modes may share a momentum. Labels compare equal when all fields
    match, momenta within 1e-12 per component.
    """

    momentum: FourVector | None = None
    internal_index: int = 0
    species: str = "boson"
    port: object = None

    def __post_init__(self):
        if self.species not in SPECIES:
            raise ValidationError(f"species must be one of {SPECIES}, got {self.species!r}")

    @property
    def fermionic(self) -> bool:
        return self.species != "boson"

    def __eq__(self, other):
        if not isinstance(other, ModeLabel):
            return NotImplemented
        if (self.internal_index, self.species, self.port) != (other.internal_index, other.species, other.port):
            return False
        if self.momentum is None or other.momentum is None:
            return self.momentum is None and other.momentum is None
        return self.momentum.isclose(other.momentum, LABEL_ATOL)

    def __hash__(self):
        return hash((self.internal_index, self.species, self.port))

    def with_momentum(self, momentum: FourVector) -> ModeLabel:
        return ModeLabel(momentum, self.internal_index, self.species, self.port)

    def __repr__(self):
        parts = []
        if self.port is not None:
            parts.append(f"port={self.port!r}")
        if self.momentum is not None:
            parts.append(f"k={self.momentum.array.tolist()}")
        parts.append(f"j={self.internal_index}")
        parts.append(self.species)
        return f"ModeLabel({', '.join(parts)})"


def mode_index(modes, label) -> int:
    """Position of ``label`` (or an integer index) in ``modes``."""
    if isinstance(label, (int, np.integer)):
        if not 0 <= label < len(modes):
            raise ValidationError(f"mode index {label} out of range")
        return int(label)
    for i, m in enumerate(modes):
        if m == label:
            return i
    raise ValidationError(f"mode {label!r} not present")


def species_kind(modes) -> str:
    """``"boson"`` or ``"fermion"``; mixed statistics are rejected."""
    kinds = {m.fermionic for m in modes}
    if len(kinds) > 1:
        raise ValidationError("cannot mix bosonic and fermionic modes in one space")
    return "fermion" if kinds == {True} else "boson"


def default_modes(n: int, species: str = "boson"):
    return tuple(ModeLabel(None, 0, species, port=i) for i in range(n))


@dataclass(frozen=True, eq=False)
class BogoliubovMap:
    """Linear map ``x_i = sum_j alpha_ij y_j + beta_ij y_j^dagger``.

    ``modes`` label the operators ``x`` being expressed, ``target_modes`` the
    basis operators ``y`` (defaults to ``modes``). For bosons the
    commutation relations survive iff the map is symplectic; for fermions
    iff the doubled matrix ``[[alpha, beta], [beta*, alpha*]]`` is unitary.
    """

    alpha: np.ndarray
    beta: np.ndarray
    species: str
    modes: tuple
    target_modes: tuple = field(default=None)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.alpha, dtype=complex))
        b = np.atleast_2d(np.asarray(self.beta, dtype=complex)) if self.beta is not None else np.zeros_like(a)
        if a.shape != b.shape or a.ndim != 2:
            raise ValidationError("alpha and beta must be matrices of equal shape")
        if self.species not in ("boson", "fermion"):
            raise ValidationError("map species must be 'boson' or 'fermion'")
        modes = tuple(self.modes)
        target = tuple(self.target_modes) if self.target_modes is not None else modes
        if a.shape != (len(modes), len(target)):
            raise ValidationError(f"map shape {a.shape} does not match {len(modes)} x {len(target)} modes")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "target_modes", target)

    @classmethod
    def identity(cls, modes, species=None) -> BogoliubovMap:
        modes = tuple(modes)
        species = species or species_kind(modes)
        n = len(modes)
        return cls(np.eye(n), np.zeros((n, n)), species, modes)

    @classmethod
    def from_nambu(cls, matrix, species, modes, target_modes=None) -> BogoliubovMap:
        matrix = np.asarray(matrix)
        n = len(modes)
        return cls(matrix[:n, : matrix.shape[1] // 2], matrix[:n, matrix.shape[1] // 2 :], species, modes, target_modes)

    @property
    def number_conserving(self) -> bool:
        return not np.any(self.beta)

    def nambu(self) -> np.ndarray:
        """Doubled matrix acting on ``(y, y^dagger)``."""
        a, b = self.alpha, self.beta
        return np.block([[a, b], [b.conj(), a.conj()]])

    def deviation(self) -> dict:
        """Residuals of the canonical (anti)commutation conditions."""
        a, b = self.alpha, self.beta
        n = a.shape[0]
        if a.shape[0] != a.shape[1]:
            return {"square": False}
        if self.species == "boson":
            return {
                "symplectic_norm": float(np.max(np.abs(a @ a.conj().T - b @ b.conj().T - np.eye(n)))),
                "symplectic_sym": float(np.max(np.abs(a @ b.T - b @ a.T))),
            }
        u = self.nambu()
        return {"unitarity": float(np.max(np.abs(u @ u.conj().T - np.eye(2 * n))))}

    def max_deviation(self) -> float:
        dev = self.deviation()
        if "square" in dev:
            return float("inf")
        return max(dev.values())

    def is_canonical(self, tol: float = 1e-10) -> bool:
        return self.max_deviation() < tol

    def inverse(self) -> BogoliubovMap:
        """Map expressing ``y`` in terms of ``x``."""
        a, b = self.alpha, self.beta
        if self.species == "boson":
            return BogoliubovMap(a.conj().T, -b.T, "boson", self.target_modes, self.modes)
        return BogoliubovMap(a.conj().T, b.T, "fermion", self.target_modes, self.modes)

    def then(self, other: BogoliubovMap) -> BogoliubovMap:
        """Substitute ``other`` (which expresses ``y`` via ``z``) into this map."""
        if self.species != other.species:
            raise ValidationError("cannot compose maps of different species")
        prod = self.nambu() @ other.nambu()
        n = len(self.modes)
        m = len(other.target_modes)
        return BogoliubovMap(prod[:n, :m], prod[:n, m:], self.species, self.modes, other.target_modes)

    def __repr__(self):
        return f"BogoliubovMap(species={self.species!r}, modes={len(self.modes)}, number_conserving={self.number_conserving})"
