"""Truncated occupation-number spaces for bosonic and fermionic modes.

States are dense amplitude vectors over the row-major occupation basis
(mode 0 most significant). Bosonic modes keep occupations ``0..cutoff``;
fermionic modes ``0..1`` with Jordan-Wigner signs by mode position.
Operations never truncate silently: norm pushed past the cutoff is
accumulated in ``FockState.truncation_loss``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import TruncationError, UnsupportedMapError, ValidationError
from .modes import BogoliubovMap, ModeLabel, mode_index, species_kind

DEFAULT_CUTOFF = 4
DEFAULT_MARGIN = 4
TRUNCATION_TOL = 1e-6


def _dims(n_modes: int, kind: str, cutoff: int) -> tuple:
    return (2,) * n_modes if kind == "fermion" else (cutoff + 1,) * n_modes


@dataclass(frozen=True, eq=False)
class FockState:
    """Dense state over ``modes``; ``cutoff`` is 1 for fermionic spaces."""

    modes: tuple
    amplitudes: np.ndarray
    cutoff: int = DEFAULT_CUTOFF
    truncation_loss: float = 0.0

    def __post_init__(self):
        modes = tuple(self.modes)
        kind = species_kind(modes)
        cutoff = 1 if kind == "fermion" else int(self.cutoff)
        if cutoff < 1:
            raise ValidationError("bosonic cutoff must be at least 1")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        expected = int(np.prod(_dims(len(modes), kind, cutoff)))
        if amps.size != expected:
            raise ValidationError(f"expected {expected} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def kind(self) -> str:
        return species_kind(self.modes)

    @property
    def fermionic(self) -> bool:
        return self.kind == "fermion"

    @property
    def dims(self) -> tuple:
        return _dims(len(self.modes), self.kind, self.cutoff)

    @property
    def truncated(self) -> bool:
        return self.truncation_loss > 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def occupations(self) -> np.ndarray:
        return kernels.occupation_table(self.dims)

    def normalized(self) -> FockState:
        n = self.norm
        if n == 0:
            raise ValidationError("cannot normalise the zero vector")
        return self._replace(self.amplitudes / n)

    def index_of(self, pattern) -> int:
        pattern = tuple(int(p) for p in pattern)
        if len(pattern) != len(self.modes) or any(not 0 <= p < d for p, d in zip(pattern, self.dims)):
            raise ValidationError(f"pattern {pattern} outside the basis")
        return int(np.ravel_multi_index(pattern, self.dims))

    def amplitude(self, pattern) -> complex:
        return complex(self.amplitudes[self.index_of(pattern)])

    def inner(self, other: FockState) -> complex:
        _check_same_space(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def mode_index(self, label) -> int:
        return mode_index(self.modes, label)

    def _replace(self, amplitudes, extra_loss: float = 0.0) -> FockState:
        return FockState(self.modes, amplitudes, self.cutoff, self.truncation_loss + extra_loss)

    def __add__(self, other: FockState) -> FockState:
        _check_same_space(self, other)
        return FockState(self.modes, self.amplitudes + other.amplitudes, self.cutoff,
                         self.truncation_loss + other.truncation_loss)

    def __mul__(self, scalar) -> FockState:
        return self._replace(self.amplitudes * complex(scalar))

    __rmul__ = __mul__


def _check_same_space(a: FockState, b: FockState) -> None:
    if a.dims != b.dims or len(a.modes) != len(b.modes) or any(x != y for x, y in zip(a.modes, b.modes)):
        raise ValidationError("states live in different Fock spaces")


def basis_state(modes, pattern, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    modes = tuple(modes)
    state = FockState(modes, np.zeros(int(np.prod(_dims(len(modes), species_kind(modes), cutoff)))), cutoff)
    amps = np.zeros_like(state.amplitudes)
    amps[state.index_of(pattern)] = 1.0
    return state._replace(amps)


def vacuum(modes, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    """All-zero occupation state."""
    modes = tuple(modes)
    return basis_state(modes, (0,) * len(modes), cutoff)


def create(state: FockState, mode) -> FockState:
    """Apply ``a^dagger`` (unnormalised); cutoff overflow lands in ``truncation_loss``."""
    i = state.mode_index(mode)
    out, lost = kernels.ladder_apply(state.amplitudes, state.dims, i, True, state.fermionic)
    return state._replace(out, lost)


def annihilate(state: FockState, mode) -> FockState:
    i = state.mode_index(mode)
    out, _ = kernels.ladder_apply(state.amplitudes, state.dims, i, False, state.fermionic)
    return state._replace(out)


@lru_cache(maxsize=256)
def _ladder_sparse(dims: tuple, mode: int, create: bool, fermionic: bool, backend: str):
    rows, cols, vals = kernels.ladder_coo(dims, mode, create, fermionic)
    size = int(np.prod(dims))
    return sp.csr_matrix((vals, (rows, cols)), shape=(size, size))


def ladder_matrix(dims, mode: int, create: bool, fermionic: bool) -> sp.csr_matrix:
    """Sparse matrix of one (truncated) ladder operator."""
    return _ladder_sparse(tuple(int(d) for d in dims), int(mode), bool(create), bool(fermionic),
                          kernels.backend_name())


# -- creation polynomials ----------------------------------------------------


@dataclass(frozen=True)
class CreationPolynomial:
    """Sum of products of creation operators acting on the vacuum.

    Each term is ``(coefficient, (m1, m2, ...))`` meaning
    ``coefficient * a^dagger(m1) a^dagger(m2) ... |0>``; the rightmost
    operator acts first. Modes are labels or integer positions.
    """

    terms: tuple = ()

    @classmethod
    def monomial(cls, *modes, coeff: complex = 1.0) -> CreationPolynomial:
        return cls(((complex(coeff), tuple(modes)),))

    @classmethod
    def one(cls) -> CreationPolynomial:
        return cls.monomial()

    @property
    def degree(self) -> int:
        return max((len(ops) for _, ops in self.terms), default=0)

    def __add__(self, other: CreationPolynomial) -> CreationPolynomial:
        return CreationPolynomial(self.terms + other.terms)

    def __mul__(self, other):
        if isinstance(other, CreationPolynomial):
            return CreationPolynomial(tuple((c1 * c2, o1 + o2) for c1, o1 in self.terms for c2, o2 in other.terms))
        return CreationPolynomial(tuple((c * complex(other), ops) for c, ops in self.terms))

    def __rmul__(self, other):
        return self * other


def prepare(poly: CreationPolynomial, modes, cutoff: int | None = None) -> FockState:
    """State ``poly(a^dagger)|0>`` over ``modes``."""
    return apply_bogoliubov(poly, BogoliubovMap.identity(tuple(modes)), cutoff=cutoff)


def _apply_linear_creation(vec, dims, row_a, row_b, fermionic):
    # (sum_j conj(a_j) y_j^dagger + conj(b_j) y_j) applied to vec
    out = np.zeros_like(vec)
    lost = 0.0
    for j in range(len(dims)):
        if row_a[j] != 0:
            v, l = kernels.ladder_apply(vec, dims, j, True, fermionic)
            out += np.conj(row_a[j]) * v
            lost += abs(row_a[j]) ** 2 * l
        if row_b[j] != 0:
            v, _ = kernels.ladder_apply(vec, dims, j, False, fermionic)
            out += np.conj(row_b[j]) * v
    return out, lost


def _transformed_vacuum(bmap: BogoliubovMap, dims, fermionic):
    # common null vector of all x_i = alpha y + beta y^dagger
    size = int(np.prod(dims))
    n = len(bmap.target_modes)
    number = sp.csr_matrix((size, size), dtype=complex)
    for i in range(len(bmap.modes)):
        x = sp.csr_matrix((size, size), dtype=complex)
        for j in range(n):
            if bmap.alpha[i, j] != 0:
                x = x + bmap.alpha[i, j] * ladder_matrix(dims, j, False, fermionic)
            if bmap.beta[i, j] != 0:
                x = x + bmap.beta[i, j] * ladder_matrix(dims, j, True, fermionic)
        number = number + x.conj().T @ x
    evals, evecs = np.linalg.eigh(number.toarray())
    v0 = evecs[:, 0]
    ref = v0[int(np.argmax(np.abs(v0)))]
    return v0 * (abs(ref) / ref), float(evals[0])


def apply_bogoliubov(poly: CreationPolynomial, bmap: BogoliubovMap, cutoff: int | None = None,
                     margin: int = DEFAULT_MARGIN) -> FockState:
    """Substitute ``x^dagger`` by the map and expand in the ``y`` Fock basis.

    For a number-conserving map the vacuum is shared and the result is
    exact whenever ``cutoff`` is at least the polynomial degree (the default
    cutoff is ``max(4, degree)``). A map with a creation block needs an
    explicit bosonic ``cutoff``; the transformed vacuum and polynomial are
    then built with ``margin`` extra levels and projected back, the lost
    norm being reported. Fermionic spaces are finite, so nothing is lost.
    """
    fermionic = bmap.species == "fermion"
    ymodes = bmap.target_modes
    if species_kind(ymodes) != bmap.species:
        raise ValidationError("map species does not match its mode labels")
    rows = []
    for coeff, ops in poly.terms:
        rows.append((coeff, [mode_index(bmap.modes, op) for op in ops]))
    n_y = len(ymodes)

    if bmap.number_conserving:
        if cutoff is None:
            cutoff = max(DEFAULT_CUTOFF, poly.degree)
        dims = _dims(n_y, bmap.species, cutoff)
        total = np.zeros(int(np.prod(dims)), dtype=complex)
        total_lost = 0.0
        vac = np.zeros_like(total)
        vac[0] = 1.0
        zero_row = np.zeros(n_y, dtype=complex)
        for coeff, idxs in rows:
            vec = vac
            for i in reversed(idxs):
                vec, lost = _apply_linear_creation(vec, dims, bmap.alpha[i], zero_row, fermionic)
                total_lost += abs(coeff) ** 2 * lost
            total += coeff * vec
        return FockState(ymodes, total, cutoff, total_lost)

    if not fermionic and cutoff is None:
        raise UnsupportedMapError("bosonic map with a creation block needs an explicit cutoff")
    work_cutoff = 1 if fermionic else cutoff + margin
    dims = _dims(n_y, bmap.species, work_cutoff)
    vac, residual = _transformed_vacuum(bmap, dims, fermionic)
    if fermionic and residual > 1e-8:
        raise UnsupportedMapError(f"map has no common vacuum (residual {residual:.3g}); not canonical")
    total = np.zeros_like(vac)
    total_lost = 0.0
    for coeff, idxs in rows:
        vec = vac
        for i in reversed(idxs):
            vec, lost = _apply_linear_creation(vec, dims, bmap.alpha[i], bmap.beta[i], fermionic)
            total_lost += abs(coeff) ** 2 * lost
        total += coeff * vec
    if fermionic:
        return FockState(ymodes, total, 1, total_lost)
    full = FockState(ymodes, total, work_cutoff)
    projected = restrict_cutoff(full, cutoff)
    return FockState(ymodes, projected.amplitudes, cutoff,
                     total_lost + max(0.0, full.norm ** 2 - projected.norm ** 2))


def restrict_cutoff(state: FockState, cutoff: int) -> FockState:
    """Project a bosonic state onto occupations ``<= cutoff`` (no renormalisation)."""
    if state.fermionic or cutoff == state.cutoff:
        return state
    if cutoff > state.cutoff:
        return extend_cutoff(state, cutoff)
    t = state.amplitudes.reshape(state.dims)
    sl = tuple(slice(0, cutoff + 1) for _ in state.modes)
    kept = t[sl].reshape(-1)
    lost = state.norm ** 2 - float(np.vdot(kept, kept).real)
    return FockState(state.modes, kept, cutoff, state.truncation_loss + max(0.0, lost))


def extend_cutoff(state: FockState, cutoff: int) -> FockState:
    """Embed a bosonic state in a space with a larger cutoff."""
    if state.fermionic or cutoff == state.cutoff:
        return state
    if cutoff < state.cutoff:
        return restrict_cutoff(state, cutoff)
    new_dims = (cutoff + 1,) * len(state.modes)
    t = np.zeros(new_dims, dtype=complex)
    t[tuple(slice(0, state.cutoff + 1) for _ in state.modes)] = state.amplitudes.reshape(state.dims)
    return FockState(state.modes, t.reshape(-1), cutoff, state.truncation_loss)


# -- measurement -------------------------------------------------------------


@dataclass(frozen=True)
class DetectionStatistics:
    """Joint count distribution of ideal number-resolving detectors.

    ``detectors[i]`` lists the mode positions whose counts detector ``i``
    sums; ``outcomes`` maps count patterns to probabilities.
    """

    outcomes: dict
    detectors: tuple = ()
    labels: tuple = ()

    def probability(self, pattern) -> float:
        return float(self.outcomes.get(tuple(int(p) for p in pattern), 0.0))

    @property
    def total(self) -> float:
        return float(sum(self.outcomes.values()))

    def max_discrepancy(self, other: DetectionStatistics) -> float:
        keys = set(self.outcomes) | set(other.outcomes)
        return max((abs(self.probability(k) - other.probability(k)) for k in keys), default=0.0)

    def mean_counts(self) -> np.ndarray:
        n = len(self.detectors)
        out = np.zeros(n)
        for pattern, p in self.outcomes.items():
            out += p * np.asarray(pattern, dtype=float)
        return out


def _detector_groups(state: FockState, detectors):
    if detectors is None:
        return tuple((i,) for i in range(len(state.modes)))
    groups = []
    for det in detectors:
        if isinstance(det, (list, tuple)):
            groups.append(tuple(state.mode_index(m) for m in det))
        else:
            groups.append((state.mode_index(det),))
    return tuple(groups)


def number_statistics(state: FockState, detectors=None) -> DetectionStatistics:
    """Born-rule count distribution; the state is normalised first.

    ``detectors`` is a sequence whose entries are a mode or a tuple/list of
    modes (counts summed, e.g. a polarization-blind detector on one port).
    Defaults to one detector per mode.
    """
    groups = _detector_groups(state, detectors)
    norm2 = state.norm ** 2
    if norm2 == 0:
        raise ValidationError("zero vector has no detection statistics")
    probs = np.abs(state.amplitudes) ** 2 / norm2
    occ = state.occupations()
    counts = np.stack([occ[:, list(g)].sum(axis=1) for g in groups], axis=1) if groups else np.zeros((occ.shape[0], 0), int)
    outcomes: dict = {}
    for row, p in zip(map(tuple, counts.tolist()), probs):
        outcomes[row] = outcomes.get(row, 0.0) + float(p)
    labels = tuple(tuple(state.modes[i] for i in g) for g in groups)
    return DetectionStatistics(dict(sorted(outcomes.items())), groups, labels)


# -- reduced states ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ReducedState:
    rho: np.ndarray
    modes: tuple
    dims: tuple = field(default=())

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    @property
    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho)[0])


def partial_trace(state: FockState, keep_modes) -> ReducedState:
    """Density matrix of ``keep_modes`` with the other modes traced out.

    The state is normalised first. Kept modes appear in the order given.
    """
    keep = [state.mode_index(m) for m in keep_modes]
    if len(set(keep)) != len(keep):
        raise ValidationError("duplicate mode in keep_modes")
    if not keep or len(keep) >= len(state.modes):
        raise ValidationError("keep_modes must be a non-empty proper subset")
    rest = [i for i in range(len(state.modes)) if i not in keep]
    psi = state.normalized().amplitudes.reshape(state.dims)
    psi = np.transpose(psi, keep + rest)
    dk = int(np.prod([state.dims[i] for i in keep]))
    mat = psi.reshape(dk, -1)
    rho = mat @ mat.conj().T
    return ReducedState(rho, tuple(state.modes[i] for i in keep), tuple(state.dims[i] for i in keep))


def check_truncation(state: FockState, tol: float = TRUNCATION_TOL) -> FockState:
    """Raise TruncationError when the accumulated loss exceeds ``tol``."""
    if state.truncation_loss > tol:
        raise TruncationError(f"truncation lost {state.truncation_loss:.3g} of the norm (tolerance {tol:g})")
    return state


__all__ = [
    "CreationPolynomial",
    "DetectionStatistics",
    "FockState",
    "ModeLabel",
    "ReducedState",
    "annihilate",
    "apply_bogoliubov",
    "basis_state",
    "check_truncation",
    "create",
    "extend_cutoff",
    "ladder_matrix",
    "number_statistics",
    "partial_trace",
    "prepare",
    "restrict_cutoff",
    "vacuum",
]
