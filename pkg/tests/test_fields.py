import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from relqi.errors import DegenerateMomentumError, ValidationError
from relqi.fields import (
    GAMMA,
    SIGMA,
    antifermion_bogoliubov,
    antifermion_spinor,
    dirac_bogoliubov,
    dirac_spinor,
    em_bogoliubov,
    em_gauge_fix,
    em_polarization_basis,
    frame_map,
    mode_transform,
    scalar_bogoliubov,
    spin_matrix,
    vector_bogoliubov,
    vector_polarization_basis,
)
from relqi.lorentz import METRIC, FourVector, apply, boost, compose, identity, mass_shell, rotation
from relqi.modes import ModeLabel
from strategies import boosts, lightlike, lorentz_transforms, massive, unit_vectors

REST = FourVector(1.0, 0.0, 0.0, 0.0)


def phase_free_distance(a, b):
    """1 - |tr(a^dagger b)| / n, zero iff a = e^{i phi} b for unitary a, b."""
    return 1.0 - abs(np.trace(a.conj().T @ b)) / a.shape[0]


def slash(k):
    return sum(METRIC[mu, mu] * k.array[mu] * GAMMA[mu] for mu in range(4))


# -- scalar ------------------------------------------------------------------


def test_scalar_identity_and_phase():
    k = mass_shell(1.0, (0.1, 0.2, 0.3))
    t = scalar_bogoliubov(identity(), k)
    assert t.matrix[0, 0] == 1 and t.phase == 1
    ell = FourVector(0.5, 0.1, 0.0, -0.2)
    t = scalar_bogoliubov(boost(0.7, "x"), k, ell)
    kp = apply(boost(0.7, "x"), k)
    assert t.phase == pytest.approx(np.exp(-1j * kp.dot(ell)))
    assert t.target_momentum.isclose(kp)


@given(lorentz_transforms(), st.tuples(*[st.floats(-3, 3)] * 4), st.tuples(*[st.floats(-3, 3)] * 4))
def test_phase_law_is_multiplicative(lam, l1, l2):
    k = mass_shell(0.5, (0.3, -0.2, 0.4))
    a, b = FourVector(*l1), FourVector(*l2)
    p = scalar_bogoliubov(lam, k, a + b).phase
    assert p == pytest.approx(scalar_bogoliubov(lam, k, a).phase * scalar_bogoliubov(lam, k, b).phase, abs=1e-9)


# -- massive vector ------------------------------------------------------------


def test_vector_basis_orthonormal_and_transverse():
    k = mass_shell(2.0, (0.5, -1.0, 3.0))
    basis = vector_polarization_basis(k, 2.0)
    np.testing.assert_allclose(basis.gram(), np.eye(3), atol=1e-12)
    assert basis.gauge_residuals()["lorentz"] < 1e-12


def test_vector_rest_rotation_is_rotation_matrix():
    lam = rotation(0.8, [0.0, 0.6, 0.8])
    t = vector_bogoliubov(lam, FourVector(1, 0, 0, 0), 1.0)
    # oracle: Cartesian rest basis, eps_j . (R eps_l) = R_jl
    np.testing.assert_allclose(t.matrix, lam.matrix[1:, 1:], atol=1e-12)
    assert t.raw_deviation < 1e-12


def _wigner_oracle(lam, k, m):
    # W = L(Lambda k)^-1 Lambda L(k) built from the textbook boost formula
    def lboost(p):
        g, u = p.t / m, p.spatial / m
        out = np.eye(4)
        out[0, 0] = g
        out[0, 1:] = out[1:, 0] = u
        out[1:, 1:] += np.outer(u, u) / (1 + g)
        return out

    kp = apply(lam, k)
    w = METRIC @ lboost(kp).T @ METRIC @ lam.matrix @ lboost(k)
    return w[1:, 1:]


@given(lorentz_transforms(), massive())
def test_vector_matrix_is_wigner_rotation(lam, km):
    k, m = km
    t = vector_bogoliubov(lam, k, m)
    np.testing.assert_allclose(t.matrix, _wigner_oracle(lam, k, m), atol=1e-8)
    assert t.unitarity_deviation < 1e-10


def test_vector_identity():
    k = mass_shell(1.0, (1, 2, 3))
    t = vector_bogoliubov(identity(), k, 1.0)
    np.testing.assert_allclose(t.matrix, np.eye(3), atol=1e-12)


def test_vector_needs_mass():
    with pytest.raises(ValidationError):
        vector_polarization_basis(mass_shell(0.0, (0, 0, 1)), 0.0)


# -- electromagnetic -------------------------------------------------------------


def test_em_basis_along_z_is_x_y():
    basis = em_polarization_basis(mass_shell(0.0, (0, 0, 2.0)))
    np.testing.assert_allclose(basis.vectors[:, 1:].real, [[1, 0, 0], [0, 1, 0]], atol=1e-15)


def test_em_basis_generic_direction():
    k = mass_shell(0.0, (0.3, -0.4, 1.2))
    basis = em_polarization_basis(k)
    np.testing.assert_allclose(basis.gram(), np.eye(2), atol=1e-12)
    res = basis.gauge_residuals()
    assert res["lorentz"] < 1e-12 and res["coulomb"] < 1e-12
    # right-handed: H x V along k
    h, v = basis.vectors[:, 1:].real
    np.testing.assert_allclose(np.cross(h, v), k.spatial / np.linalg.norm(k.spatial), atol=1e-12)


def test_em_basis_rejects_bad_momenta():
    with pytest.raises(DegenerateMomentumError):
        em_polarization_basis(FourVector(1, 0, 0, 0))
    with pytest.raises(ValidationError):
        em_polarization_basis(FourVector(2, 0, 0, 1))


@given(lorentz_transforms(), lightlike())
def test_gauge_fix_restores_both_gauges(lam, k):
    alphas, fixed = em_gauge_fix(lam, k)
    assert alphas.shape == (2,)
    res = fixed.gauge_residuals()
    scale = max(1.0, abs(fixed.momentum.t))
    assert res["lorentz"] < 1e-12 * scale ** 2
    assert res["coulomb"] < 1e-12 * scale ** 2


def test_gauge_fix_rotation_needs_no_correction():
    k = mass_shell(0.0, (0.0, 1.0, 1.0))
    alphas, _ = em_gauge_fix(rotation(0.4, "x"), k)
    np.testing.assert_allclose(alphas, 0.0, atol=1e-15)


@given(boosts(), lightlike())
def test_em_pure_boost_is_identity(lam, k):
    t = em_bogoliubov(lam, k)
    assert np.max(np.abs(t.matrix - np.eye(2))) < 1e-10


@pytest.mark.parametrize("theta", [0.3, 1.0, np.pi, 5.0])
def test_em_rotation_about_propagation_axis(theta):
    k = mass_shell(0.0, (0, 0, 1.5))
    t = em_bogoliubov(rotation(theta, "z"), k)
    # oracle: eps_j . (R eps_l) with eps = (x, y)
    c, s = np.cos(theta), np.sin(theta)
    np.testing.assert_allclose(t.matrix, [[c, -s], [s, c]], atol=1e-12)


@given(lorentz_transforms(), lightlike())
def test_em_unitary(lam, k):
    assert em_bogoliubov(lam, k).unitarity_deviation < 1e-10


@given(lorentz_transforms(), lorentz_transforms(), lightlike())
def test_em_depends_only_on_rotation_factor(lam, other, k):
    from relqi.lorentz import decompose

    d = decompose(lam)
    np.testing.assert_allclose(em_bogoliubov(lam, k).matrix, em_bogoliubov(d.r2, k).matrix, atol=1e-8)


@given(st.floats(-np.pi, np.pi), unit_vectors(), st.floats(-np.pi, np.pi), unit_vectors(), lightlike())
def test_em_composition_for_rotations(a1, n1, a2, n2, k):
    r1, r2 = rotation(a1, n1), rotation(a2, n2)
    lhs = em_bogoliubov(compose(r2, r1), k).matrix
    rhs = em_bogoliubov(r2, apply(r1, k)).matrix @ em_bogoliubov(r1, k).matrix
    np.testing.assert_allclose(lhs, rhs, atol=1e-8)


def test_em_identity_phase_only():
    k = mass_shell(0.0, (1.0, 0, 0))
    ell = FourVector(0.3, 0.0, 0.0, 0.0)
    t = em_bogoliubov(identity(), k, ell)
    np.testing.assert_allclose(t.matrix, np.eye(2), atol=1e-14)
    assert t.phase == pytest.approx(np.exp(-0.3j))


# -- Dirac spinors ---------------------------------------------------------------


def test_rest_spinors_are_unit_vectors():
    np.testing.assert_allclose(dirac_spinor(REST, 1.0, 1).components, [1, 0, 0, 0])
    np.testing.assert_allclose(dirac_spinor(REST, 1.0, 2).components, [0, 1, 0, 0])


def test_spinor_closed_form_along_z():
    k = mass_shell(1.0, (0, 0, 1))
    u1, u2 = dirac_spinor(k, 1.0, 1), dirac_spinor(k, 1.0, 2)
    assert u1.bar() @ u1.components == pytest.approx(1.0)
    assert u1.bar() @ u2.components == pytest.approx(0.0)
    e = np.sqrt(2.0)
    np.testing.assert_allclose(u1.components, np.sqrt((e + 1) / 2) * np.array([1, 0, 1 / (e + 1), 0]))


@given(massive())
def test_spinors_orthonormal_and_solve_dirac_equation(km):
    k, m = km
    us = [dirac_spinor(k, m, j) for j in (1, 2)]
    vs = [antifermion_spinor(k, m, j) for j in (1, 2)]
    gram_u = np.array([[a.bar() @ b.components for b in us] for a in us])
    gram_v = np.array([[-(a.bar() @ b.components) for b in vs] for a in vs])
    np.testing.assert_allclose(gram_u, np.eye(2), atol=1e-10)
    np.testing.assert_allclose(gram_v, np.eye(2), atol=1e-10)
    ks = slash(k)
    scale = max(1.0, k.t)
    for u in us:
        assert np.max(np.abs((ks - m * np.eye(4)) @ u.components)) < 1e-10 * scale
    for v in vs:
        assert np.max(np.abs((ks + m * np.eye(4)) @ v.components)) < 1e-10 * scale
    # u and v orthogonal under bar
    assert max(abs(u.bar() @ v.components) for u in us for v in vs) < 1e-10


def test_spinor_errors():
    with pytest.raises(ValidationError):
        dirac_spinor(REST, 0.0, 1)
    with pytest.raises(ValidationError):
        dirac_spinor(REST, 1.0, 3)
    with pytest.raises(ValidationError):
        dirac_spinor(FourVector(2, 0, 0, 0), 1.0, 1)


@given(lorentz_transforms())
def test_spin_matrix_intertwines_gamma(lam):
    s = spin_matrix(lam)
    sinv = np.linalg.inv(s)
    for mu in range(4):
        rhs = sum(lam.matrix[mu, nu] * GAMMA[nu] for nu in range(4))
        np.testing.assert_allclose(sinv @ GAMMA[mu] @ s, rhs, atol=1e-9 * max(1, np.abs(lam.matrix).max()))


# -- Dirac transforms ----------------------------------------------------------------


def test_dirac_identity_flags_singular_raw():
    t = dirac_bogoliubov(identity(), mass_shell(1.0, (0.2, 0.1, 0.0)), 1.0)
    np.testing.assert_allclose(t.matrix, np.eye(2), atol=1e-12)
    assert t.raw is None and t.diagnostics["singular_denominator"]
    assert t.raw_deviation == float("inf")


def test_dirac_identity_other_mass_has_raw():
    t = dirac_bogoliubov(identity(), REST.__class__(2.0, 0, 0, 0), 2.0)
    assert t.raw is not None
    np.testing.assert_allclose(t.matrix, np.eye(2), atol=1e-12)


@pytest.mark.parametrize("theta", [0.4, 1.7, np.pi])
def test_dirac_rest_rotation_half_angle(theta):
    t = dirac_bogoliubov(rotation(theta, "z"), REST, 1.0)
    # oracle: direct contraction with exp(-i theta Sigma_z / 2)
    sz = np.kron(np.eye(2), SIGMA[2])
    s = expm(-0.5j * theta * sz)
    us = np.column_stack([dirac_spinor(REST, 1.0, j).components for j in (1, 2)])
    oracle = us.conj().T @ GAMMA[0] @ s @ us
    np.testing.assert_allclose(oracle, np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]), atol=1e-14)
    assert phase_free_distance(t.matrix, oracle) < 1e-12


def test_dirac_two_pi_is_minus_identity_up_to_phase():
    us = np.column_stack([dirac_spinor(REST, 1.0, j).components for j in (1, 2)])
    lift = expm(-0.5j * 2 * np.pi * np.kron(np.eye(2), SIGMA[0]))
    np.testing.assert_allclose(us.conj().T @ GAMMA[0] @ lift @ us, -np.eye(2), atol=1e-12)
    t = dirac_bogoliubov(rotation(2 * np.pi, "x"), REST, 1.0)
    assert phase_free_distance(t.matrix, -np.eye(2)) < 1e-10


@pytest.mark.parametrize("eta", [0.3, 1.0, 2.5])
def test_dirac_rest_boost(eta):
    lam = boost(eta, "z")
    t = dirac_bogoliubov(lam, REST, 1.0)
    np.testing.assert_allclose(t.matrix, np.eye(2), atol=1e-12)
    kp = apply(lam, REST)
    # oracle: closed-form spinors at (cosh eta, 0, 0, sinh eta)
    contraction = np.array([[dirac_spinor(kp, 1.0, j).bar() @ dirac_spinor(REST, 1.0, l).components
                             for l in (1, 2)] for j in (1, 2)])
    np.testing.assert_allclose(contraction, np.cosh(eta / 2) * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(t.raw, 2 * np.cosh(eta / 2) / (1 - np.cosh(eta)) * np.eye(2), atol=1e-12)


def test_dirac_diagnostics_reported():
    lam = compose(rotation(0.5, "y"), boost(0.9, "x"))
    t = dirac_bogoliubov(lam, mass_shell(1.0, (0.3, 0.0, 0.4)), 1.0)
    for key in ("closed_form_det", "contraction_det", "covariant_det", "wigner_deviation", "k_dot_lambda_k"):
        assert key in t.diagnostics
    assert np.isfinite(t.raw_deviation)
    assert t.diagnostics["wigner_deviation"] < 1e-10


@given(lorentz_transforms(), massive())
def test_dirac_unitary_and_phase_fixed(lam, km):
    k, m = km
    t = dirac_bogoliubov(lam, k, m)
    assert t.unitarity_deviation < 1e-10
    d = np.diag(t.matrix)
    mags = np.abs(d)
    ref = d[np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[0]]
    if abs(ref) > 1e-12:
        assert abs(ref.imag) < 1e-12 and ref.real > 0


@given(lorentz_transforms(), lorentz_transforms(), massive())
def test_dirac_composition_up_to_phase(l1, l2, km):
    k, m = km
    lhs = dirac_bogoliubov(compose(l2, l1), k, m).matrix
    rhs = dirac_bogoliubov(l2, apply(l1, k), m).matrix @ dirac_bogoliubov(l1, k, m).matrix
    assert phase_free_distance(lhs, rhs) < 1e-8


def test_antifermion_cases():
    np.testing.assert_allclose(antifermion_bogoliubov(identity(), REST, 1.0).matrix, np.eye(2), atol=1e-12)
    t = antifermion_bogoliubov(rotation(2 * np.pi, "y"), REST, 1.0)
    assert phase_free_distance(t.matrix, -np.eye(2)) < 1e-10
    np.testing.assert_allclose(antifermion_bogoliubov(boost(1.2, "z"), REST, 1.0).matrix, np.eye(2), atol=1e-12)


def test_antifermion_matches_fermion_at_rest_rotation():
    lam = rotation(0.9, [0.0, 0.6, 0.8])
    f = dirac_bogoliubov(lam, REST, 1.0).matrix
    a = antifermion_bogoliubov(lam, REST, 1.0).matrix
    assert phase_free_distance(f, a) < 1e-12


@given(lorentz_transforms(), lorentz_transforms(), massive())
def test_vector_composition(l1, l2, km):
    k, m = km
    lhs = vector_bogoliubov(compose(l2, l1), k, m).matrix
    rhs = vector_bogoliubov(l2, apply(l1, k), m).matrix @ vector_bogoliubov(l1, k, m).matrix
    np.testing.assert_allclose(lhs, rhs, atol=1e-8)


def test_mode_transform_dispatch():
    k = mass_shell(1.0, (0, 0, 1))
    for kind in ("scalar", "vector", "dirac", "antidirac"):
        assert mode_transform(kind, boost(0.1, "x"), k, 1.0).kind == kind
    assert mode_transform("em", boost(0.1, "x"), mass_shell(0, (0, 0, 1))).kind == "em"
    with pytest.raises(ValidationError):
        mode_transform("graviton", identity(), k)


# -- frame maps ------------------------------------------------------------------------


def test_frame_map_is_inverse_of_mode_matrix():
    k = mass_shell(0.0, (0.2, 0.0, 1.0))
    modes = tuple(ModeLabel(k, j, "boson", port=0) for j in (0, 1))
    lam = compose(rotation(0.7, "y"), boost(0.4, "x"))
    fmap = frame_map(modes, lam, "em")
    full = em_bogoliubov(lam, k).full
    # a = alpha a'  and  a' = full a  => alpha = full^-1
    np.testing.assert_allclose(fmap.alpha @ full, np.eye(2), atol=1e-12)
    assert fmap.is_canonical()
    assert all(t.momentum.isclose(apply(lam, k), 1e-12) for t in fmap.target_modes)


def test_frame_map_needs_complete_multiplets():
    k = mass_shell(0.0, (0.0, 0.0, 1.0))
    with pytest.raises(ValidationError):
        frame_map((ModeLabel(k, 0, "boson"),), boost(1, "z"), "em")
