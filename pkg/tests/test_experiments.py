import numpy as np
import pytest

from relqi.errors import FrameInvarianceError, ValidationError
from relqi.experiments import (
    ExperimentReport,
    frame_invariance_sweep,
    random_boosts,
    random_lorentz,
    twin_electron,
    twin_photon,
)
from relqi.fields import mode_transform
from relqi.fock import DetectionStatistics
from relqi.lorentz import boost, compose, identity, mass_shell, rotation

KZ = mass_shell(0, (0, 0, 1))
KX = mass_shell(0, (1, 0, 0))
REST = mass_shell(1.0, (0, 0, 0))


@pytest.mark.parametrize("lam", [identity(), boost(1.0, "z"), boost(1.0, [0, 1, 0]), rotation(0.9, "z")])
def test_twin_photon_hom(lam):
    rep = twin_photon(KZ, KZ, lam)
    assert rep.extras["rest_coincidence"] < 1e-12
    assert rep.extras["boosted_coincidence"] < 1e-12
    assert rep.max_discrepancy < 1e-10
    assert rep.verdict == "pass"


def test_twin_photon_distinct_directions_and_polarization():
    lam = compose(rotation(0.3, "x"), boost(1.5, [1 / np.sqrt(2), 1 / np.sqrt(2), 0]))
    for pol in (0, 1):
        rep = twin_photon(KZ, KX, lam, polarization=pol)
        assert rep.extras["rest_coincidence"] < 1e-12
        assert rep.max_discrepancy < 1e-9


def test_twin_photon_rotation_about_beam_rotates_polarization():
    theta = 0.7
    rep = twin_photon(KZ, KZ, rotation(theta, "z"))
    # oracle: both ports see the same 2x2 polarization rotation; only spatial counts are compared
    u = mode_transform("em", rotation(theta, "z"), KZ).matrix
    np.testing.assert_allclose(u, [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], atol=1e-12)
    assert rep.boosted_frame_stats.probability((2, 0)) == pytest.approx(0.5, abs=1e-12)
    assert rep.max_discrepancy < 1e-12


def test_twin_photon_rejects_massive_momentum():
    with pytest.raises(ValidationError):
        twin_photon(REST, KZ, identity())
    with pytest.raises(ValidationError):
        twin_photon(KZ, KZ, identity(), polarization=2)


def test_twin_electron_identity():
    rep = twin_electron(REST, REST, 1.0, 1, identity())
    assert rep.extras["rest_spatial_coincidence"] == pytest.approx(1.0, abs=1e-12)
    assert rep.extras["double_occupation"] < 1e-12
    np.testing.assert_allclose(np.abs(rep.extras["eq23_amplitudes"]), [1.0, 0.0], atol=1e-12)
    assert rep.passed


@pytest.mark.parametrize("j", [1, 2])
def test_twin_electron_boost_at_rest(j):
    rep = twin_electron(REST, REST, 1.0, j, boost(0.8, "z"))
    amps = np.asarray(rep.extras["eq23_amplitudes"])
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-10)
    assert rep.extras["boosted_spatial_coincidence"] == pytest.approx(1.0, abs=1e-12)
    assert rep.extras["eq23_deviation"] < 1e-10
    assert rep.extras["closed_form_deviation"] < 1e-10


def test_twin_electron_rotation_mixes_spins():
    theta = 1.1
    rep = twin_electron(REST, REST, 1.0, 1, rotation(theta, "x"))
    amps = np.asarray(rep.extras["eq23_amplitudes"])
    # oracle: spin-1/2 rotation about x has |D_11| = cos(theta/2), |D_21| = sin(theta/2)
    np.testing.assert_allclose(np.abs(amps), [np.cos(theta / 2) ** 2, np.sin(theta / 2) ** 2], atol=1e-10)
    assert rep.extras["double_occupation"] < 1e-12
    assert rep.max_discrepancy < 1e-12


def test_twin_electron_moving_momenta():
    k1 = mass_shell(0.5, (0.3, 0, 1.0))
    k2 = mass_shell(0.5, (-0.2, 0.4, 0.1))
    rep = twin_electron(k1, k2, 0.5, 2, compose(rotation(0.4, "y"), boost(2.0, [1 / np.sqrt(2), 0, 1 / np.sqrt(2)])))
    assert rep.max_discrepancy < 1e-9
    assert rep.extras["closed_form_deviation"] < 1e-10
    assert rep.passed


def test_twin_electron_validation():
    with pytest.raises(ValidationError):
        twin_electron(REST, REST, 0.0, 1, identity())
    with pytest.raises(ValidationError):
        twin_electron(REST, REST, 1.0, 3, identity())
    with pytest.raises(ValidationError):
        twin_electron(KZ, REST, 1.0, 1, identity())


def test_sweep_random_boosts():
    rng = np.random.default_rng(11)
    family = random_boosts(20, rng, max_rapidity=2.0)
    assert all(np.arccosh(lam.matrix[0, 0]) <= 2.0 + 1e-12 for lam in family)
    rep = frame_invariance_sweep(lambda lam: twin_photon(KZ, KZ, lam), family)
    assert len(rep) == 20 and rep.max_discrepancy < 1e-9 and rep.verdict == "pass"


def test_sweep_mixed_electrons():
    rng = np.random.default_rng(12)
    k = mass_shell(1.0, (0.2, 0.1, 0.5))
    rep = frame_invariance_sweep(lambda lam: twin_electron(k, REST, 1.0, 1, lam), random_lorentz(8, rng))
    assert rep.max_discrepancy < 1e-9


def test_sweep_empty_family():
    rep = frame_invariance_sweep(lambda lam: twin_photon(KZ, KZ, lam), [])
    assert len(rep) == 0 and rep.max_discrepancy == 0.0 and rep.verdict == "pass"


def test_sweep_fails_loudly():
    stats_a = DetectionStatistics({(1, 1): 1.0}, (), ())
    stats_b = DetectionStatistics({(2, 0): 1.0}, (), ())
    bad = ExperimentReport(stats_a, stats_b, stats_a.max_discrepancy(stats_b), {})
    with pytest.raises(FrameInvarianceError) as info:
        frame_invariance_sweep(lambda lam: bad, [identity()])
    assert info.value.report.max_discrepancy == 1.0
    rep = frame_invariance_sweep(lambda lam: bad, [identity()], raise_on_fail=False)
    assert rep.verdict == "fail"
