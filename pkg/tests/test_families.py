import math

import numpy as np
import pytest

from hconv.errors import ParamOutOfRange
from hconv.families import (
    FAMILIES,
    DcpStatus,
    FamilyParams,
    build_family,
    candidate_convolvers,
    convolver_by_name,
    dilatation_catalog,
    f_alpha_prefunction,
    f_theta_prefunction,
    f_theta_rho,
    koebe_shear_prefunction,
    mobius_dilatation,
    parse_omega,
    phi_beta,
    phi_beta_status,
    slanted_halfplane_prefunction,
    strip_map,
)
from hconv.series import evaluate, geometric

N = 256
Z = 0.6 * np.exp(1j * np.linspace(0, 2 * np.pi, 24, endpoint=False))


def test_family_params_validation():
    FamilyParams()
    for bad in ({"alpha": 1.5}, {"beta": -2}, {"theta": 0.01}, {"slant_alpha": 2.0}):
        with pytest.raises(ParamOutOfRange):
            FamilyParams(**bad)


@pytest.mark.parametrize("alpha", [-1, -0.5, 0, 0.5, 1])
def test_f_alpha_closed_form(alpha):
    F = f_alpha_prefunction(alpha, N)
    np.testing.assert_allclose(evaluate(F, Z), Z * (1 - alpha * Z) / (1 - Z * Z), atol=1e-13)


def test_f_theta_closed_form_and_derivative():
    theta = 1.0
    F = f_theta_prefunction(theta, N)
    u = np.exp(1j * theta)
    exact = np.log((1 + Z * u) / (1 + Z / u)) / (2j * math.sin(theta))
    np.testing.assert_allclose(evaluate(F, Z), exact, atol=1e-13)
    rho = f_theta_rho(theta)
    assert rho(0) == pytest.approx(1.0)
    # Re rho vanishes on the unit circle
    t = np.linspace(0.1, 3.0, 7)
    np.testing.assert_allclose(rho(np.exp(1j * t)).real, 0, atol=1e-12)


def test_koebe_and_slanted_closed_forms():
    np.testing.assert_allclose(evaluate(koebe_shear_prefunction(N), Z), Z / (1 - Z) ** 2, atol=1e-10)
    s = 0.7
    np.testing.assert_allclose(
        evaluate(slanted_halfplane_prefunction(s, N), Z), Z / (1 - np.exp(1j * s) * Z), atol=1e-13
    )


def test_strip_map_closed_form():
    np.testing.assert_allclose(evaluate(strip_map(N), Z), 0.5 * np.log((1 + Z) / (1 - Z)), atol=1e-13)


def test_phi_beta_endpoints():
    assert phi_beta(-1.0, N) == geometric(N)
    np.testing.assert_allclose(evaluate(phi_beta(1.0, N), Z), Z / (1 + Z), atol=1e-13)


def test_dcp_status():
    assert phi_beta_status(1.0) is DcpStatus.PROVEN_DCP
    assert phi_beta_status(-1.0) is DcpStatus.PROVEN_DCP
    for b in (-0.99, -0.5, 0.0, 0.5, 0.99):
        assert phi_beta_status(b) is DcpStatus.NOT_DCP
    statuses = {c.name: c.status for c in candidate_convolvers(0.0, 16)}
    assert statuses == {
        "identity": DcpStatus.PROVEN_DCP,
        "linear": DcpStatus.PROVEN_DCP,
        "strip": DcpStatus.CANDIDATE,
        "phi_beta": DcpStatus.NOT_DCP,
    }
    with pytest.raises(KeyError):
        convolver_by_name("nope")


def test_mobius_dilatation():
    w = mobius_dilatation(0.3, order=N)
    np.testing.assert_allclose(evaluate(w, Z), (0.3 + Z) / (1 + 0.3 * Z), atol=1e-14)
    with pytest.raises(ParamOutOfRange):
        mobius_dilatation(1.0)
    half = mobius_dilatation(0.3, 0.5, order=N)
    np.testing.assert_allclose(half.coeffs, 0.5 * w.coeffs)


def test_parse_omega_catalog():
    assert parse_omega("zero", 8).coeffs.tolist() == [0] * 9
    assert parse_omega("z", 8)[1] == 1
    assert parse_omega("z2", 8)[2] == 1
    assert parse_omega("0.5*z3", 8)[3] == 0.5
    assert parse_omega("mobius:a=0.3", 8) == mobius_dilatation(0.3, order=8)
    assert parse_omega("mobius:a=0.3;mu=0.5", 8) == mobius_dilatation(0.3, 0.5, order=8)
    for bad in ("w", "mobius:b=1"):
        with pytest.raises(ValueError):
            parse_omega(bad, 8)
    names = [name for name, _ in dilatation_catalog(8)]
    assert names == ["zero", "z", "z2", "mobius:a=0.3"]


def test_build_family():
    assert set(FAMILIES) == {"f_alpha", "f_theta", "koebe_shear", "slanted", "phi_beta"}
    assert build_family("koebe_shear", order=4)[4] == 4
    assert build_family("f_alpha", 0.5, 4) == f_alpha_prefunction(0.5, 4)
    with pytest.raises(ValueError):
        build_family("f_alpha", None, 4)
    with pytest.raises(KeyError):
        build_family("nope", 0.0, 4)
