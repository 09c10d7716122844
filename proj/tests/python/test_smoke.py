import math

import numpy as np
import pytest

import twophase as tp

RT = tp.FluidParams(rho1=1, rho2=2, mu1=1, mu2=1, sigma=1, gamma_a=1)
STABLE = tp.FluidParams(rho1=2, rho2=1, mu1=1, mu2=1, sigma=1, gamma_a=1)


def test_k_limits():
    half = tp.FluidParams(rho1=1, rho2=1, mu1=0.5, mu2=0.5)
    assert abs(tp.k_of_z(half, 1e-6) - 0.5) < 1e-4
    unit = tp.FluidParams(rho1=1, rho2=1, mu1=1, mu2=1)
    assert abs(1e8 * tp.k_of_z(unit, 1e8) - 0.5) < 1e-3


def test_growth_rate_and_zero_counts():
    assert tp.critical_wavenumber(RT) == pytest.approx(1.0)
    assert tp.critical_wavenumber(STABLE) is None
    lam = tp.growth_rate(RT, 0.5)
    assert lam == pytest.approx(0.203043508271201, rel=1e-12)
    assert abs(tp.dispersion_symbol(RT, lam, 0.5)) < 1e-12
    assert tp.count_zeros_rhp(RT, 0.5) == 1
    assert tp.count_zeros_rhp(RT, 1.5) == 0
    curve = tp.dispersion_curve(STABLE, [0.1, 1.0, 5.0])
    assert [r["zero_count"] for r in curve["rows"]] == [0, 0, 0]


def test_mode_response():
    lam = tp.growth_rate(RT, 0.5)
    t = np.linspace(20 / lam / 100, 20 / lam, 100)
    r = tp.mode_response(RT, 0.5, t)
    assert r["values"].dtype == np.complex128
    assert r["fitted_rate"] == pytest.approx(lam, rel=5e-3)


def test_curvature():
    x = 2 * np.pi * np.arange(128) / 128
    h = 0.3 * np.sin(x)
    assert tp.curvature_identity_error(h) < 1e-8
    kappa = tp.mean_curvature(h)
    exact = -0.3 * np.sin(x) / (1 + (0.3 * np.cos(x)) ** 2) ** 1.5
    assert np.max(np.abs(kappa - exact)) < 1e-12


def test_frechet_on_a_nonbilinear_kernel():
    assert "G5" in tp.kernel_names()
    c = tp.check_frechet("G5", RT, samples=1)
    assert 3.5 <= c["ratio"] <= 4.5
    with pytest.raises(tp.Error) as err:
        tp.check_frechet("nope", RT)
    assert err.value.code == "UnknownKernel"


def test_spaces():
    x = np.linspace(-8, 8, 401)
    g = np.exp(-x * x)
    a = tp.slobodeckij_seminorm(g, -8, 8, 0.5, 2)["value"]
    b = tp.fourier_seminorm_p2(g, -8, 8, 0.5)["value"]
    assert a == pytest.approx(b, rel=1e-3)
    with pytest.raises(tp.Error):
        tp.slobodeckij_seminorm(g, -8, 8, 1.5, 2)

    xs = 2 * np.pi * np.arange(64) / 64
    c = np.cos(5 * xs)
    assert np.allclose(tp.riesz_potential(c, 0, 2 * math.pi, 0.4), 5**0.4 * c, atol=1e-12)

    fam = tp.partition_of_unity(1.0, 1, 0.0, 0.5, 81)
    assert fam["max_sum_deviation"] <= 1e-12
    assert sum(p**2 for p in fam["phi"]) == pytest.approx(np.ones(81))
