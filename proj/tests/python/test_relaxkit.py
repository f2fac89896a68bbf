import math

import numpy as np
import pytest
from scipy import special

import relaxkit as rk


def test_debye_closed_forms():
    spec = rk.ModelSpec("debye", tau=2.0)
    t = np.logspace(-2, 1, 9)
    np.testing.assert_allclose(rk.relaxation(spec, t), np.exp(-t / 2.0), rtol=1e-13)
    w = np.logspace(-2, 2, 9)
    np.testing.assert_allclose(rk.spectral(spec, w), 1.0 / (1.0 + 1j * w), rtol=1e-13)


def test_havriliak_negami_spectrum():
    spec = rk.ModelSpec("hn", alpha=0.6, beta=0.4)
    w = np.logspace(-3, 3, 13)
    ref = (1.0 + (1j * w) ** 0.6) ** -0.4
    np.testing.assert_allclose(rk.spectral(spec, w), ref, rtol=1e-12)


def test_cole_davidson_relaxation_is_incomplete_gamma():
    spec = rk.ModelSpec("cd", beta=0.35)
    t = np.array([0.01, 0.5, 3.0])
    np.testing.assert_allclose(rk.relaxation(spec, t), special.gammaincc(0.35, t), rtol=1e-11)


def test_mittag_leffler_half():
    x = np.linspace(0.0, 3.0, 7)
    np.testing.assert_allclose(rk.prabhakar(0.5, 1.0, 1.0, x), special.erfcx(x), rtol=1e-12)


def test_levy_half():
    x = np.array([0.1, 1.0, 10.0])
    ref = np.exp(-1 / (4 * x)) / (2 * math.sqrt(math.pi) * x**1.5)
    np.testing.assert_allclose(rk.levy_density(0.5, x), ref, rtol=1e-9)


def test_sonine_pair():
    spec = rk.ModelSpec("jws", alpha=0.5, beta=1.5)
    s = np.logspace(-3, 3, 7)
    prod = s * rk.memory_M_hat(spec, s, rate=2.0) * rk.memory_k_hat(spec, s, rate=2.0)
    np.testing.assert_allclose(prod, 1.0, rtol=1e-13)


def test_pdf_normalization():
    from scipy.integrate import quad

    spec = rk.ModelSpec("hn", alpha=0.7, beta=0.5)
    g = lambda xi: float(rk.pdf(spec, np.array([xi]))[0])
    total = quad(g, 0, 1, limit=200)[0] + quad(g, 1, np.inf, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_fit_recovers_noiseless_spectrum():
    truth = rk.ModelSpec("hn", alpha=0.75, beta=1 / 3)
    w = np.logspace(-3, 3, 40)
    omega, re, im = rk.synthesize_spectrum(truth, w, eps0=5.0, epsinf=2.0)
    r = rk.fit_spectrum(omega, re, im, model="hn")
    assert r["converged"]
    assert r["alpha"] == pytest.approx(0.75, rel=1e-6)
    assert r["beta"] == pytest.approx(1 / 3, rel=1e-6)
    assert r["eps_static"] == pytest.approx(5.0, rel=1e-6)


def test_auto_selection():
    w = np.logspace(-3, 3, 40)
    omega, re, im = rk.synthesize_spectrum(rk.ModelSpec("cc", alpha=0.6), w)
    assert rk.fit_spectrum(omega, re, im)["model"] == "cc"


def test_invalid_parameters_raise():
    with pytest.raises(ValueError):
        rk.ModelSpec("hn", alpha=1.5, beta=0.5)
    with pytest.raises(ValueError):
        rk.pdf(rk.ModelSpec("debye"), np.array([1.0]))


def test_verify_and_figures():
    res = rk.verify("reductions")
    assert res and all(c["passed"] for c in res)
    tables = rk.figure_tables(20)
    assert set(tables) >= {"fig1", "fig5a", "fig6"}
    assert len(tables["fig1"]["t"]) == 20
