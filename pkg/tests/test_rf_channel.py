import math

import numpy as np
import pytest
from scipy import integrate, stats

from rfso.rf_channel import (
    PrsRfParams,
    jakes_correlation,
    prs_cdf,
    prs_moment,
    prs_pdf,
    prs_terms,
    sample_selected_snr,
)

CASES = [PrsRfParams(1, 1, 0.3, 2.0), PrsRfParams(4, 3, 0.8, 1.5),
         PrsRfParams(5, 5, 1.0, 1.0), PrsRfParams(6, 2, 0.0, 4.0), PrsRfParams(8, 8, 0.95, 10.0)]


def test_best_of_five_perfect_csi():
    p = PrsRfParams(5, 5, 1.0, 1.0)
    assert prs_cdf(1.0, p) == pytest.approx((1 - math.exp(-1.0)) ** 5, rel=1e-12)
    assert prs_cdf(1.0, p) == pytest.approx(0.100925, abs=1e-6)


def test_jakes_values():
    assert jakes_correlation(100.0, 1e-3) == pytest.approx(0.903713, abs=1e-6)
    zero = 2.404825557695773 / (2 * math.pi)
    assert zero == pytest.approx(0.38274, abs=1e-5)
    assert abs(jakes_correlation(zero, 1.0)) < 1e-12
    assert jakes_correlation(0.5, 1.0) < 0  # past the first zero; callers clamp
    with pytest.raises(ValueError):
        jakes_correlation(-1.0, 1.0)


@pytest.mark.parametrize("p", CASES)
def test_pdf_normalised(p):
    total = integrate.quad(lambda x: prs_pdf(x, p), 0, np.inf, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("p", CASES)
def test_pdf_is_cdf_derivative(p):
    x = np.linspace(0.05, 5 * p.snr, 40)
    h = 1e-6 * p.snr
    fd = (prs_cdf(x + h, p) - prs_cdf(x - h, p)) / (2 * h)
    # Central differences of 1 - sum(...) carry ~1e-16 / h of cancellation noise.
    np.testing.assert_allclose(fd, prs_pdf(x, p), rtol=1e-6, atol=1e-9)


@pytest.mark.parametrize("p", CASES)
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_moments_match_quadrature(p, t):
    ref = integrate.quad(lambda x: x**t * prs_pdf(x, p), 0, np.inf, limit=200)[0]
    assert prs_moment(t, p) == pytest.approx(ref, rel=1e-9)


def test_moment_edge_cases():
    p = CASES[1]
    assert prs_moment(0.0, p) == 1.0
    with pytest.raises(ValueError):
        prs_moment(-1.0, p)


def test_uncorrelated_selection_is_exponential():
    p = PrsRfParams(6, 2, 0.0, 4.0)
    x = np.linspace(0, 20, 30)
    np.testing.assert_allclose(prs_cdf(x, p), -np.expm1(-x / 4.0), atol=1e-12)


def test_higher_rank_is_stochastically_larger():
    x = np.linspace(0.1, 5, 20)
    curves = [prs_cdf(x, PrsRfParams(5, m, 0.7, 1.0)) for m in range(1, 6)]
    for lo, hi in zip(curves, curves[1:]):
        assert np.all(hi < lo)


def test_terms_shape():
    w, beta = prs_terms(PrsRfParams(4, 3, 0.8, 1.0))
    assert w.shape == beta.shape == (3,)
    assert np.all(beta > 0)


def test_cdf_support_and_vectorisation():
    p = CASES[1]
    assert prs_cdf(-1.0, p) == 0.0
    assert prs_pdf(-1.0, p) == 0.0
    assert prs_cdf(np.array([[0.5, 1.0]]), p).shape == (1, 2)
    assert isinstance(prs_cdf(0.5, p), float)


@pytest.mark.parametrize("kwargs,msg", [
    (dict(N=0, m=1, rho=0.5, snr=1.0), "relay count"),
    (dict(N=3, m=4, rho=0.5, snr=1.0), "rank m exceeds relay count N"),
    (dict(N=3, m=2, rho=1.2, snr=1.0), "rho"),
    (dict(N=3, m=2, rho=0.5, snr=0.0), "SNR"),
    (dict(N=3, m=1.5, rho=0.5, snr=1.0), "rank"),
])
def test_parameter_validation(kwargs, msg):
    with pytest.raises(ValueError, match=msg):
        PrsRfParams(**kwargs)


@pytest.mark.parametrize("p", CASES[1:4])
def test_sampler_ks_and_mean(p):
    x = sample_selected_snr(p, np.random.default_rng(11), 200_000)
    assert stats.kstest(x, lambda v: prs_cdf(v, p)).pvalue > 1e-3
    z = (x.mean() - prs_moment(1.0, p)) / (x.std(ddof=1) / math.sqrt(x.size))
    assert abs(z) < 4.0


def test_sampler_reproducible():
    p = CASES[1]
    a = sample_selected_snr(p, np.random.default_rng(5), 1000)
    b = sample_selected_snr(p, np.random.default_rng(5), 1000)
    np.testing.assert_array_equal(a, b)
