import math

import mpmath as mp
import numpy as np
import pytest

from rfso.specfun import (
    ConvergenceError,
    DegenerateParametersError,
    DomainError,
    FoxHBivariateSpec,
    FoxHSpec,
    MeijerGSpec,
    delta_seq,
    eval_elementary,
    exp1_scaled,
    fox_h,
    fox_h_bivariate,
    meijer_g,
    meijer_g_large_argument,
)


def test_elementary_spot_values():
    assert eval_elementary("erf", 0.0) == 0.0
    assert eval_elementary("J0", 0.0) == 1.0
    assert eval_elementary("upper_incomplete_gamma", 0.5, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert eval_elementary("gaussian_q", 0.0) == 0.5
    assert eval_elementary("erfc", 1.0) == pytest.approx(float(mp.erfc(1)), rel=1e-15)
    assert eval_elementary("Ei", 1.0) == pytest.approx(float(mp.ei(1)), rel=1e-14)
    assert eval_elementary("Ei", -2.0) == pytest.approx(float(mp.ei(-2)), rel=1e-14)


@pytest.mark.parametrize("a,x", [(2.5, 0.7), (0.0, 1.3), (-0.5, 2.0), (-1.5, 0.4), (-3.0, 5.0)])
def test_upper_incomplete_gamma_matches_mpmath(a, x):
    ref = float(mp.gammainc(a, x))
    assert eval_elementary("upper_incomplete_gamma", a, x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("kind,args", [
    ("Ei", (0.0,)),
    ("erf", (math.nan,)),
    ("J0", (math.inf,)),
    ("upper_incomplete_gamma", (-1.0, 0.0)),
    ("upper_incomplete_gamma", (1.0, -0.1)),
    ("sinc", (1.0,)),
])
def test_elementary_domain_errors(kind, args):
    with pytest.raises(DomainError):
        eval_elementary(kind, *args)


@pytest.mark.parametrize("x", [1e-3, 0.5, 10.0, 49.9, 50.1, 300.0, 1e6])
def test_exp1_scaled(x):
    mp.mp.dps = 30
    assert exp1_scaled(x) == pytest.approx(float(mp.exp(x) * mp.e1(x)), rel=1e-13)


def test_exp1_scaled_domain():
    with pytest.raises(DomainError):
        exp1_scaled(0.0)


def test_delta_seq():
    assert delta_seq(3, 1.0) == pytest.approx([1 / 3, 2 / 3, 1.0])
    assert delta_seq(1, 0.4) == [0.4]


def test_exponential_reduction():
    assert meijer_g(MeijerGSpec(1, 0, (), (0.0,)), 1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_incomplete_gamma_reduction():
    spec = MeijerGSpec(2, 0, (1.0,), (0.5, 0.0))
    assert meijer_g(spec, 0.25) == pytest.approx(eval_elementary("upper_incomplete_gamma", 0.5, 0.25), rel=1e-10)


def test_bessel_form_is_outside_the_convergent_class():
    # J0(x) = G^{1,0}_{0,2}(x^2/4 | 0, 0) sits on m + n = (p + q) / 2: the contour only
    # converges conditionally, which the evaluator refuses rather than guessing.
    with pytest.raises(ConvergenceError):
        meijer_g(MeijerGSpec(1, 0, (), (0.0, 0.0)), 0.25)


MPMATH_CASES = [
    (MeijerGSpec(2, 1, (0.3, 1.0), (0.5, 0.2)), (0.1, 1.0, 7.0)),
    (MeijerGSpec(3, 1, (0.0,), (0.6, 1.2, 0.0)), (0.05, 2.0, 30.0)),
    (MeijerGSpec(4, 1, (1.0,), (1.275, 1.775, 0.5, 1.0)), (0.01, 1.0, 100.0)),
    (MeijerGSpec(5, 1, (1.0, 1.45), (1.4, 1.3, 1.8, 1.1, 0.2)), (0.2, 3.0, 50.0)),
]


@pytest.mark.parametrize("spec,zs", MPMATH_CASES)
def test_meijer_g_matches_mpmath(spec, zs):
    mp.mp.dps = 30
    a, b = list(spec.a), list(spec.b)
    for z in zs:
        ref = float(mp.meijerg([a[:spec.n], a[spec.n:]], [b[:spec.m], b[spec.m:]], z))
        assert meijer_g(spec, z) == pytest.approx(ref, rel=1e-8, abs=1e-300)


def test_fox_unit_scales_equal_meijer():
    spec = MPMATH_CASES[2][0]
    for z in (0.03, 1.0, 40.0):
        assert fox_h(spec.as_fox(1.0), z) == pytest.approx(meijer_g(spec, z), rel=1e-12)


def test_fox_general_scales_against_mpmath():
    # H^{1,1}_{1,2} with non-unit scales, against its defining Mellin-Barnes integral.
    spec = FoxHSpec(1, 1, ((0.2, 0.5),), ((0.4, 1.5), (0.1, 0.7)))
    mp.mp.dps = 25

    def kernel(s):
        return (mp.gamma(0.4 + 1.5 * s) * mp.gamma(1 - 0.2 - 0.5 * s)) / mp.gamma(1 - 0.1 - 0.7 * s)

    for z in (0.3, 2.0):
        c = 0.1
        integ = mp.quad(lambda t: kernel(c + 1j * t) * mp.mpf(z) ** (-(c + 1j * t)), [-mp.inf, 0, mp.inf])
        assert fox_h(spec, z) == pytest.approx(float(mp.re(integ) / (2 * mp.pi)), rel=1e-8)


def test_large_argument_expansion():
    spec = MeijerGSpec(2, 2, (0.3, 0.8), (0.5, 0.1))
    z = 1e6
    assert meijer_g_large_argument(spec, z) == pytest.approx(meijer_g(spec, z), rel=1e-5)


def test_large_argument_rejects_integer_spacing():
    with pytest.raises(DegenerateParametersError):
        meijer_g_large_argument(MeijerGSpec(1, 2, (0.3, 1.3), (0.5,)), 10.0)


def test_nonconvergent_contour_raises():
    with pytest.raises(ConvergenceError):
        meijer_g(MeijerGSpec(1, 0, (0.5,), (0.0, 0.2)), 1.0)


def test_coincident_poles_raise():
    with pytest.raises(DegenerateParametersError):
        meijer_g(MeijerGSpec(1, 1, (1.5,), (0.5,)), 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        MeijerGSpec(2, 0, (), (0.0,))
    with pytest.raises(ValueError):
        FoxHSpec(1, 0, (), ((0.0, 0.0),))
    with pytest.raises(ValueError):
        FoxHBivariateSpec(2, ((0.0, 1.0, 1.0),), (), FoxHSpec(1, 0, (), ((0.0, 1.0),)),
                          FoxHSpec(1, 0, (), ((0.0, 1.0),)))


def test_bivariate_separable_product():
    h1 = FoxHSpec(1, 0, (), ((0.0, 1.0),))
    h2 = FoxHSpec(1, 1, ((0.0, 1.0),), ((0.0, 1.0),))
    spec = FoxHBivariateSpec(0, (), (), h1, h2)
    assert spec.is_separable
    # exp(-z1) * 1/(1 + z2)
    assert fox_h_bivariate(spec, 0.7, 2.0) == pytest.approx(math.exp(-0.7) / 3.0, rel=1e-8)


def test_bivariate_coupled_closed_form():
    """Outer Gamma(1 + s + t) with exponential inner kernels gives 1 / (1 + z1 + z2)."""
    inner = FoxHSpec(1, 0, (), ((0.0, 1.0),))
    spec = FoxHBivariateSpec(1, ((0.0, 1.0, 1.0),), (), inner, inner)
    for z1, z2 in ((0.3, 0.5), (2.0, 0.1), (1.0, 1.0)):
        assert fox_h_bivariate(spec, z1, z2) == pytest.approx(1.0 / (1.0 + z1 + z2), rel=1e-6)


def test_evaluation_is_deterministic():
    spec = MPMATH_CASES[3][0]
    vals = {meijer_g(spec, 3.0) for _ in range(3)}
    assert len(vals) == 1


def test_vectorised_grid_consistency():
    spec = MeijerGSpec(1, 0, (), (0.0,))
    z = np.logspace(-3, math.log10(50.0), 200)
    got = np.array([meijer_g(spec, v) for v in z])
    np.testing.assert_allclose(got, np.exp(-z), rtol=1e-8)
