import math

import numpy as np
import pytest
from scipy import special

from conftest import GAMMA_TH, make_cfg
from oracles import vg_exact_bep, vg_ratio_mean
from rfso.analysis import (
    ModulationScheme,
    asymptotic_bep,
    bep_fg,
    bep_from_cdf,
    bep_vg_asymptotic,
    bep_vg_numerical,
    capacity_ceiling,
    capacity_fg,
    capacity_vg_approx,
    capacity_vg_upper,
    diversity_order,
    fso_cdf_asymptotic,
    outage_fg,
    outage_fg_asymptotic,
    outage_fg_quadrature,
    outage_vg_upper,
    vg_ideal_gains,
    vg_upper_j,
)
from rfso.fso_channel import fso_snr_cdf
from rfso.mc_engine import Metric, draw_channels, estimate_from_draws
from rfso.rf_channel import prs_cdf

FG_CASES = [
    dict(preset="moderate", r=1, mu_db=20.0, hpa=("SEL", 5.0)),
    dict(preset="strong", r=2, mu_db=35.0, hpa=("TWTA", 10.0)),
    dict(preset="weak", r=2, mu_db=10.0, hpa=("IDEAL", 0.0)),
    dict(preset="moderate", r=2, mu_db=25.0, hpa=("SEL", 0.0), xi=0.7),
]


# ---------------------------------------------------------------------------
# modulation
# ---------------------------------------------------------------------------


def test_bpsk_conditional_bep_is_half_erfc():
    g = np.array([0.0, 0.3, 2.0, 9.0])
    np.testing.assert_allclose(ModulationScheme.bpsk().conditional_bep(g), 0.5 * special.erfc(np.sqrt(g)), rtol=1e-14)


def test_ook_conditional_bep():
    g = np.array([0.5, 4.0])
    np.testing.assert_allclose(ModulationScheme.ook().conditional_bep(g), 0.5 * special.erfc(np.sqrt(g / 2)), rtol=1e-14)


def test_modulation_parsing_and_validation():
    assert ModulationScheme.from_name("16-qam").v == 2
    assert ModulationScheme.from_name("64-QAM").delta == pytest.approx(4 / 6 * (1 - 1 / 8))
    assert ModulationScheme.from_name("4-PSK").q == pytest.approx((0.5,))
    assert ModulationScheme.from_name("ook").r == 2
    for bad in ("8-QAM", "3-PSK", "FSK"):
        with pytest.raises(ValueError):
            ModulationScheme.from_name(bad)


def test_detection_mismatch_rejected():
    with pytest.raises(ValueError, match="pairs with"):
        bep_fg(make_cfg(r=2), ModulationScheme.bpsk())


# ---------------------------------------------------------------------------
# fixed gain
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("case", FG_CASES)
def test_outage_fg_matches_quadrature(case):
    cfg = make_cfg(**case)
    for g in (0.5, GAMMA_TH, 20.0):
        assert outage_fg(g, cfg) == pytest.approx(outage_fg_quadrature(g, cfg), rel=1e-6, abs=1e-12)


def test_outage_fg_edges():
    cfg = make_cfg()
    assert outage_fg(0.0, cfg) == 0.0
    assert outage_fg(math.inf, cfg) == 1.0
    with pytest.raises(ValueError, match="FG"):
        outage_fg(1.0, cfg.with_mode("VG"))


def test_outage_fg_increasing_in_threshold():
    cfg = make_cfg(r=2, mu_db=30.0)
    vals = [outage_fg(g, cfg) for g in np.logspace(-1, 2, 12)]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("case", FG_CASES)
def test_bep_fg_matches_cdf_integral(case):
    cfg = make_cfg(**case)
    ref = bep_from_cdf(lambda g: outage_fg_quadrature(g, cfg), cfg.modulation, scale=cfg.rf.snr)
    assert bep_fg(cfg) == pytest.approx(ref, rel=1e-5)


def test_bep_fg_multi_term_modulations():
    cfg = make_cfg(r=1, mu_db=25.0)
    for mod in (ModulationScheme.mpsk(8), ModulationScheme.mqam(16)):
        ref = bep_from_cdf(lambda g: outage_fg_quadrature(g, cfg), mod, scale=cfg.rf.snr)
        assert bep_fg(cfg, mod) == pytest.approx(ref, rel=1e-5)


@pytest.mark.parametrize("case", FG_CASES[:3])
def test_capacity_fg_matches_quadrature(case):
    cfg = make_cfg(**case)
    assert capacity_fg(cfg) == pytest.approx(capacity_fg(cfg, method="quadrature"), rel=1e-5)


def test_outage_asymptote_converges():
    cfg = make_cfg(preset="moderate", r=2, hpa=("IDEAL", 0.0), mu_db=70.0)
    assert outage_fg_asymptotic(GAMMA_TH, cfg) == pytest.approx(outage_fg(GAMMA_TH, cfg), rel=0.05)


def test_diversity_order():
    cfg = make_cfg(preset="moderate", r=2, hpa=("IDEAL", 0.0), xi=0.7)
    assert diversity_order(cfg) == pytest.approx(0.245)
    assert diversity_order(make_cfg(hpa=("SEL", 5.0))) == 0.0
    assert diversity_order(make_cfg(hpa=("SEL", 5.0)), ideal=True) == pytest.approx(1.0)


def test_ceiling_ordering_across_amplifiers():
    from rfso.hpa import HpaModel, derive_hpa
    sel = [capacity_ceiling(derive_hpa(HpaModel.from_ibo_db("SEL", v))) for v in (0.0, 3.0, 5.0)]
    assert sel[0] < sel[1] < sel[2]
    assert capacity_ceiling(derive_hpa(HpaModel.from_ibo_db("TWTA", 10.0))) < capacity_ceiling(
        derive_hpa(HpaModel.from_ibo_db("SEL", 10.0)))


@pytest.mark.xfail(strict=True, reason=(
    "E[log2(1 + SNDR)] stays a Jensen gap below log2(1 + 1/distortion) at 80 dB (about 0.4-0.5 bps/Hz) "
    "because the random channel keeps the effective SNDR well below its ceiling"))
@pytest.mark.parametrize("hpa", [("SEL", 0.0), ("SEL", 5.0), ("TWTA", 10.0)])
def test_capacity_fg_reaches_ceiling_at_80db(hpa):
    from rfso.hpa import HpaModel, derive_hpa
    cfg = make_cfg(r=1, mu_db=80.0, hpa=hpa)
    ceiling = capacity_ceiling(derive_hpa(HpaModel.from_ibo_db(*hpa)))
    assert abs(capacity_fg(cfg) - ceiling) < 0.05


# ---------------------------------------------------------------------------
# variable gain
# ---------------------------------------------------------------------------


def test_outage_vg_upper_formula():
    cfg = make_cfg(r=2, mu_db=20.0, hpa=("TWTA", 8.0), mode="VG")
    k = cfg.kappa
    mapped = GAMMA_TH / ((k - 1) * GAMMA_TH + 1)
    f1, f2 = prs_cdf(GAMMA_TH, cfg.rf), fso_snr_cdf(mapped, cfg.fso)
    assert outage_vg_upper(GAMMA_TH, cfg) == pytest.approx(1 - (1 - f1) * (1 - f2), rel=1e-13)
    with pytest.raises(ValueError, match="VG"):
        outage_vg_upper(1.0, cfg.with_mode("FG"))


def test_fso_cdf_asymptote():
    cfg = make_cfg(r=1, mu_db=60.0, hpa=("IDEAL", 0.0), mode="VG")
    assert fso_cdf_asymptotic(GAMMA_TH, cfg) == pytest.approx(fso_snr_cdf(GAMMA_TH, cfg.fso), rel=1e-3)


@pytest.mark.parametrize("case", [
    dict(preset="moderate", r=1, mu_db=20.0, hpa=("SEL", 5.0)),
    dict(preset="strong", r=2, mu_db=30.0, hpa=("IDEAL", 0.0)),
])
def test_capacity_upper_term(case):
    cfg = make_cfg(mode="VG", **case)
    assert vg_upper_j(cfg) == pytest.approx(vg_upper_j(cfg, "quadrature"), rel=1e-6)
    assert vg_upper_j(cfg) == pytest.approx(vg_ratio_mean(cfg), rel=1e-6)
    assert capacity_vg_upper(cfg) == pytest.approx(math.log2(1 + cfg.varpi * vg_ratio_mean(cfg)), rel=1e-6)


@pytest.mark.parametrize("hpa", [("SEL", 0.0), ("SEL", 5.0), ("TWTA", 10.0)])
def test_vg_capacity_forms_reach_ceiling(hpa):
    from rfso.hpa import HpaModel, derive_hpa
    cfg = make_cfg(r=1, mu_db=80.0, hpa=hpa, mode="VG")
    ceiling = capacity_ceiling(derive_hpa(HpaModel.from_ibo_db(*hpa)))
    assert abs(capacity_vg_approx(cfg) - ceiling) < 0.05
    assert abs(capacity_vg_upper(cfg) - ceiling) < 0.05


def test_capacity_forms_are_ordered():
    """MC <= upper <= ratio-of-means: xy/(kappa y + x + kappa) is jointly concave."""
    for mu in (10.0, 30.0, 50.0):
        cfg = make_cfg(r=1, mu_db=mu, hpa=("SEL", 5.0), mode="VG")
        assert capacity_vg_upper(cfg) <= capacity_vg_approx(cfg)


@pytest.mark.xfail(strict=True, reason=(
    "by joint concavity the ratio-of-means value bounds E[SNDR] from above and so exceeds "
    "the Jensen bound; it is never the tighter of the two"))
def test_capacity_approx_tighter_than_upper():
    draws = draw_channels(make_cfg(), 200_000, seed=21)
    for mu in (20.0, 40.0):
        cfg = make_cfg(r=1, mu_db=mu, hpa=("SEL", 5.0), mode="VG")
        mc = estimate_from_draws(cfg, Metric.capacity(), draws).value
        assert abs(capacity_vg_approx(cfg) - mc) < abs(capacity_vg_upper(cfg) - mc)


@pytest.mark.xfail(strict=True, reason=(
    "with negligible distortion the ratio-of-means form keeps a constant Jensen gap of about "
    "1.1 bps/Hz over the simulated capacity at 50 dB"))
def test_capacity_approx_close_at_high_snr_large_backoff():
    cfg = make_cfg(r=1, mu_db=50.0, hpa=("SEL", 30.0), mode="VG")
    draws = draw_channels(cfg, 200_000, seed=22)
    mc = estimate_from_draws(cfg, Metric.capacity(), draws).value
    assert abs(capacity_vg_approx(cfg) - mc) < 0.1


def test_capacity_mode_checks():
    with pytest.raises(ValueError):
        capacity_vg_approx(make_cfg())
    with pytest.raises(ValueError):
        capacity_fg(make_cfg(mode="VG"))


def test_bep_vg_numerical_is_min_form_integral():
    cfg = make_cfg(r=1, mu_db=20.0, hpa=("SEL", 5.0), mode="VG")
    ref = bep_from_cdf(lambda g: outage_vg_upper(g, cfg), cfg.modulation, scale=100.0)
    assert bep_vg_numerical(cfg) == pytest.approx(ref, rel=1e-8)


def test_bep_vg_asymptote_against_exact_quadrature():
    cfg = make_cfg(r=1, mu_db=60.0, hpa=("IDEAL", 0.0), mode="VG")
    assert bep_vg_asymptotic(cfg) == pytest.approx(vg_exact_bep(cfg), rel=0.05)


def test_bep_vg_asymptote_with_distortion_tracks_min_form():
    cfg = make_cfg(r=1, mu_db=60.0, hpa=("SEL", 5.0), mode="VG")
    assert bep_vg_asymptotic(cfg) == pytest.approx(bep_vg_numerical(cfg), rel=0.05)


def test_ideal_gains_against_exact_quadrature():
    """Slope and offset of (G_c gamma_bar)^(-G_d) against the exact VG error rate."""
    mus = (50.0, 60.0, 70.0)
    cfgs = [make_cfg(preset="weak", r=1, mu_db=m, hpa=("IDEAL", 0.0), mode="VG", xi=3.0) for m in mus]
    gains = vg_ideal_gains(cfgs[0])
    assert gains.G_d == pytest.approx(1.0)
    exact = np.array([vg_exact_bep(c) for c in cfgs])
    slopes = -np.diff(np.log10(exact)) / 1.0
    np.testing.assert_allclose(slopes, gains.G_d, rtol=0.05)
    pred = asymptotic_bep(gains, 10 ** (np.array(mus) / 10))
    assert np.all(np.abs(10 * np.log10(pred / exact)) < 1.0)


def test_ideal_gains_need_single_term_modulation():
    cfg = make_cfg(r=1, mode="VG", hpa=("IDEAL", 0.0), mod=ModulationScheme.mqam(16))
    with pytest.raises(ValueError):
        vg_ideal_gains(cfg)
    assert vg_ideal_gains(cfg, c=2.0).G_d > 0


@pytest.mark.parametrize("hpa", [("SEL", 5.0), ("IDEAL", 0.0)])
def test_exact_bep_oracle_matches_simulation(hpa):
    cfg = make_cfg(r=1, mu_db=30.0, hpa=hpa, mode="VG")
    est = estimate_from_draws(cfg, Metric.bep(cfg.modulation), draw_channels(cfg, 2_000_000, seed=5))
    assert abs(est.value - vg_exact_bep(cfg)) < 3 * est.std_error
