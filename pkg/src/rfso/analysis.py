"""Closed-form, asymptotic and bound expressions for outage, error and capacity.

Fixed-gain (FG) results are exact Meijer-G / Fox-H expressions; the
variable-gain (VG) link only admits bounds, approximations and high-SNR
expansions.  Each closed form has a quadrature counterpart (exposed as
``method="quadrature"`` or a separate function) used for cross-checks.

Notation: ``gamma_1`` is the selected relay's first-hop SNR, ``gamma_2``
the optical-hop SNR, ``kappa >= 1`` the amplifier nonlinearity factor and
``(p, q, A = alpha2 p)`` the integers of the turbulence model.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .fso_channel import (
    UnifiedSnrParams,
    _kappa12,
    _pdf_constant,
    fso_cdf_spec,
    fso_snr_cdf,
    fso_snr_moment,
    fso_snr_pdf,
)
from .hpa import HpaDerived
from .hpa import capacity_ceiling as _hpa_ceiling
from .relay import LinkConfig, RelayMode
from .rf_channel import _cdf_weights, prs_cdf, prs_moment, prs_terms
from .specfun import (
    POLE_TOL,
    DegenerateParametersError,
    FoxHBivariateSpec,
    FoxHSpec,
    MeijerGSpec,
    SpecialFunctionError,
    delta_seq,
    _gauss_panels,
    exp1_scaled,
    fox_h,
    fox_h_bivariate,
    meijer_g,
    meijer_g_large_argument,
)

__all__ = [
    "ModulationScheme",
    "AsymptoticGains",
    "outage_fg",
    "outage_fg_quadrature",
    "outage_fg_asymptotic",
    "diversity_order",
    "bep_fg",
    "bep_from_cdf",
    "capacity_fg",
    "capacity_ceiling",
    "outage_vg_upper",
    "fso_cdf_asymptotic",
    "bep_vg_asymptotic",
    "bep_vg_numerical",
    "vg_ideal_gains",
    "asymptotic_bep",
    "capacity_vg_approx",
    "capacity_vg_upper",
    "vg_upper_j",
    "expect_over_fso",
]


# ---------------------------------------------------------------------------
# modulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModulationScheme:
    """Conditional error model ``P(e | g) = delta / (2 Gamma(tau)) sum_k Gamma(tau, q_k g)``.

    Use the constructors :meth:`ook`, :meth:`bpsk`, :meth:`mpsk` and
    :meth:`mqam`; they fix ``delta``, ``tau``, ``q`` and the detection mode.
    """

    name: str
    delta: float
    tau: float
    q: tuple[float, ...]
    detection: str

    @property
    def v(self) -> int:
        return len(self.q)

    @property
    def r(self) -> int:
        """Detection exponent this scheme pairs with."""
        return 2 if self.detection == "IM/DD" else 1

    @classmethod
    def ook(cls) -> "ModulationScheme":
        return cls("OOK", 1.0, 0.5, (0.5,), "IM/DD")

    @classmethod
    def bpsk(cls) -> "ModulationScheme":
        return cls("BPSK", 1.0, 0.5, (1.0,), "heterodyne")

    @classmethod
    def mpsk(cls, M: int) -> "ModulationScheme":
        _check_order(M)
        v = max(M // 4, 1)
        q = tuple(math.sin((2 * k - 1) * math.pi / M) ** 2 for k in range(1, v + 1))
        return cls(f"{M}-PSK", 2.0 / max(math.log2(M), 2.0), 0.5, q, "heterodyne")

    @classmethod
    def mqam(cls, M: int) -> "ModulationScheme":
        _check_order(M)
        root = math.isqrt(M)
        if root * root != M:
            raise ValueError(f"square QAM needs M to be a perfect square, got {M}")
        v = root // 2
        q = tuple(3.0 * (2 * k - 1) ** 2 / (2.0 * (M - 1)) for k in range(1, v + 1))
        delta = 4.0 / math.log2(M) * (1.0 - 1.0 / root)
        return cls(f"{M}-QAM", delta, 0.5, q, "heterodyne")

    @classmethod
    def from_name(cls, name: str) -> "ModulationScheme":
        """Parse ``OOK``, ``BPSK``, ``<M>-PSK`` or ``<M>-QAM``."""
        key = name.strip().upper()
        if key == "OOK":
            return cls.ook()
        if key == "BPSK":
            return cls.bpsk()
        for suffix, ctor in (("-PSK", cls.mpsk), ("-QAM", cls.mqam)):
            if key.endswith(suffix):
                return ctor(int(key[: -len(suffix)]))
        raise ValueError(f"unknown modulation {name!r}")

    def conditional_bep(self, gamma):
        """Error probability at instantaneous SNR ``gamma``."""
        g = np.asarray(gamma, dtype=float)
        out = np.zeros_like(g)
        for qk in self.q:
            out = out + special.gammaincc(self.tau, qk * g)
        out = 0.5 * self.delta * out
        return out if out.ndim else float(out)


def _check_order(M: int):
    if M < 2 or M & (M - 1):
        raise ValueError(f"constellation size must be a power of two >= 2, got {M}")


def _check_detection(mod: ModulationScheme, cfg: LinkConfig):
    if mod.r != cfg.r:
        raise ValueError(
            f"{mod.name} pairs with {mod.detection} detection but the link uses r={cfg.r}"
        )


def _modulation(cfg: LinkConfig, mod: ModulationScheme | None) -> ModulationScheme:
    mod = mod if mod is not None else cfg.modulation
    if mod is None:
        raise ValueError("no modulation given and the link config carries none")
    _check_detection(mod, cfg)
    return mod


@dataclass(frozen=True)
class AsymptoticGains:
    """High-SNR error model ``P_e ~ (G_c gamma_bar)^(-G_d)`` from ``f(g) ~ a g^b / gamma_bar^(b+1)``."""

    G_d: float
    G_c: float
    a: float
    b: float


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------


def _delta_nested(r: int, j: int, x: float) -> list[float]:
    """``Delta(r, x/j), ..., Delta(r, (x+j-1)/j)`` flattened."""
    out: list[float] = []
    for i in range(j):
        out += delta_seq(r, (x + i) / j)
    return out


def _perturb_xi(cfg: LinkConfig) -> LinkConfig:
    fso = cfg.fso
    return replace(cfg, fso=fso.with_xi(math.sqrt(fso.xi2 + POLE_TOL)))


def _perturbing(fn):
    """Retry once with ``xi^2`` nudged by ``POLE_TOL`` when the poles coincide."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DegenerateParametersError:
            args = list(args)
            for i, a in enumerate(args):
                if isinstance(a, LinkConfig):
                    args[i] = _perturb_xi(a)
                    break
            else:
                kwargs["cfg"] = _perturb_xi(kwargs["cfg"])
            return fn(*args, **kwargs)

    return wrapper


def _require_mode(cfg: LinkConfig, mode: RelayMode, op: str):
    if cfg.relay_mode is not mode:
        raise ValueError(f"{op} needs a {mode.value} link, got {cfg.relay_mode.value}")


def _clamp_probability(value: float, op: str) -> float:
    if value < 0.0:
        if value < -1e-9:
            raise SpecialFunctionError(f"{op}: probability {value} below 0")
        return 0.0
    if value > 1.0:
        if value > 1.0 + 1e-9:
            raise SpecialFunctionError(f"{op}: probability {value} above 1")
        return 1.0
    return value


@dataclass(frozen=True)
class _FgTerms:
    """Parameters shared by the fixed-gain closed forms."""

    k5: tuple[float, ...]
    k6: tuple[float, ...]
    mu: float
    log_const: float  # log of the outage prefactor without C(N,m) sums
    zr: float  # (zeta r^(p+q))^r
    A: int


def _fg_terms(u: UnifiedSnrParams) -> _FgTerms:
    d = u.dgg
    p, q, A, r = d.p, d.q, d.A, u.r
    k1, k2 = _kappa12(u)
    mu = sum(k2) - sum(k1) + 0.5 * (p + q) + 1.0
    k5 = (
        delta_seq(A, 1.0)
        + _delta_nested(r, A, 1.0 - u.xi2)
        + _delta_nested(r, q, 1.0 - d.m1)
        + _delta_nested(r, p, 1.0 - d.m2)
    )
    k6 = _delta_nested(r, A, -u.xi2)
    log_const = (
        math.log(u.xi2)
        + (d.m2 - 0.5) * math.log(p) + (d.m1 - 0.5) * math.log(q)
        + (mu - 1.0) * math.log(r) - 0.5 * math.log(A)
        - special.gammaln(d.m1) - special.gammaln(d.m2)
        - 0.5 * (A + r * (p + q) - 3) * math.log(2.0 * math.pi)
    )
    zr = math.exp(r * (math.log(u.zeta) + (p + q) * math.log(r)))
    return _FgTerms(tuple(k5), tuple(k6), mu, log_const, zr, A)


def _outage_fg_sum(gamma_th: float, cfg: LinkConfig, evaluate) -> float:
    t = _fg_terms(cfg.fso)
    spec = MeijerGSpec(0, len(t.k5), t.k5, t.k6)
    amp, beta = _cdf_weights(cfg.rf)
    kappa, c = cfg.kappa, cfg.fg_offset
    parts = []
    for a_n, b_n in zip(amp, beta):
        z = (t.A / (b_n * gamma_th * c)) ** t.A * t.zr
        parts.append(a_n * math.exp(-b_n * kappa * gamma_th) * evaluate(spec, z))
    return 1.0 - math.exp(t.log_const) * math.fsum(parts)


# ---------------------------------------------------------------------------
# fixed gain
# ---------------------------------------------------------------------------


@_perturbing
def outage_fg(gamma_th: float, cfg: LinkConfig) -> float:
    """Outage probability ``P[SNDR < gamma_th]`` of the fixed-gain link.

    ``1 - K sum_n A_n exp(-beta_n kappa g) G^{0,R}_{R,rA}(z_n | k5; k6)`` with
    ``z_n = (A / (beta_n g c))^A (zeta r^(p+q))^r`` and ``c = E[gamma_1] + kappa``.

    Raises
    ------
    SpecialFunctionError
        If the evaluation leaves [0, 1] by more than 1e-9.
    """
    _require_mode(cfg, RelayMode.FG, "outage_fg")
    if gamma_th <= 0:
        return 0.0
    if math.isinf(gamma_th):
        return 1.0
    value = _outage_fg_sum(gamma_th, cfg, meijer_g)
    return _clamp_probability(value, f"outage_fg(gamma_th={gamma_th})")


def outage_fg_quadrature(gamma_th: float, cfg: LinkConfig) -> float:
    """Fixed-gain outage by integrating ``F_1(kappa g + c g / gamma_2)`` over the optical density."""
    _require_mode(cfg, RelayMode.FG, "outage_fg_quadrature")
    if gamma_th <= 0:
        return 0.0
    kappa, c = cfg.kappa, cfg.fg_offset
    return expect_over_fso(
        lambda g2: prs_cdf(kappa * gamma_th + c * gamma_th / g2, cfg.rf), cfg.fso
    )


@_perturbing
def outage_fg_asymptotic(gamma_th: float, cfg: LinkConfig) -> float:
    """High-SNR outage: the Meijer-G of :func:`outage_fg` replaced by its large-argument residue sum.

    Raises
    ------
    DegenerateParametersError
        If two upper parameters differ by an integer even after perturbation.
    """
    _require_mode(cfg, RelayMode.FG, "outage_fg_asymptotic")
    if gamma_th <= 0:
        return 0.0
    return _outage_fg_sum(gamma_th, cfg, meijer_g_large_argument)


def diversity_order(cfg: LinkConfig, ideal: bool | None = None) -> float:
    """High-SNR outage slope ``min(1, alpha1 m1 / r, alpha2 m2 / r, xi^2 / r)``; 0 with distortion.

    ``ideal`` defaults to whether the amplifier is distortion-free; the
    same expression holds for both relaying modes.
    """
    if ideal is None:
        ideal = cfg.hpa_derived.sigma_d2 <= 0.0
    if not ideal:
        return 0.0
    d, r = cfg.fso.dgg, cfg.r
    return min(1.0, d.alpha1 * d.m1 / r, d.alpha2 * d.m2 / r, cfg.fso.xi2 / r)


@_perturbing
def bep_fg(cfg: LinkConfig, mod: ModulationScheme | None = None) -> float:
    """Average bit error probability of the fixed-gain link.

    ``delta v / 2 - K sum_k sum_n A_n (q_k / (beta_n kappa + q_k))^tau G(y^A (zeta r^(p+q))^(-r))``
    with the Meijer-G ``G^{R,A}_{(r+1)A,R}( . | Delta(A, 1 - tau), 1 - k6; 1 - k5)`` and
    ``y = beta_n c / (beta_n kappa + q_k)``.
    """
    _require_mode(cfg, RelayMode.FG, "bep_fg")
    mod = _modulation(cfg, mod)
    u = cfg.fso
    d, r = u.dgg, u.r
    p, q, A = d.p, d.q, d.A
    t = _fg_terms(u)
    tau = mod.tau
    a_par = tuple(delta_seq(A, 1.0 - tau)) + tuple(1.0 - v for v in t.k6)
    b_par = tuple(1.0 - v for v in t.k5)
    spec = MeijerGSpec(len(b_par), A, a_par, b_par)
    log_k = (
        math.log(mod.delta) + math.log(u.xi2)
        + (t.mu - 1.0) * math.log(r)
        + (d.m1 - 0.5) * math.log(q) + (d.m2 - 0.5) * math.log(p)
        + (tau - 1.0) * math.log(A)
        + 0.5 * (4 - 2 * A - r * (p + q)) * math.log(2.0 * math.pi)
        - math.log(2.0) - special.gammaln(d.m1) - special.gammaln(d.m2)
        - special.gammaln(tau)
    )
    amp, beta = _cdf_weights(cfg.rf)
    kappa, c = cfg.kappa, cfg.fg_offset
    inv_zr = 1.0 / t.zr
    parts = []
    for qk in mod.q:
        for a_n, b_n in zip(amp, beta):
            y = b_n * c / (b_n * kappa + qk)
            g = meijer_g(spec, y**A * inv_zr)
            parts.append(a_n * (qk / (b_n * kappa + qk)) ** tau * g)
    return 0.5 * mod.delta * mod.v - math.exp(log_k) * math.fsum(parts)


def bep_from_cdf(cdf: Callable[[float], float], mod: ModulationScheme, scale: float = 1.0) -> float:
    """``delta / (2 Gamma(tau)) sum_k q_k^tau int g^(tau-1) e^(-q_k g) F(g) dg`` by quadrature.

    Parameters
    ----------
    cdf : callable
        Distribution function of the end-to-end SNR.
    mod : ModulationScheme
    scale : float
        Typical SNR used to place quadrature breakpoints.
    """
    total = []
    for qk in mod.q:
        # Substituting g = x^(1/tau) absorbs the g^(tau-1) endpoint singularity.
        def f(x, qk=qk):
            g = x ** (1.0 / mod.tau)
            return math.exp(-qk * g) * cdf(g) / mod.tau

        upper = (50.0 / qk) ** mod.tau
        pts = sorted({min(v, upper) for v in (scale**mod.tau * s for s in (1e-3, 1e-2, 1e-1, 1.0))})
        edges = [0.0] + [v for v in pts if 0.0 < v < upper] + [upper]
        acc = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            acc += integrate.quad(f, lo, hi, limit=200, epsabs=1e-14, epsrel=1e-10)[0]
        total.append(qk**mod.tau * acc)
    return mod.delta / (2.0 * special.gamma(mod.tau)) * math.fsum(total)


def _capacity_fg_spec(cfg: LinkConfig) -> FoxHBivariateSpec:
    t = _fg_terms(cfg.fso)
    inv_a = 1.0 / t.A
    return FoxHBivariateSpec(
        n1=1,
        outer_a=((0.0, 1.0, -1.0),),
        outer_b=(),
        inner1=FoxHSpec(1, 1, ((0.0, 1.0),), ((0.0, 1.0),)),
        inner2=FoxHSpec(0, len(t.k5), tuple((v, inv_a) for v in t.k5),
                        tuple((v, inv_a) for v in t.k6)),
    )


@_perturbing
def _capacity_fg_foxh(cfg: LinkConfig) -> float:
    u = cfg.fso
    d, r = u.dgg, u.r
    p, q, A = d.p, d.q, d.A
    t = _fg_terms(u)
    spec = _capacity_fg_spec(cfg)
    kappa, c, varpi = cfg.kappa, cfg.fg_offset, cfg.varpi
    log_k = (
        math.log(u.xi2)
        + (d.m2 - 0.5) * math.log(p) + (d.m1 - 0.5) * math.log(q)
        + math.log(varpi) + (t.mu - 1.0) * math.log(r)
        - 1.5 * math.log(A)
        - 0.5 * (A + r * (p + q) - 3) * math.log(2.0 * math.pi)
        - math.log(math.log(2.0)) - special.gammaln(d.m1) - special.gammaln(d.m2)
        - math.log(kappa)
    )
    y = A * kappa / c * t.zr ** (1.0 / A)
    amp, beta = _cdf_weights(cfg.rf)
    parts = []
    for a_n, b_n in zip(amp, beta):
        parts.append(a_n / b_n * fox_h_bivariate(spec, varpi / (b_n * kappa), y))
    return math.exp(log_k) * math.fsum(parts)


def _capacity_fg_quadrature(cfg: LinkConfig) -> float:
    # int (1 + w g)^-1 exp(-b (kappa + c / g2) g) dg = e^x E1(x) / w, x = b (kappa + c / g2) / w.
    amp, beta = _cdf_weights(cfg.rf)
    kappa, c, varpi = cfg.kappa, cfg.fg_offset, cfg.varpi

    def inner(g2: float) -> float:
        return math.fsum(
            a_n * exp1_scaled(b_n * (kappa + c / g2) / varpi) for a_n, b_n in zip(amp, beta)
        )

    return expect_over_fso(inner, cfg.fso) / math.log(2.0)


def capacity_fg(cfg: LinkConfig, method: str = "foxh") -> float:
    """Ergodic capacity ``E[log2(1 + varpi SNDR)]`` of the fixed-gain link in bps/Hz.

    Parameters
    ----------
    method : {"foxh", "quadrature"}
        ``foxh`` evaluates the bivariate Fox-H closed form and falls back to
        quadrature if that fails to converge; ``quadrature`` integrates the
        complementary CDF directly.
    """
    _require_mode(cfg, RelayMode.FG, "capacity_fg")
    if method == "quadrature":
        return _capacity_fg_quadrature(cfg)
    if method != "foxh":
        raise ValueError(f"unknown method {method!r}")
    try:
        return _capacity_fg_foxh(cfg)
    except SpecialFunctionError:
        return _capacity_fg_quadrature(cfg)


def capacity_ceiling(d: HpaDerived, varpi: float = 1.0) -> float:
    """High-SNR capacity limit imposed by amplifier distortion (see :func:`rfso.hpa.capacity_ceiling`)."""
    return _hpa_ceiling(d, varpi)


# ---------------------------------------------------------------------------
# variable gain
# ---------------------------------------------------------------------------


def _vg_threshold(gamma_th: float, kappa: float) -> float:
    return gamma_th / ((kappa - 1.0) * gamma_th + 1.0)


def outage_vg_upper(gamma_th: float, cfg: LinkConfig) -> float:
    """Outage of the min-form SNDR, ``F1(g) + F2(g') - F1(g) F2(g')`` with ``g' = g / ((kappa-1) g + 1)``."""
    _require_mode(cfg, RelayMode.VG, "outage_vg_upper")
    if gamma_th <= 0:
        return 0.0
    if math.isinf(gamma_th):
        return 1.0
    f1 = prs_cdf(gamma_th, cfg.rf)
    f2 = fso_snr_cdf(_vg_threshold(gamma_th, cfg.kappa), cfg.fso)
    return f1 + f2 - f1 * f2


@_perturbing
def fso_cdf_asymptotic(gamma_th: float, cfg: LinkConfig) -> float:
    """High-SNR optical-hop CDF at the VG-mapped threshold ``g / ((kappa - 1) g + 1)``.

    Sums the large-argument residues of the CDF's Meijer-G, one per
    turbulence/pointing exponent.
    """
    u = cfg.fso
    g = _vg_threshold(gamma_th, cfg.kappa)
    z = u.zeta * g ** (-u.dgg.A / u.r)
    return _pdf_constant(u) / u.dgg.A * meijer_g_large_argument(fso_cdf_spec(u), z)


def _fso_cdf_exponents(u: UnifiedSnrParams):
    """``(coefficient, exponent)`` pairs with ``F2(g) ~ sum coef g^exponent`` at small g."""
    spec = fso_cdf_spec(u)
    A, r = u.dgg.A, u.r
    const = _pdf_constant(u) / A
    out = []
    for i in range(spec.n):
        lead = meijer_g_large_argument(spec, 1.0, terms=[i])
        ai = spec.a[i]
        out.append((const * lead * u.zeta ** (ai - 1.0), A / r * (1.0 - ai)))
    return out


@_perturbing
def bep_vg_asymptotic(cfg: LinkConfig, mod: ModulationScheme | None = None) -> float:
    """High-SNR BEP of the VG link from ``F ~ F1(g) + F2(g / ((kappa-1) g + 1))``.

    The optical part uses the small-``g`` expansion ``F2 ~ sum_i C_i g^(e_i)``
    and ``int g^(tau+e-1) e^(-q g) (1 + (kappa-1) g)^(-e) dg
    = q^(-tau-e) / Gamma(e) G^{1,2}_{2,1}((kappa-1)/q | 1-tau-e, 1-e; 0)``.
    """
    _require_mode(cfg, RelayMode.VG, "bep_vg_asymptotic")
    mod = _modulation(cfg, mod)
    tau = mod.tau
    lam = cfg.kappa - 1.0
    amp, beta = _cdf_weights(cfg.rf)
    terms = _fso_cdf_exponents(cfg.fso)
    rf_part = []
    fso_part = []
    for qk in mod.q:
        for a_n, b_n in zip(amp, beta):
            rf_part.append(a_n * (qk / (b_n + qk)) ** tau)
        for coef, e in terms:
            if lam <= 0.0:
                integral = math.exp(special.gammaln(tau + e) - (tau + e) * math.log(qk))
            else:
                spec = MeijerGSpec(1, 2, (1.0 - tau - e, 1.0 - e), (0.0,))
                integral = qk ** (-tau - e) / special.gamma(e) * meijer_g(spec, lam / qk)
            fso_part.append(coef * qk**tau * integral)
    return (
        0.5 * mod.delta * mod.v
        - 0.5 * mod.delta * math.fsum(rf_part)
        + mod.delta / (2.0 * special.gamma(tau)) * math.fsum(fso_part)
    )


def bep_vg_numerical(cfg: LinkConfig, mod: ModulationScheme | None = None) -> float:
    """VG BEP by integrating the min-form outage :func:`outage_vg_upper` against the error kernel."""
    _require_mode(cfg, RelayMode.VG, "bep_vg_numerical")
    mod = _modulation(cfg, mod)
    scale = min(cfg.rf.snr, fso_snr_moment(1.0, cfg.fso))
    return bep_from_cdf(lambda g: outage_vg_upper(g, cfg), mod, scale)


@_perturbing
def vg_ideal_gains(cfg: LinkConfig, c: float | None = None) -> AsymptoticGains:
    """Diversity and coding gains of the ideal VG link for ``P_e = E[Q(sqrt(c g))]``.

    The end-to-end density behaves as ``f(g) ~ a g^b / gamma_bar^(b+1)``
    near zero, with ``gamma_bar`` the common average SNR of both hops
    (``cfg.fso.mu_r``).  Contributions come from the radio hop (exponent
    0) and every optical exponent ``e_i - 1``; the smallest wins.

    Parameters
    ----------
    c : float, optional
        Modulation constant; 2 for BPSK.  Defaults to ``2 q`` of a
        single-term ``cfg.modulation``.
    """
    if c is None:
        mod = cfg.modulation
        if mod is None or mod.v != 1:
            raise ValueError("pass c explicitly unless the link carries a one-term modulation")
        c = 2.0 * mod.q[0]
    gbar = cfg.fso.mu_r
    w, _ = prs_terms(cfg.rf)
    cands = [(0.0, float(np.sum(w)) * gbar)]
    for coef, e in _fso_cdf_exponents(cfg.fso):
        # F2 ~ coef g^e  =>  f2 ~ coef e g^(e-1); normalise by gbar^e.
        cands.append((e - 1.0, coef * e * gbar**e))
    b = min(v for v, _ in cands)
    a = math.fsum(coef for v, coef in cands if abs(v - b) < 1e-9)
    scale = 2.0**b * a * special.gamma(b + 1.5) / (math.sqrt(math.pi) * (b + 1.0))
    G_c = c * scale ** (-1.0 / (b + 1.0))
    return AsymptoticGains(G_d=b + 1.0, G_c=G_c, a=a, b=b)


def asymptotic_bep(gains: AsymptoticGains, gamma_bar) -> float:
    """``(G_c gamma_bar)^(-G_d)``."""
    return (gains.G_c * np.asarray(gamma_bar, dtype=float)) ** (-gains.G_d)


def capacity_vg_approx(cfg: LinkConfig) -> float:
    """Ratio-of-means capacity ``log2(1 + varpi E[g1] E[g2] / (kappa E[g2] + E[g1] + kappa))``."""
    _require_mode(cfg, RelayMode.VG, "capacity_vg_approx")
    e1 = cfg.mean_gamma1
    e2 = fso_snr_moment(1.0, cfg.fso)
    kappa = cfg.kappa
    return math.log2(1.0 + cfg.varpi * e1 * e2 / (kappa * e2 + e1 + kappa))


def _j_foxh(cfg: LinkConfig) -> float:
    # J = sum_n A_n (1/2 pi i) int Gamma(s) Gamma(1-s) Gamma(2-s) (kappa beta_n)^(s-1) E[g2^s] ds,
    # written as H^{4,2}_{3,4} in s with the optical moment's gamma factors.
    u = cfg.fso
    d, r = u.dgg, u.r
    kappa = cfg.kappa
    spec = FoxHSpec(
        4, 2,
        ((0.0, 1.0), (-1.0, 1.0), (u.xi2 + 1.0, float(r))),
        ((0.0, 1.0), (d.m1, r / d.alpha1), (d.m2, r / d.alpha2), (u.xi2, float(r))),
    )
    log_scale = (
        math.log(u.mu_r) + r * math.log(u.gain_scale)
        + (r / d.alpha1) * math.log(d.omega1 / d.m1)
        + (r / d.alpha2) * math.log(d.omega2 / d.m2)
    )
    log_pref = math.log(u.xi2) - special.gammaln(d.m1) - special.gammaln(d.m2)
    amp, beta = _cdf_weights(cfg.rf)
    parts = []
    for a_n, b_n in zip(amp, beta):
        x = kappa * b_n
        z = math.exp(-(math.log(x) + log_scale))
        parts.append(a_n / x * fox_h(spec, z))
    return math.exp(log_pref) * math.fsum(parts)


def _j_quadrature(cfg: LinkConfig) -> float:
    # Inner radio integral: int x/(x + a) b e^{-b x} dx = 1 - a b e^{a b} E1(a b), a = kappa g2.
    w, beta = prs_terms(cfg.rf)
    kappa = cfg.kappa

    def inner(g2: float) -> float:
        acc = []
        for w_n, b_n in zip(w, beta):
            x = kappa * g2 * b_n
            acc.append(w_n / b_n * (1.0 - x * exp1_scaled(x)))
        return g2 * math.fsum(acc)

    return expect_over_fso(inner, cfg.fso)


def capacity_vg_upper(cfg: LinkConfig, method: str = "foxh") -> float:
    """Jensen upper bound ``log2(1 + varpi J)`` with ``J = E[g1 g2 / (kappa g2 + g1)]``.

    Parameters
    ----------
    method : {"foxh", "quadrature"}
        ``foxh`` evaluates ``J`` as a univariate Fox-H sum and falls back
        to quadrature on convergence failure.
    """
    _require_mode(cfg, RelayMode.VG, "capacity_vg_upper")
    if method == "quadrature":
        J = _j_quadrature(cfg)
    elif method == "foxh":
        try:
            J = _j_foxh(cfg)
        except SpecialFunctionError:
            J = _j_quadrature(cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return math.log2(1.0 + cfg.varpi * J)


def vg_upper_j(cfg: LinkConfig, method: str = "foxh") -> float:
    """The term ``J = E[g1 g2 / (kappa g2 + g1)]`` of :func:`capacity_vg_upper`."""
    return _j_foxh(cfg) if method == "foxh" else _j_quadrature(cfg)


# ---------------------------------------------------------------------------
# quadrature helper
# ---------------------------------------------------------------------------


def expect_over_fso(fn: Callable[[float], float], u: UnifiedSnrParams,
                    span: Sequence[float] | None = None) -> float:
    """``E[fn(gamma_2)]`` by quadrature against the optical density in log-SNR.

    ``span`` bounds ``t = log(gamma_2 / E[gamma_2])``.  By default the upper
    end is 10 and the lower end is placed where the lower tail, which decays
    like ``gamma_2^e`` with ``e = min(xi^2, alpha1 m1, alpha2 m2) / r``, holds
    less than about 1e-14 of the mass.  Panels are one unit wide around the
    mode and wider in the smooth tails.  The weighted density nodes are
    cached on ``u``.
    """
    if span is None:
        d = u.dgg
        e_min = min(u.xi2, d.alpha1 * d.m1, d.alpha2 * d.m2) / u.r
        span = (min(-50.0, math.log(1e-14) / e_min), 10.0)
    lo, hi = span
    key = ("fso_nodes", lo, hi)
    if key not in u._cache:
        core_lo, core_hi = max(lo, -12.0), min(hi, 6.0)
        pieces = [(lo, core_lo, 4.0), (core_lo, core_hi, 1.0), (core_hi, hi, 2.0)]
        nodes = [_gauss_panels(a, b, w) for a, b, w in pieces if b > a]
        t = np.concatenate([n[0] for n in nodes])
        w = np.concatenate([n[1] for n in nodes])
        g = fso_snr_moment(1.0, u) * np.exp(t)
        u._cache[key] = (g, w * np.asarray(fso_snr_pdf(g, u)) * g)
    g, wd = u._cache[key]
    vals = np.array([fn(float(x)) for x in g])
    return math.fsum(wd * vals)
