"""Optical hop: path loss, pointing error, Double Generalized Gamma turbulence.

The instantaneous electrical SNR of the optical hop is

    gamma_2 = mu_r * (I_a * I_l * I_p) ** r

with ``r = 1`` for heterodyne detection and ``r = 2`` for intensity
modulation with direct detection (IM/DD).  ``I_a`` is the product of two
independent generalized-gamma variates, ``I_l`` the deterministic path
loss and ``I_p`` the pointing-error attenuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import special

from .specfun import DomainError, MeijerGSpec, delta_seq, eval_elementary, meijer_g

__all__ = [
    "FsoGeometry",
    "BeamDerived",
    "DggParams",
    "UnifiedSnrParams",
    "DegenerateGeometryError",
    "derive_geometry",
    "path_loss",
    "sample_pointing",
    "sample_turbulence",
    "sample_fso_snr",
    "fso_snr_pdf",
    "fso_snr_cdf",
    "fso_snr_moment",
    "fso_pdf_spec",
    "fso_cdf_spec",
    "turbulence_moment",
    "TURBULENCE_PRESETS",
    "turbulence_preset",
    "CN2_PRESETS",
    "default_geometry",
]


class DegenerateGeometryError(ValueError):
    """Beam parameters for which the received beam width is undefined."""


@dataclass(frozen=True)
class FsoGeometry:
    """Raw optical-link geometry in SI units.

    Attributes
    ----------
    L : float
        Link length (m).
    wavelength : float
        Optical wavelength (m).
    a : float
        Receiver aperture radius (m).
    w0 : float
        Beam waist at the transmitter (m).
    F0 : float
        Phase-front radius of curvature (m); may be negative.
    sigma_s : float
        Jitter standard deviation at the receiver (m).
    cn2 : float
        Refractive-index structure parameter (m^-2/3).
    sigma_atten : float
        Weather attenuation coefficient (1/m).
    """

    L: float = 1000.0
    wavelength: float = 1550e-9
    a: float = 0.05
    w0: float = 0.005
    F0: float = -10.0
    sigma_s: float = 0.0375
    cn2: float = 5e-14
    sigma_atten: float = 0.0

    def __post_init__(self):
        for name in ("L", "wavelength", "a", "w0", "sigma_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"geometry field {name} must be positive")
        if self.cn2 < 0 or self.sigma_atten < 0:
            raise ValueError("cn2 and sigma_atten must be non-negative")
        if self.F0 == 0:
            raise ValueError("F0 must be non-zero")

    @property
    def k(self) -> float:
        """Optical wave number 2 pi / wavelength (rad/m)."""
        return 2.0 * math.pi / self.wavelength

    @cached_property
    def derived(self) -> "BeamDerived":
        return derive_geometry(self)


@dataclass(frozen=True)
class BeamDerived:
    """Quantities derived from :class:`FsoGeometry`."""

    theta0: float
    lambda0: float
    lambda1: float
    rytov: float
    w_z: float
    v: float
    w_zeq: float
    A0: float
    xi: float
    path_loss: float


def derive_geometry(g: FsoGeometry) -> BeamDerived:
    """Beam width, pointing-error coefficient and collected-power fraction.

    The received beam width uses ``w_z = w0 * sqrt((Theta0 + Lambda0) *
    (1 + 1.63 sigma_R^(12/5) Lambda1))`` with the Rytov variance
    ``sigma_R^2 = 1.23 Cn^2 k^(7/6) L^(11/6)``.

    Raises
    ------
    DegenerateGeometryError
        If Theta0 and Lambda0 both vanish, or the beam width is not real.
    """
    theta0 = 1.0 - g.L / g.F0
    lambda0 = 2.0 * g.L / (g.k * g.w0**2)
    if theta0 == 0.0 and lambda0 == 0.0:
        raise DegenerateGeometryError("Theta0 and Lambda0 vanish simultaneously")
    lambda1 = lambda0 / (theta0**2 + lambda0**2)
    rytov = 1.23 * g.cn2 * g.k ** (7.0 / 6.0) * g.L ** (11.0 / 6.0)
    radicand = (theta0 + lambda0) * (1.0 + 1.63 * rytov ** (6.0 / 5.0) * lambda1)
    if not radicand > 0:
        raise DegenerateGeometryError(f"beam width radicand {radicand:.6g} is not positive")
    w_z = g.w0 * math.sqrt(radicand)
    v = math.sqrt(math.pi) * g.a / (math.sqrt(2.0) * w_z)
    erf_v = eval_elementary("erf", v)
    # w_zeq^2 = w_z^2 sqrt(pi) erf(v) e^{v^2} / (2v); unbounded as the aperture outgrows the beam.
    half_log = 0.5 * v * v
    w_zeq = (w_z * math.sqrt(math.sqrt(math.pi) * erf_v / (2.0 * v)) * math.exp(half_log)
             if half_log < 700.0 else math.inf)
    return BeamDerived(
        theta0=theta0,
        lambda0=lambda0,
        lambda1=lambda1,
        rytov=rytov,
        w_z=w_z,
        v=v,
        w_zeq=w_zeq,
        A0=erf_v**2,
        xi=w_zeq / (2.0 * g.sigma_s),
        path_loss=path_loss(g.sigma_atten, g.L),
    )


def path_loss(sigma_atten: float, L: float) -> float:
    """Beer-Lambert attenuation ``exp(-sigma_atten * L)``."""
    if sigma_atten < 0 or L < 0:
        raise ValueError("attenuation and length must be non-negative")
    return math.exp(-sigma_atten * L)


def _integer_ratio(alpha1: float, alpha2: float, max_den: int = 20) -> tuple[int, int]:
    """Smallest integers (p, q) with p/q = alpha1/alpha2 and alpha2*p integral."""
    ratio = alpha1 / alpha2
    frac = Fraction(ratio).limit_denominator(max_den)
    if abs(float(frac) - ratio) > 1e-9 * ratio:
        raise ValueError(
            f"alpha1/alpha2 = {ratio:.12g} is not a ratio of integers with denominator "
            f"<= {max_den}; round the shape parameters to a rational ratio"
        )
    p0, q0 = frac.numerator, frac.denominator
    for mult in range(1, max_den + 1):
        prod = alpha2 * p0 * mult
        if abs(prod - round(prod)) < 1e-9 and round(prod) > 0:
            return p0 * mult, q0 * mult
    raise ValueError(
        f"no multiple of p={p0} up to {max_den} makes alpha2*p an integer (alpha2={alpha2})"
    )


@dataclass(frozen=True)
class DggParams:
    """Double Generalized Gamma turbulence ``I_a = I_x * I_y``.

    Each factor follows GG(alpha, m, Omega): ``I**alpha`` is Gamma
    distributed with shape ``m`` and mean ``Omega``.  The integers ``p``
    and ``q`` satisfy ``p/q = alpha1/alpha2`` and are filled in
    automatically when omitted.
    """

    alpha1: float
    m1: float
    omega1: float
    alpha2: float
    m2: float
    omega2: float
    p: int = 0
    q: int = 0

    def __post_init__(self):
        for name in ("alpha1", "m1", "omega1", "alpha2", "m2", "omega2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"turbulence parameter {name} must be positive")
        if self.p == 0 and self.q == 0:
            p, q = _integer_ratio(self.alpha1, self.alpha2)
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "q", q)
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive integers")
        if abs(self.p * self.alpha2 - self.q * self.alpha1) > 1e-9 * self.p * self.alpha2:
            raise ValueError(f"p/q = {self.p}/{self.q} does not equal alpha1/alpha2")
        A = self.alpha2 * self.p
        if abs(A - round(A)) > 1e-9:
            raise ValueError(f"alpha2 * p = {A} must be an integer")

    @property
    def A(self) -> int:
        """The integer alpha2 * p (= alpha1 * q)."""
        return int(round(self.alpha2 * self.p))

    @classmethod
    def unit_mean(cls, alpha1: float, m1: float, alpha2: float, m2: float) -> "DggParams":
        """Parameters with ``Omega`` chosen so that E[I_x] = E[I_y] = 1."""

        def omega(alpha, m):
            return m * math.exp(alpha * (special.gammaln(m) - special.gammaln(m + 1.0 / alpha)))

        return cls(alpha1, m1, omega(alpha1, m1), alpha2, m2, omega(alpha2, m2))


def turbulence_moment(t: float, d: DggParams) -> float:
    """``E[I_a**t]`` for the DGG model."""
    out = 1.0
    for alpha, m, om in ((d.alpha1, d.m1, d.omega1), (d.alpha2, d.m2, d.omega2)):
        arg = m + t / alpha
        if arg <= 0:
            raise DomainError(f"turbulence moment of order {t} does not exist")
        out *= math.exp(special.gammaln(arg) - special.gammaln(m)) * (om / m) ** (t / alpha)
    return out


# Artifact presets: shapes chosen so that alpha1/alpha2 is rational, every
# shape parameter avoids integer coincidences, and both factors have unit mean.
TURBULENCE_PRESETS: dict[str, tuple[float, float, float, float]] = {
    "weak": (2.0, 3.35, 2.0, 2.65),
    "moderate": (2.0, 2.55, 1.0, 1.45),
    "strong": (1.0, 1.35, 0.5, 1.85),
}

CN2_PRESETS: dict[str, float] = {"moderate": 5e-14, "strong": 2e-13}


def turbulence_preset(name: str) -> DggParams:
    """Unit-mean :class:`DggParams` for a named turbulence regime."""
    try:
        a1, m1, a2, m2 = TURBULENCE_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown turbulence preset {name!r}; choose from {sorted(TURBULENCE_PRESETS)}"
        ) from None
    return DggParams.unit_mean(a1, m1, a2, m2)


def default_geometry(**overrides) -> FsoGeometry:
    """Reference geometry: 1 km at 1550 nm, 5 cm aperture, 3.75 cm jitter."""
    return replace(FsoGeometry(), **overrides)


@dataclass(frozen=True)
class UnifiedSnrParams:
    """Optical hop statistics for a given detection mode and average SNR.

    Attributes
    ----------
    geometry : FsoGeometry
    dgg : DggParams
    r : {1, 2}
        1 for heterodyne detection, 2 for IM/DD.
    mu_r : float
        Average electrical SNR (linear).
    """

    geometry: FsoGeometry
    dgg: DggParams
    r: int
    mu_r: float
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.r not in (1, 2):
            raise ValueError("detection exponent r must be 1 (heterodyne) or 2 (IM/DD)")
        if not self.mu_r > 0:
            raise ValueError("mu_r must be positive")

    @property
    def beam(self) -> BeamDerived:
        return self.geometry.derived

    @property
    def xi2(self) -> float:
        return self.beam.xi**2

    @property
    def gain_scale(self) -> float:
        """Deterministic factor ``A0 * I_l`` of the composite gain."""
        return self.beam.A0 * self.beam.path_loss

    @property
    def zeta(self) -> float:
        d = self.dgg
        p, q, A = d.p, d.q, d.A
        log_z = (
            p * math.log(p) + q * math.log(q)
            + q * math.log(d.omega1) + p * math.log(d.omega2)
            - q * math.log(d.m1) - p * math.log(d.m2)
            + A * math.log(self.gain_scale) + (A / self.r) * math.log(self.mu_r)
        )
        return math.exp(log_z)

    def with_mu(self, mu_r: float) -> "UnifiedSnrParams":
        return replace(self, mu_r=mu_r)

    def with_xi(self, xi: float) -> "UnifiedSnrParams":
        """Same link with the jitter rescaled so that the pointing coefficient is ``xi``."""
        sigma_s = self.beam.w_zeq / (2.0 * xi)
        return replace(self, geometry=replace(self.geometry, sigma_s=sigma_s))


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def sample_pointing(g: FsoGeometry, rng: np.random.Generator, size: int) -> np.ndarray:
    """Pointing attenuation ``A0 exp(-2 R^2 / w_zeq^2)`` with Rayleigh ``R``."""
    b = g.derived
    radius = rng.rayleigh(g.sigma_s, size)
    return b.A0 * np.exp(-2.0 * radius**2 / b.w_zeq**2)


def _sample_gg(alpha: float, m: float, omega: float, rng: np.random.Generator, size: int):
    return rng.gamma(m, omega / m, size) ** (1.0 / alpha)


def sample_turbulence(d: DggParams, rng: np.random.Generator, size: int) -> np.ndarray:
    """Product of two independent generalized-gamma draws."""
    ix = _sample_gg(d.alpha1, d.m1, d.omega1, rng, size)
    iy = _sample_gg(d.alpha2, d.m2, d.omega2, rng, size)
    return ix * iy


def sample_fso_snr(u: UnifiedSnrParams, rng: np.random.Generator, size: int) -> np.ndarray:
    """Instantaneous optical-hop SNR ``mu_r (I_a I_l I_p)^r``."""
    gain = sample_turbulence(u.dgg, rng, size) * sample_pointing(u.geometry, rng, size)
    gain *= u.beam.path_loss
    return u.mu_r * gain**u.r


# ---------------------------------------------------------------------------
# distribution functions
# ---------------------------------------------------------------------------


def _kappa12(u: UnifiedSnrParams) -> tuple[list[float], list[float]]:
    d = u.dgg
    k1 = delta_seq(d.A, 1.0 - u.xi2) + delta_seq(d.q, 1.0 - d.m1) + delta_seq(d.p, 1.0 - d.m2)
    k2 = delta_seq(d.A, -u.xi2)
    return k1, k2


def _pdf_constant(u: UnifiedSnrParams) -> float:
    d = u.dgg
    log_c = (
        2.0 * math.log(u.beam.xi)
        + (d.m2 - 0.5) * math.log(d.p) + (d.m1 - 0.5) * math.log(d.q)
        + (1.0 - 0.5 * (d.p + d.q)) * math.log(2.0 * math.pi)
        - special.gammaln(d.m1) - special.gammaln(d.m2)
    )
    return math.exp(log_c)


def fso_pdf_spec(u: UnifiedSnrParams) -> MeijerGSpec:
    """Meijer-G parameters of the optical-hop SNR density."""
    k1, k2 = _kappa12(u)
    return MeijerGSpec(0, len(k1), tuple(k1), tuple(k2))


def fso_cdf_spec(u: UnifiedSnrParams) -> MeijerGSpec:
    """Meijer-G parameters of the optical-hop SNR distribution function."""
    k1, k2 = _kappa12(u)
    return MeijerGSpec(1, len(k1), tuple(k1) + (1.0,), (0.0,) + tuple(k2))


def _argument(u: UnifiedSnrParams, gamma: float) -> float:
    return u.zeta * gamma ** (-u.dgg.A / u.r)


def fso_snr_pdf(gamma, u: UnifiedSnrParams):
    """Density of the optical-hop SNR.

    Parameters
    ----------
    gamma : float or array_like
        Positive SNR values (linear).
    u : UnifiedSnrParams

    Returns
    -------
    float or ndarray
    """
    spec = fso_pdf_spec(u)
    const = _pdf_constant(u) / u.r

    def one(g):
        if g <= 0:
            return 0.0
        return const / g * meijer_g(spec, _argument(u, g))

    return _map(one, gamma)


def fso_snr_cdf(gamma, u: UnifiedSnrParams):
    """Distribution function of the optical-hop SNR."""
    spec = fso_cdf_spec(u)
    const = _pdf_constant(u) / u.dgg.A

    def one(g):
        if g <= 0:
            return 0.0
        if math.isinf(g):
            return 1.0
        return const * meijer_g(spec, _argument(u, g))

    return _map(one, gamma)


def fso_snr_moment(t: float, u: UnifiedSnrParams) -> float:
    """``E[gamma_2**t]`` of the optical-hop SNR.

    Raises
    ------
    DomainError
        If the moment does not exist (``xi^2 + r t <= 0`` or a
        turbulence moment of order ``r t`` diverges).
    """
    rt = u.r * t
    if u.xi2 + rt <= 0:
        raise DomainError(f"pointing-error moment of order {rt} does not exist")
    return (
        u.mu_r**t
        * u.gain_scale**rt
        * u.xi2 / (u.xi2 + rt)
        * turbulence_moment(rt, u.dgg)
    )


def _map(fn, x):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return fn(float(arr))
    return np.array([fn(float(v)) for v in arr.ravel()]).reshape(arr.shape)
