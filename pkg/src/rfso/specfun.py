"""Special functions used by the closed-form link metrics.

Elementary transcendentals are thin, domain-checked wrappers over
:mod:`scipy.special`.  Meijer-G and Fox-H functions are evaluated by
numerical quadrature of their Mellin-Barnes integrals along a vertical
line that separates the two pole families.  When no such line exists the
offending (simple) poles are stepped over and their residues added back.

Conventions
-----------
Univariate Fox-H (Meijer-G is the special case with unit scales)::

    H(z) = 1/(2 pi i) * Int Theta(s) z^(-s) ds

    Theta(s) = prod_{j<=m} Gamma(b_j + B_j s) prod_{j<=n} Gamma(1 - a_j - A_j s)
               / ( prod_{j>m} Gamma(1 - b_j - B_j s) prod_{j>n} Gamma(a_j + A_j s) )

Bivariate Fox-H (zero ``m`` in the coupling group)::

    H(x, y) = 1/(2 pi i)^2 Int Int phi(s, t) theta_1(s) theta_2(t) x^s y^t ds dt

    phi(s, t) = prod_{j<=n1} Gamma(1 - a_j + al_j s + A_j t)
                / ( prod_{j>n1} Gamma(a_j - al_j s - A_j t)
                    prod_j Gamma(1 - b_j + be_j s + B_j t) )
    theta_1(s) = prod_{j<=m2} Gamma(d_j - de_j s) prod_{j<=n2} Gamma(1 - c_j + ga_j s)
                 / ( prod_{j>m2} Gamma(1 - d_j + de_j s) prod_{j>n2} Gamma(c_j - ga_j s) )

and ``theta_2`` likewise.  With an empty coupling group each inner
integral is a univariate Fox-H function of its own argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, special

__all__ = [
    "SpecialFunctionError",
    "DomainError",
    "ConvergenceError",
    "DegenerateParametersError",
    "eval_elementary",
    "exp1_scaled",
    "delta_seq",
    "MeijerGSpec",
    "FoxHSpec",
    "FoxHBivariateSpec",
    "meijer_g",
    "fox_h",
    "fox_h_bivariate",
    "meijer_g_large_argument",
]

# Pole-coincidence tolerance shared by every degeneracy check.
POLE_TOL = 1e-6
# Integrand magnitude (relative to its maximum) below which the contour is cut.
TRUNCATION_TOL = 1e-17
# Bounds on the real part of a contour through an unbounded strip.
_MAX_ABS_C = 250.0
# Bivariate quadrature tolerances, about two orders tighter than its 1e-5 target.
_BIV_TRUNC = 1e-12
_BIV_EPS = 1e-8


class SpecialFunctionError(ArithmeticError):
    """Base class for failures inside :mod:`rfso.specfun`."""


class DomainError(SpecialFunctionError, ValueError):
    """Argument outside the real domain of the requested function."""


class ConvergenceError(SpecialFunctionError):
    """The Mellin-Barnes integral does not converge or quadrature failed."""


class DegenerateParametersError(SpecialFunctionError, ValueError):
    """Poles coincide so that the contour or residue sum is ill defined.

    Callers are expected to perturb the offending shape parameter by
    ``POLE_TOL`` and retry.
    """


# ---------------------------------------------------------------------------
# elementary functions
# ---------------------------------------------------------------------------


def _upper_gamma(a: float, x: float) -> float:
    if x < 0:
        raise DomainError(f"upper incomplete gamma needs x >= 0, got x={x}")
    if a > 0:
        if x == 0:
            return float(special.gamma(a))
        return float(special.gammaincc(a, x) * special.gamma(a))
    if x == 0:
        raise DomainError(f"upper incomplete gamma diverges at x=0 for a={a} <= 0")
    if a == 0:
        return float(special.exp1(x))
    # Downward recurrence Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a.
    k = math.ceil(-a)
    frac = a + k
    val = float(special.exp1(x)) if frac == 0 else _upper_gamma(frac, x)
    cur = frac
    for _ in range(k):
        cur -= 1.0
        val = (val - x**cur * math.exp(-x)) / cur
    return val


def _ei(x: float) -> float:
    if x == 0:
        raise DomainError("Ei is undefined at x=0")
    return float(special.expi(x))


_ELEMENTARY: dict[str, Callable[..., float]] = {
    "erf": lambda x: float(special.erf(x)),
    "erfc": lambda x: float(special.erfc(x)),
    "Ei": _ei,
    "J0": lambda x: float(special.j0(x)),
    "upper_incomplete_gamma": _upper_gamma,
    "gaussian_q": lambda x: float(0.5 * special.erfc(x / math.sqrt(2.0))),
}


def eval_elementary(kind: str, *args: float) -> float:
    """Evaluate an elementary special function with explicit domain checks.

    Parameters
    ----------
    kind : {"erf", "erfc", "Ei", "J0", "upper_incomplete_gamma", "gaussian_q"}
        Function name.  ``upper_incomplete_gamma`` takes ``(a, x)`` and
        returns the unregularised Gamma(a, x); the others take one argument.
    *args : float
        Real arguments.

    Raises
    ------
    DomainError
        If an argument is outside the function's real domain or not finite.
    """
    try:
        fn = _ELEMENTARY[kind]
    except KeyError:
        raise DomainError(f"unknown elementary function {kind!r}") from None
    if any(not math.isfinite(v) for v in args):
        raise DomainError(f"{kind}: non-finite argument {args}")
    out = fn(*args)
    if math.isnan(out):
        raise DomainError(f"{kind}{args} is undefined")
    return out


def exp1_scaled(x: float) -> float:
    """``e^x E1(x)`` for ``x > 0``, finite for arbitrarily large ``x``."""
    if not x > 0:
        raise DomainError(f"scaled exponential integral needs x > 0, got x={x}")
    if x < 50.0:
        return float(special.exp1(x) * math.exp(x))
    # Lentz evaluation of the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...))).
    b = x + 1.0
    c = 1.0 / 1e-300
    d = 1.0 / b
    h = d
    for i in range(1, 200):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def delta_seq(j: int, x: float) -> list[float]:
    """Return ``[x/j, (x+1)/j, ..., (x+j-1)/j]``, the Gauss multiplication set."""
    return [(x + i) / j for i in range(j)]


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeijerGSpec:
    """Orders and parameters of G^{m,n}_{p,q}(z | a; b)."""

    m: int
    n: int
    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError(
                f"invalid Meijer-G orders m={self.m}, n={self.n}, p={self.p}, q={self.q}"
            )

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    def as_fox(self, scale: float = 1.0) -> "FoxHSpec":
        """Fox-H parameters with every scale set to ``scale``."""
        return FoxHSpec(
            self.m,
            self.n,
            tuple((v, scale) for v in self.a),
            tuple((v, scale) for v in self.b),
        )


def _pairs(values) -> tuple[tuple[float, float], ...]:
    out = []
    for coef, scale in values:
        out.append((float(coef), float(scale)))
    return tuple(out)


@dataclass(frozen=True)
class FoxHSpec:
    """Orders and ``(coefficient, scale)`` pairs of H^{m,n}_{p,q}(z)."""

    m: int
    n: int
    a: tuple[tuple[float, float], ...] = ()
    b: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", _pairs(self.a))
        object.__setattr__(self, "b", _pairs(self.b))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError(
                f"invalid Fox-H orders m={self.m}, n={self.n}, p={self.p}, q={self.q}"
            )
        if any(s <= 0 for _, s in self.a + self.b):
            raise ValueError("Fox-H scales must be strictly positive")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class FoxHBivariateSpec:
    """Parameters of the bivariate Fox-H function (see module docstring).

    ``outer_a`` and ``outer_b`` hold ``(coefficient, scale_s, scale_t)``
    triples; the first ``n1`` entries of ``outer_a`` sit in the numerator.
    ``inner1`` and ``inner2`` are ordinary univariate :class:`FoxHSpec`
    objects describing ``theta_1`` and ``theta_2``.
    """

    n1: int
    outer_a: tuple[tuple[float, float, float], ...]
    outer_b: tuple[tuple[float, float, float], ...]
    inner1: FoxHSpec
    inner2: FoxHSpec

    def __post_init__(self):
        object.__setattr__(
            self, "outer_a", tuple(tuple(float(v) for v in e) for e in self.outer_a)
        )
        object.__setattr__(
            self, "outer_b", tuple(tuple(float(v) for v in e) for e in self.outer_b)
        )
        if not 0 <= self.n1 <= len(self.outer_a):
            raise ValueError("n1 must not exceed the number of outer upper parameters")
        if any(len(e) != 3 for e in self.outer_a + self.outer_b):
            raise ValueError("outer parameters are (coefficient, scale_s, scale_t) triples")

    @property
    def is_separable(self) -> bool:
        return not self.outer_a and not self.outer_b


# ---------------------------------------------------------------------------
# univariate Mellin-Barnes machinery
# ---------------------------------------------------------------------------


@dataclass
class _Kernel:
    """Gamma-ratio kernel of a univariate Fox-H function in the z^(-s) form.

    Each numerator or denominator factor is Gamma(c + k s) stored as (c, k).
    """

    num: list[tuple[float, float]] = field(default_factory=list)
    den: list[tuple[float, float]] = field(default_factory=list)
    left: list[tuple[float, float]] = field(default_factory=list)  # Gamma(b + B s)
    right: list[tuple[float, float]] = field(default_factory=list)  # Gamma(1 - a - A s)

    @classmethod
    def from_fox(cls, spec: FoxHSpec) -> "_Kernel":
        ker = cls()
        for j, (b, B) in enumerate(spec.b):
            if j < spec.m:
                ker.num.append((b, B))
                ker.left.append((b, B))
            else:
                ker.den.append((1.0 - b, -B))
        for j, (a, A) in enumerate(spec.a):
            if j < spec.n:
                ker.num.append((1.0 - a, -A))
                ker.right.append((a, A))
            else:
                ker.den.append((a, A))
        return ker

    def log(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for c, k in self.num:
            out = out + special.loggamma(c + k * s)
        for c, k in self.den:
            out = out - special.loggamma(c + k * s)
        return out

    def log_abs_real(self, x: float) -> float:
        # log|Theta| on the real axis; real-valued gammaln avoids branch cuts.
        val = 0.0
        for c, k in self.num:
            val += special.gammaln(c + k * x)
        for c, k in self.den:
            val -= special.gammaln(c + k * x)
        return float(val)

    def decay_rate(self) -> float:
        """Exponential decay constant a* of |Theta(c + i t)| ~ exp(-a* pi |t| / 2)."""
        return sum(abs(k) for _, k in self.num) - sum(abs(k) for _, k in self.den)

    def strip(self) -> tuple[float, float]:
        lo = max((-b / B for b, B in self.left), default=-math.inf)
        hi = min(((1.0 - a) / A for a, A in self.right), default=math.inf)
        return lo, hi

    def left_poles(self, lo: float, hi: float):
        """Poles of the Gamma(b + B s) family inside (lo, hi)."""
        out = []
        for idx, (b, B) in enumerate(self.left):
            k = 0
            while True:
                s0 = -(b + k) / B
                if s0 <= lo:
                    break
                if s0 < hi:
                    out.append((s0, idx, k))
                k += 1
        return out

    def right_poles(self, lo: float, hi: float):
        """Poles of the Gamma(1 - a - A s) family inside (lo, hi)."""
        out = []
        for idx, (a, A) in enumerate(self.right):
            k = 0
            while True:
                s0 = (1.0 - a + k) / A
                if s0 >= hi:
                    break
                if s0 > lo:
                    out.append((s0, idx, k))
                k += 1
        return out


def _gamma_or_pole(x: float) -> float:
    if x <= 0 and abs(x - round(x)) < 1e-12:
        raise DegenerateParametersError(f"higher-order pole: Gamma argument {x}")
    return float(special.gamma(x))


def _residue(ker: _Kernel, s0: float, family: str, idx: int, k: int, log_z: float) -> float:
    """Residue of Theta(s) z^(-s) at a simple pole ``s0``."""
    val = 1.0
    skipped = False
    for c, kk in ker.num:
        if not skipped:
            if family == "left" and (c, kk) == ker.left[idx]:
                skipped = True
                continue
            if family == "right" and (c, kk) == (1.0 - ker.right[idx][0], -ker.right[idx][1]):
                skipped = True
                continue
        val *= _gamma_or_pole(c + kk * s0)
    for c, kk in ker.den:
        val *= float(special.rgamma(c + kk * s0))
    sign = (-1.0) ** k / math.factorial(k)
    if family == "left":
        scale = ker.left[idx][1]
        val *= sign / scale
    else:
        scale = ker.right[idx][1]
        val *= -sign / scale
    return val * math.exp(-s0 * log_z)


def _check_separation(ker: _Kernel, lo: float, hi: float):
    lp = [p[0] for p in ker.left_poles(lo - 1.0, hi + 1.0)]
    rp = [p[0] for p in ker.right_poles(lo - 1.0, hi + 1.0)]
    for x in lp:
        for y in rp:
            if abs(x - y) < POLE_TOL:
                raise DegenerateParametersError(
                    f"left- and right-family poles coincide near s={x:.6g}"
                )


def _choose_line(ker: _Kernel, log_z: float) -> tuple[float, list[tuple[str, float, int, int]]]:
    """Pick the abscissa of the vertical contour and the poles it steps over."""
    lo, hi = ker.strip()
    objective = lambda c: ker.log_abs_real(c) - c * log_z  # noqa: E731
    if lo < hi:
        _check_separation(ker, lo, hi)
        width = hi - lo
        if math.isinf(width):
            base = lo if math.isfinite(lo) else (hi if math.isfinite(hi) else 0.0)
            a = lo + 1e-3 if math.isfinite(lo) else min(base - _MAX_ABS_C, -_MAX_ABS_C)
            b = hi - 1e-3 if math.isfinite(hi) else max(base + _MAX_ABS_C, _MAX_ABS_C)
        else:
            pad = min(1e-3, 0.25 * width)
            a, b = lo + pad, hi - pad
        res = optimize.minimize_scalar(objective, bounds=(a, b), method="bounded",
                                       options={"xatol": 1e-10})
        c = float(res.x)
        # Keep clear of the strip edges so the integrand stays smooth.
        if math.isfinite(lo):
            c = max(c, lo + min(0.02, 0.25 * (hi - lo) if math.isfinite(hi) else 0.02))
        if math.isfinite(hi):
            c = min(c, hi - min(0.02, 0.25 * (hi - lo) if math.isfinite(lo) else 0.02))
        return c, []

    # Empty strip: step over the poles lying on the wrong side.
    _check_separation(ker, hi, lo)
    poles = sorted(
        {round(p[0], 12) for p in ker.left_poles(hi - 1.0, lo + 1.0)}
        | {round(p[0], 12) for p in ker.right_poles(hi - 1.0, lo + 1.0)}
    )
    gaps = [(poles[i], poles[i + 1]) for i in range(len(poles) - 1)]
    gaps = [g for g in gaps if g[1] - g[0] > 4 * POLE_TOL]
    if not gaps:
        raise DegenerateParametersError("no gap between poles for the contour")
    mid_target = 0.5 * (hi + lo)
    g0, g1 = max(gaps, key=lambda g: (g[1] - g[0]) - 1e-3 * abs(0.5 * (g[0] + g[1]) - mid_target))
    c = 0.5 * (g0 + g1)
    corrections = []
    for s0, idx, k in ker.left_poles(c, math.inf):
        corrections.append(("left", s0, idx, k))
    for s0, idx, k in ker.right_poles(-math.inf, c):
        corrections.append(("right", s0, idx, k))
    return c, corrections


def _truncation(fun_abs: Callable[[np.ndarray], np.ndarray], start: float = 0.0,
                tol: float = TRUNCATION_TOL) -> tuple[float, float]:
    """Find T such that |f(t)| < tol * max|f| for t >= T."""
    t = start + np.concatenate(([0.0], 0.25 * 1.35 ** np.arange(0, 60)))
    mags = fun_abs(t)
    mags = np.where(np.isfinite(mags), mags, 0.0)
    peak = float(np.max(mags))
    if peak == 0.0:
        return start + 1.0, 0.0
    above = np.nonzero(mags > tol * peak)[0]
    last = int(above[-1]) if above.size else 0
    if last + 1 >= len(t):
        raise ConvergenceError("Mellin-Barnes integrand does not decay along the contour")
    return float(t[last + 1]), peak


def _line_integral(ker: _Kernel, c: float, log_z: float) -> float:
    base = ker.log_abs_real(c) - c * log_z
    if not math.isfinite(base):
        base = 0.0

    def logf(t):
        s = c + 1j * np.asarray(t, dtype=float)
        return ker.log(s) - s * log_z - base

    T, peak = _truncation(lambda t: np.exp(np.real(logf(t))))
    if peak == 0.0:
        return 0.0

    def f(t):
        return float(np.real(np.exp(logf(t))))

    # Split so that each panel holds a bounded number of oscillations.
    n_panels = int(min(200, max(1, math.ceil(T * max(abs(log_z), 1.0) / (8 * math.pi)))))
    edges = np.linspace(0.0, T, n_panels + 1)
    parts = []
    for lo_t, hi_t in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(f, lo_t, hi_t, limit=400, epsabs=1e-15 * peak,
                                  epsrel=1e-11)
        parts.append(val)
    total = math.fsum(parts)
    return total / math.pi * math.exp(base)


def _fox_eval(ker: _Kernel, z: float) -> float:
    if not (z > 0 and math.isfinite(z)):
        raise DomainError(f"Mellin-Barnes evaluation needs a positive finite argument, got {z}")
    if ker.decay_rate() <= 0:
        raise ConvergenceError(
            f"contour integral diverges: decay parameter {ker.decay_rate():.6g} <= 0"
        )
    log_z = math.log(z)
    c, corrections = _choose_line(ker, log_z)
    val = _line_integral(ker, c, log_z)
    for family, s0, idx, k in corrections:
        res = _residue(ker, s0, family, idx, k, log_z)
        val += res if family == "left" else -res
    if not math.isfinite(val):
        raise ConvergenceError(f"non-finite Mellin-Barnes result at z={z}")
    return val


def meijer_g(spec: MeijerGSpec, z: float) -> float:
    """Evaluate the Meijer-G function G^{m,n}_{p,q}(z | a; b) for real z > 0.

    Parameters
    ----------
    spec : MeijerGSpec
        Orders and parameters.
    z : float
        Positive real argument.

    Returns
    -------
    float

    Raises
    ------
    ConvergenceError
        If ``m + n <= (p + q) / 2`` (the vertical contour does not converge).
    DegenerateParametersError
        If a left-family pole coincides with a right-family pole.
    """
    return _fox_eval(_Kernel.from_fox(spec.as_fox()), z)


def fox_h(spec: FoxHSpec, z: float) -> float:
    """Evaluate the univariate Fox-H function H^{m,n}_{p,q}(z) for real z > 0."""
    return _fox_eval(_Kernel.from_fox(spec), z)


def meijer_g_large_argument(spec: MeijerGSpec, z: float, terms: Sequence[int] | None = None) -> float:
    """Leading large-``z`` expansion of G^{m,n}_{p,q}(z).

    Sums the residues at ``s = 1 - a_i`` for the numerator parameters
    ``a_1..a_n``, each contributing a multiple of ``z^(a_i - 1)``.

    Parameters
    ----------
    spec : MeijerGSpec
    z : float
    terms : sequence of int, optional
        Restrict the sum to these indices of ``a`` (all ``n`` by default).

    Raises
    ------
    DegenerateParametersError
        If two of ``a_1..a_n`` differ by an integer (double poles).
    """
    a, b, m, n = spec.a, spec.b, spec.m, spec.n
    for i in range(n):
        for j in range(i + 1, n):
            d = a[i] - a[j]
            if abs(d - round(d)) < POLE_TOL:
                raise DegenerateParametersError(
                    f"upper parameters a[{i}]={a[i]} and a[{j}]={a[j]} differ by an integer"
                )
    idx = range(n) if terms is None else terms
    total = []
    for i in idx:
        ai = a[i]
        num = 1.0
        for j in range(n):
            if j != i:
                num *= special.gamma(ai - a[j])
        for j in range(m):
            num *= special.gamma(1.0 - ai + b[j])
        den = 1.0
        for j in range(m, len(b)):
            den *= special.rgamma(ai - b[j])
        for j in range(n, len(a)):
            den *= special.rgamma(1.0 - ai + a[j])
        total.append(num * den * z ** (ai - 1.0))
    return math.fsum(total)


# ---------------------------------------------------------------------------
# bivariate Fox-H
# ---------------------------------------------------------------------------


def _inner_kernel(spec: FoxHSpec) -> _Kernel:
    # theta(s) with x^(+s) is the univariate kernel at -s.
    ker = _Kernel.from_fox(spec)
    flip = _Kernel(
        num=[(c, -k) for c, k in ker.num],
        den=[(c, -k) for c, k in ker.den],
    )
    return flip


def _bivariate_constraints(spec: FoxHBivariateSpec):
    """Linear constraints ``g0 + g1*c1 + g2*c2 > 0`` keeping poles off the contours."""
    cons = []
    for idx, (a, al, A) in enumerate(spec.outer_a[: spec.n1]):
        cons.append((1.0 - a, al, A, f"coupling numerator {idx}"))
    for which, inner in ((1, spec.inner1), (2, spec.inner2)):
        for j, (d, de) in enumerate(inner.b[: inner.m]):
            # Gamma(d - de s): poles at s = (d + k)/de to the right.
            g = (d, -de, 0.0) if which == 1 else (d, 0.0, -de)
            cons.append(g + (f"inner{which} lower {j}",))
        for j, (c, ga) in enumerate(inner.a[: inner.n]):
            g = (1.0 - c, ga, 0.0) if which == 1 else (1.0 - c, 0.0, ga)
            cons.append(g + (f"inner{which} upper {j}",))
    return cons


def _bivariate_kernel(spec: FoxHBivariateSpec):
    num: list[tuple[float, float, float]] = []
    den: list[tuple[float, float, float]] = []
    for j, (a, al, A) in enumerate(spec.outer_a):
        if j < spec.n1:
            num.append((1.0 - a, al, A))
        else:
            den.append((a, -al, -A))
    for b, be, B in spec.outer_b:
        den.append((1.0 - b, be, B))
    k1 = _inner_kernel(spec.inner1)
    k2 = _inner_kernel(spec.inner2)
    num += [(c, k, 0.0) for c, k in k1.num] + [(c, 0.0, k) for c, k in k2.num]
    den += [(c, k, 0.0) for c, k in k1.den] + [(c, 0.0, k) for c, k in k2.den]
    return num, den


def fox_h_bivariate(spec: FoxHBivariateSpec, z1: float, z2: float) -> float:
    """Evaluate the bivariate Fox-H function at positive real ``(z1, z2)``.

    The double Mellin-Barnes integral is computed by nested adaptive
    quadrature over the two vertical contours; an empty coupling group
    reduces to the product of two univariate evaluations.

    Raises
    ------
    ConvergenceError
        If a contour does not converge (the message names the contour and
        direction) or the contours cannot be placed.
    """
    if not (z1 > 0 and z2 > 0):
        raise DomainError("bivariate Fox-H needs positive real arguments")
    if spec.is_separable:
        return fox_h(spec.inner1, z1) * fox_h(spec.inner2, z2)

    num, den = _bivariate_kernel(spec)
    # Decay along each imaginary direction, with the other held fixed.
    for axis, name in ((1, "s"), (2, "t")):
        rate = sum(abs(e[axis]) for e in num) - sum(abs(e[axis]) for e in den)
        if rate <= 0:
            raise ConvergenceError(
                f"bivariate Fox-H: contour in {name} diverges along Im {name} -> +-inf "
                f"(decay parameter {rate:.6g})"
            )
    l1, l2 = math.log(z1), math.log(z2)

    def log_real(c1, c2):
        v = 0.0
        for c, k1, k2 in num:
            v += special.gammaln(c + k1 * c1 + k2 * c2)
        for c, k1, k2 in den:
            v -= special.gammaln(c + k1 * c1 + k2 * c2)
        return v + c1 * l1 + c2 * l2

    c1, c2 = _bivariate_line(spec, log_real)
    base = log_real(c1, c2)
    num_c = np.array([e[0] + e[1] * c1 + e[2] * c2 for e in num])
    num_k1 = np.array([e[1] for e in num])
    num_k2 = np.array([e[2] for e in num])
    den_c = np.array([e[0] + e[1] * c1 + e[2] * c2 for e in den])
    den_k1 = np.array([e[1] for e in den])
    den_k2 = np.array([e[2] for e in den])

    def logf(sig, tau):
        sig = np.asarray(sig, dtype=float)
        out = (1j * sig * l1 + 1j * tau * l2 + (c1 * l1 + c2 * l2 - base)).astype(complex)
        for c, k1, k2 in zip(num_c, num_k1, num_k2):
            out = out + special.loggamma(c + 1j * (k1 * sig + k2 * tau))
        for c, k1, k2 in zip(den_c, den_k1, den_k2):
            out = out - special.loggamma(c + 1j * (k1 * sig + k2 * tau))
        return out

    panel_width = min(1.0, 4.0 / max(abs(l1), 1.0))

    def inner(tau: float) -> float:
        # Ridge of |integrand| in sigma for this tau; expand both ways from it.
        grid = np.linspace(-40.0, 40.0, 161) + 0.0
        mag = np.real(logf(grid, tau))
        centre = float(grid[int(np.argmax(mag))])
        hi, pk_hi = _truncation(lambda t: np.exp(np.real(logf(centre + t, tau))), tol=_BIV_TRUNC)
        lo, pk_lo = _truncation(lambda t: np.exp(np.real(logf(centre - t, tau))), tol=_BIV_TRUNC)
        peak = max(pk_hi, pk_lo)
        if peak == 0.0:
            return 0.0
        # The integrand is analytic along the line: composite Gauss-Legendre
        # panels narrower than its oscillation converge geometrically.
        x, w = _gauss_panels(centre - lo, centre + hi, panel_width)
        return float(np.dot(w, np.real(np.exp(logf(x, tau)))))

    def inner_peak(tau):
        grid = np.linspace(-40.0, 40.0, 161)
        return float(np.max(np.exp(np.real(logf(grid, tau)))))

    T, outer_peak = _truncation(np.vectorize(inner_peak), tol=_BIV_TRUNC)
    if outer_peak == 0.0:
        return 0.0
    n_panels = int(min(60, max(2, math.ceil(T * max(abs(l2), 1.0) / (8 * math.pi)))))
    edges = np.linspace(0.0, T, n_panels + 1)
    parts = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(inner, a, b, limit=200, epsabs=10 * _BIV_EPS * outer_peak,
                                epsrel=10 * _BIV_EPS)
        parts.append(val)
    total = math.fsum(parts) * 2.0 / (2.0 * math.pi) ** 2
    out = total * math.exp(base)
    if not math.isfinite(out):
        raise ConvergenceError("bivariate Fox-H quadrature produced a non-finite value")
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gauss_panels(a: float, b: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of 16-point Gauss-Legendre panels covering [a, b]."""
    n = max(1, math.ceil((b - a) / width))
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return x, w


def _bivariate_line(spec: FoxHBivariateSpec, log_real) -> tuple[float, float]:
    cons = _bivariate_constraints(spec)
    if not cons:
        return 0.0, 0.0
    # Chebyshev centre of the feasible polygon, capped to a finite box.
    A_ub, b_ub = [], []
    for g0, g1, g2, _ in cons:
        norm = math.hypot(g1, g2)
        A_ub.append([-g1, -g2, norm])
        b_ub.append(g0)
    res = optimize.linprog(
        c=[0.0, 0.0, -1.0], A_ub=A_ub, b_ub=b_ub,
        bounds=[(-_MAX_ABS_C, _MAX_ABS_C), (-_MAX_ABS_C, _MAX_ABS_C), (0, 1.0)],
        method="highs",
    )
    if not res.success or res.x[2] <= POLE_TOL:
        names = ", ".join(name for *_, name in cons)
        raise DegenerateParametersError(
            f"bivariate Fox-H: no contour pair separates the poles ({names})"
        )
    x0 = np.array(res.x[:2])
    margin = 0.02 * min(1.0, res.x[2])

    def margin_ok(x):
        return all(g0 + g1 * x[0] + g2 * x[1] >= margin for g0, g1, g2, _ in cons)

    def obj(x):
        if not margin_ok(x):
            return 1e300
        return log_real(x[0], x[1])

    opt = optimize.minimize(obj, x0, method="Nelder-Mead",
                            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 2000})
    x = opt.x if margin_ok(opt.x) and opt.fun < obj(x0) else x0
    return float(x[0]), float(x[1])
