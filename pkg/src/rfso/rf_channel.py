"""Radio hop: Rayleigh fading with partial relay selection on outdated CSI.

The source ranks ``N`` relays by their (outdated) first-hop channel power
and forwards through the one at rank ``m`` (``m = N`` is the best).  The
channel in use is correlated with the outdated estimate through
``h = sqrt(rho) * h_hat + sqrt(1 - rho) * w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .specfun import eval_elementary

__all__ = [
    "PrsRfParams",
    "jakes_correlation",
    "prs_terms",
    "prs_pdf",
    "prs_cdf",
    "prs_moment",
    "sample_selected_snr",
]


@dataclass(frozen=True)
class PrsRfParams:
    """Radio-hop parameters.

    Attributes
    ----------
    N : int
        Number of relays.
    m : int
        Rank of the selected relay among the sorted outdated gains (1..N).
    rho : float
        Correlation between outdated and current channel coefficients.
    snr : float
        Average SNR of a single unsorted branch (linear).
    """

    N: int
    m: int
    rho: float
    snr: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("relay count N must be a positive integer")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("rank m must be a positive integer")
        if self.m > self.N:
            raise ValueError("rank m exceeds relay count N")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("correlation rho must lie in [0, 1]")
        if not self.snr > 0:
            raise ValueError("average SNR must be positive")

    def with_snr(self, snr: float) -> "PrsRfParams":
        return replace(self, snr=snr)


def jakes_correlation(fd: float, Td: float) -> float:
    """Time correlation ``J0(2 pi fd Td)`` of Jakes' Doppler spectrum.

    Negative values are returned unchanged; clamping is left to callers.
    """
    if fd < 0 or Td < 0:
        raise ValueError("Doppler frequency and delay must be non-negative")
    return eval_elementary("J0", 2.0 * math.pi * fd * Td)


def prs_terms(p: PrsRfParams) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``w_n`` and rates ``beta_n`` with ``pdf(x) = sum w_n exp(-beta_n x)``.

    ``beta_n = (N-m+n+1) / (((N-m+n)(1-rho) + 1) snr)`` for ``n = 0..m-1``.
    """
    N, m, rho, snr = p.N, p.m, p.rho, p.snr
    n = np.arange(m)
    lead = m * special.comb(N, m, exact=True)
    binom = np.array([special.comb(m - 1, k, exact=True) for k in n], dtype=float)
    denom = ((N - m + n) * (1.0 - rho) + 1.0) * snr
    beta = (N - m + n + 1) / denom
    weight = lead * binom * (-1.0) ** n / denom
    return weight, beta


def _cdf_weights(p: PrsRfParams) -> tuple[np.ndarray, np.ndarray]:
    """``A_n`` and ``beta_n`` with ``cdf(x) = 1 - sum A_n exp(-beta_n x)``."""
    N, m = p.N, p.m
    n = np.arange(m)
    lead = m * special.comb(N, m, exact=True)
    binom = np.array([special.comb(m - 1, k, exact=True) for k in n], dtype=float)
    amp = lead * binom * (-1.0) ** n / (N - m + n + 1)
    _, beta = prs_terms(p)
    return amp, beta


def prs_pdf(x, p: PrsRfParams):
    """Density of the selected relay's first-hop SNR."""
    w, beta = prs_terms(p)
    x = np.asarray(x, dtype=float)
    out = np.sum(w * np.exp(-np.multiply.outer(x, beta)), axis=-1)
    out = np.where(x < 0, 0.0, np.maximum(out, 0.0))
    return out if out.ndim else float(out)


def prs_cdf(x, p: PrsRfParams):
    """Distribution function of the selected relay's first-hop SNR."""
    amp, beta = _cdf_weights(p)
    x = np.asarray(x, dtype=float)
    out = 1.0 - np.sum(amp * np.exp(-np.multiply.outer(np.maximum(x, 0.0), beta)), axis=-1)
    out = np.where(x <= 0, 0.0, np.clip(out, 0.0, 1.0))
    return out if out.ndim else float(out)


def prs_moment(t: float, p: PrsRfParams) -> float:
    """``E[gamma_1**t]`` for ``t >= 0``."""
    if t < 0:
        raise ValueError("moment order must be non-negative")
    if t == 0:
        return 1.0
    amp, beta = _cdf_weights(p)
    return float(math.gamma(t + 1.0) * np.sum(amp * beta ** (-t)))


def sample_selected_snr(p: PrsRfParams, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw first-hop SNRs of the relay selected at rank ``m``.

    ``N`` unit-power complex Gaussian outdated gains are ranked by power
    (ties go to the lowest index); the current gain of the selected relay
    mixes its outdated gain with fresh noise of matching variance.
    """
    scale = math.sqrt(0.5)
    out = np.empty(size)
    chunk = 1 << 18
    for start in range(0, size, chunk):
        k = min(chunk, size - start)
        hat = rng.normal(0.0, scale, (k, p.N)) + 1j * rng.normal(0.0, scale, (k, p.N))
        power = hat.real**2 + hat.imag**2
        order = np.argsort(power, axis=1, kind="stable")
        chosen = np.take_along_axis(hat, order[:, p.m - 1 : p.m], axis=1)[:, 0]
        fresh = rng.normal(0.0, scale, k) + 1j * rng.normal(0.0, scale, k)
        h = math.sqrt(p.rho) * chosen + math.sqrt(1.0 - p.rho) * fresh
        out[start : start + k] = p.snr * (h.real**2 + h.imag**2)
    return out
