"""Memoryless power-amplifier nonlinearities under Bussgang linearisation.

The amplifier output is modelled as ``Omega * x + d`` where ``d`` is a
zero-mean Gaussian distortion of variance ``sigma_d2`` uncorrelated with
the input ``x`` of power ``sigma_r2``.  Two models are supported: the soft
envelope limiter (SEL) and the travelling-wave tube amplifier (TWTA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erfcx

from .specfun import exp1_scaled

__all__ = [
    "HpaKind",
    "HpaModel",
    "HpaDerived",
    "IdealHardwareError",
    "derive_hpa",
    "kappa_factor",
    "am_am",
    "capacity_ceiling",
]


class HpaKind(str, Enum):
    SEL = "SEL"
    TWTA = "TWTA"
    IDEAL = "IDEAL"


class IdealHardwareError(ValueError):
    """Raised when a quantity only exists for a distorting amplifier."""


@dataclass(frozen=True)
class HpaModel:
    """Amplifier model.

    Attributes
    ----------
    kind : HpaKind
    a_sat : float
        Input saturation amplitude.
    sigma_r2 : float
        Mean signal power at the gain-block output.
    """

    kind: HpaKind
    a_sat: float = 1.0
    sigma_r2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", HpaKind(self.kind))
        if not (self.a_sat > 0 and self.sigma_r2 > 0):
            raise ValueError("a_sat and sigma_r2 must be positive")

    @classmethod
    def from_ibo_db(cls, kind, ibo_db: float, sigma_r2: float = 1.0) -> "HpaModel":
        """Model with input back-off ``a_sat**2 / sigma_r2`` given in dB."""
        return cls(kind, math.sqrt(sigma_r2 * 10.0 ** (ibo_db / 10.0)), sigma_r2)

    @property
    def ibo(self) -> float:
        return self.a_sat**2 / self.sigma_r2

    @property
    def ibo_db(self) -> float:
        return 10.0 * math.log10(self.ibo)


@dataclass(frozen=True)
class HpaDerived:
    """Bussgang gain, distortion variance and clipping factor."""

    omega: float
    sigma_d2: float
    eta_clip: float
    sigma_r2: float

    @property
    def distortion_ratio(self) -> float:
        """``sigma_d2 / (Omega^2 sigma_r2)``: distortion-to-useful power at the output."""
        return self.sigma_d2 / (self.omega**2 * self.sigma_r2)


def derive_hpa(model: HpaModel) -> HpaDerived:
    """Bussgang parameters of an amplifier model.

    SEL, with ``nu = a_sat / sigma_r``::

        Omega = 1 - exp(-nu^2) + (sqrt(pi) nu / 2) erfc(nu)
        eta   = 1 - exp(-nu^2)

    TWTA, with ``x = a_sat^2 / sigma_r2``::

        Omega = x [1 + x e^x Ei(-x)]
        eta   = -x^2 [(1 + x) e^x Ei(-x) + 1]

    and in both cases ``sigma_d2 = sigma_r2 (eta - Omega^2)``.
    """
    sr2 = model.sigma_r2
    if model.kind is HpaKind.IDEAL:
        return HpaDerived(1.0, 0.0, 1.0, sr2)
    a2 = model.a_sat**2
    x = a2 / sr2
    if model.kind is HpaKind.SEL:
        # With h = (sqrt(pi)/2) nu erfcx(nu): Omega - 1 = e^-x (h - 1) and
        # eta - Omega^2 = e^-x (1 - 2h) - (Omega - 1)^2, free of cancellation.
        nu = math.sqrt(x)
        h = 0.5 * math.sqrt(math.pi) * nu * float(erfcx(nu))
        tail = math.exp(-x)
        dev = tail * (h - 1.0)
        omega = 1.0 + dev
        sigma_d2 = sr2 * (tail * (1.0 - 2.0 * h) - dev**2)
        return HpaDerived(omega, sigma_d2, -math.expm1(-x), sr2)
    # e^x Ei(-x) = -e^x E1(x), scaled so large back-offs stay finite.
    e_ei = -exp1_scaled(x)
    omega = x * (1.0 + x * e_ei)
    clip = -(x**2) * ((1.0 + x) * e_ei + 1.0)
    sigma_d2 = -(a2**2 / sr2) * ((1.0 + a2 / sr2) * e_ei + 1.0) - sr2 * omega**2
    return HpaDerived(omega, sigma_d2, clip, sr2)


def kappa_factor(d: HpaDerived, gain: float, noise_power: float) -> float:
    """Nonlinearity factor ``1 + sigma_d2 / (Omega^2 G^2 sigma_0^2)``."""
    if not (gain > 0 and noise_power > 0):
        raise ValueError("gain and noise power must be positive")
    return 1.0 + d.sigma_d2 / (d.omega**2 * gain**2 * noise_power)


def am_am(kind, r_in, a_sat: float = 1.0):
    """Output amplitude for input amplitude ``r_in``.

    SEL clips at ``a_sat``.  TWTA uses the Saleh characteristic
    ``2 a_sat^2 r / (a_sat^2 + r^2)``, which peaks at ``r = a_sat`` with
    output ``a_sat`` and rolls off beyond.  IDEAL is the identity.
    """
    kind = HpaKind(kind)
    r = np.asarray(r_in, dtype=float)
    if np.any(r < 0):
        raise ValueError("input amplitude must be non-negative")
    if kind is HpaKind.SEL:
        out = np.minimum(r, a_sat)
    elif kind is HpaKind.TWTA:
        out = 2.0 * a_sat**2 * r / (a_sat**2 + r**2)
    else:
        out = r.copy()
    return out if out.ndim else float(out)


def capacity_ceiling(d: HpaDerived, varpi: float = 1.0) -> float:
    """High-SNR capacity limit ``log2(1 + varpi Omega^2 / (eta - Omega^2))`` in bps/Hz.

    Raises
    ------
    IdealHardwareError
        If ``eta <= Omega^2`` (no distortion, hence no ceiling).
    """
    excess = d.sigma_d2 / d.sigma_r2
    if not excess > 0:
        raise IdealHardwareError("distortion-free amplifier: capacity has no ceiling")
    return math.log2(1.0 + varpi * d.omega**2 / excess)
