"""Two-hop amplify-and-forward composition of the radio and optical hops.

The relay amplifies the received radio signal with either a fixed gain
(FG, set from the average first-hop channel power) or a variable gain
(VG, set from the instantaneous channel power) before a nonlinear power
amplifier.  The amplifier's distortion enters the end-to-end
signal-to-noise-plus-distortion ratio (SNDR) through the factor ``kappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from .fso_channel import UnifiedSnrParams
from .hpa import HpaDerived, HpaModel, derive_hpa, kappa_factor
from .rf_channel import PrsRfParams, prs_moment

if TYPE_CHECKING:
    from .analysis import ModulationScheme

__all__ = [
    "RelayMode",
    "LinkConfig",
    "relay_gain",
    "link_kappa",
    "sndr_fixed_gain",
    "sndr_variable_gain",
]


class RelayMode(str, Enum):
    FG = "FG"
    VG = "VG"


@dataclass(frozen=True)
class LinkConfig:
    """Complete end-to-end scenario.

    Attributes
    ----------
    rf : PrsRfParams
        Radio hop; ``rf.snr`` is the per-branch average SNR ``P1 / sigma0_2``
        (unit average channel power per branch).
    fso : UnifiedSnrParams
        Optical hop and detection mode.
    hpa : HpaModel
        Relay power amplifier.
    relay_mode : RelayMode
    modulation : ModulationScheme, optional
        Needed only by error-probability metrics.
    noise_power : float
        Noise power ``sigma0_2`` at the relay input.
    """

    rf: PrsRfParams
    fso: UnifiedSnrParams
    hpa: HpaModel
    relay_mode: RelayMode = RelayMode.FG
    modulation: "ModulationScheme | None" = None
    noise_power: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "relay_mode", RelayMode(self.relay_mode))
        if not self.noise_power > 0:
            raise ValueError("noise power must be positive")

    @property
    def r(self) -> int:
        return self.fso.r

    @property
    def tx_power(self) -> float:
        """Source transmit power ``P1``."""
        return self.rf.snr * self.noise_power

    @property
    def mean_gamma1(self) -> float:
        """``E[gamma_1]`` of the selected relay's first hop."""
        return prs_moment(1.0, self.rf)

    @property
    def hpa_derived(self) -> HpaDerived:
        return derive_hpa(self.hpa)

    @property
    def kappa(self) -> float:
        return link_kappa(self)

    @property
    def fg_offset(self) -> float:
        """``E[gamma_1] + kappa``, the constant in the fixed-gain SNDR denominator."""
        return self.mean_gamma1 + self.kappa

    @property
    def varpi(self) -> float:
        """Capacity scaling: 1 for heterodyne, ``e / (2 pi)`` for IM/DD."""
        return 1.0 if self.r == 1 else math.e / (2.0 * math.pi)

    def with_snr(self, mu_r: float, tie_rf: bool = True) -> "LinkConfig":
        """Copy with optical SNR ``mu_r``; the radio SNR follows unless ``tie_rf`` is False."""
        rf = self.rf.with_snr(mu_r) if tie_rf else self.rf
        return replace(self, rf=rf, fso=self.fso.with_mu(mu_r))

    def with_hpa(self, hpa: HpaModel) -> "LinkConfig":
        return replace(self, hpa=hpa)

    def with_mode(self, mode) -> "LinkConfig":
        return replace(self, relay_mode=RelayMode(mode))


def relay_gain(cfg: LinkConfig, h1_sq=None):
    """Amplifier gain ``G = sqrt(sigma_r2 / (|h1|^2 P1 + sigma0_2))``.

    Parameters
    ----------
    cfg : LinkConfig
    h1_sq : float or array_like, optional
        Instantaneous first-hop channel power (VG).  Ignored in FG mode,
        which always uses the average power of the selected relay.
    """
    if cfg.relay_mode is RelayMode.FG or h1_sq is None:
        power = cfg.mean_gamma1 * cfg.noise_power / cfg.tx_power
    else:
        power = np.asarray(h1_sq, dtype=float)
    out = np.sqrt(cfg.hpa.sigma_r2 / (power * cfg.tx_power + cfg.noise_power))
    return out if np.ndim(out) else float(out)


def link_kappa(cfg: LinkConfig) -> float:
    """Nonlinearity factor of the link, using the average (fixed) gain in both modes."""
    d = cfg.hpa_derived
    if d.sigma_d2 <= 0.0:
        return 1.0
    gain = relay_gain(cfg.with_mode(RelayMode.FG))
    return kappa_factor(d, gain, cfg.noise_power)


def sndr_fixed_gain(g1, g2, kappa: float, mean_g1: float):
    """Fixed-gain SNDR ``g1 g2 / (kappa g2 + E[g1] + kappa)``."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    with np.errstate(invalid="ignore"):
        out = g1 * g2 / (kappa * g2 + mean_g1 + kappa)
    # Infinite optical SNR leaves g1 / kappa.
    out = np.where(np.isinf(g2), g1 / kappa, out)
    return out if out.ndim else float(out)


def sndr_variable_gain(g1, g2, kappa: float, approx: bool = False):
    """Variable-gain SNDR.

    Exact: ``g1 g2 / (kappa g2 + g1 + kappa)``.
    Approximation: ``min(g1, g2 / ((kappa - 1) g2 + 1))``, which is not a
    pointwise bound when ``kappa > 1``.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    if approx:
        out = np.minimum(g1, g2 / ((kappa - 1.0) * g2 + 1.0))
    else:
        out = g1 * g2 / (kappa * g2 + g1 + kappa)
    return out if out.ndim else float(out)
