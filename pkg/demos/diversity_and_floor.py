"""Ideal hardware gives a power-law outage decay; a nonlinear amplifier gives an outage floor."""

import math

from rfso.analysis import ModulationScheme, diversity_order, outage_fg
from rfso.fso_channel import UnifiedSnrParams, default_geometry, turbulence_preset
from rfso.hpa import HpaModel
from rfso.relay import LinkConfig
from rfso.rf_channel import PrsRfParams

GAMMA_TH = 10 ** 0.5


def link(mu_db: float, hpa: tuple, m: int = 4) -> LinkConfig:
    mu = 10 ** (mu_db / 10)
    u = UnifiedSnrParams(default_geometry(), turbulence_preset("moderate"), 1, mu)
    return LinkConfig(PrsRfParams(4, m, 0.9, mu), u, HpaModel.from_ibo_db(*hpa), "FG",
                      ModulationScheme.bpsk())


print(" mu[dB]   ideal        SEL 5 dB     SEL 10 dB")
for mu_db in range(20, 101, 20):
    row = [outage_fg(GAMMA_TH, link(mu_db, h)) for h in (("IDEAL", 0.0), ("SEL", 5.0), ("SEL", 10.0))]
    print(f"{mu_db:6d}  " + "  ".join(f"{p:.4e}" for p in row))

# The optical exponent here (about 1.37) is close to the radio one (1), so the local
# slope approaches the diversity order only slowly.
ideal = link(60.0, ("IDEAL", 0.0))
for a, b in ((40.0, 60.0), (60.0, 80.0), (80.0, 100.0)):
    pa, pb = (outage_fg(GAMMA_TH, link(x, ("IDEAL", 0.0))) for x in (a, b))
    print(f"ideal slope {a:.0f}->{b:.0f} dB: {math.log10(pa / pb) / ((b - a) / 10):.3f} decades/decade")
print(f"predicted diversity order {diversity_order(ideal):.3f}")
