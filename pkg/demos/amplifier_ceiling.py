"""How amplifier back-off trades distortion for efficiency, and the capacity ceiling it imposes."""

import numpy as np

from rfso.hpa import HpaModel, capacity_ceiling, derive_hpa, kappa_factor

print("kind  IBO[dB]   Omega     sigma_d2     eta      kappa    ceiling[bit/s/Hz]")
for kind in ("SEL", "TWTA"):
    for ibo in (0.0, 3.0, 5.0, 10.0, 20.0):
        d = derive_hpa(HpaModel.from_ibo_db(kind, ibo))
        print(f"{kind:5s} {ibo:6.1f}  {d.omega:.6f}  {d.sigma_d2:.4e}  {d.eta_clip:.5f}  "
              f"{kappa_factor(d, 1.0, 1.0):.5f}  {capacity_ceiling(d):8.4f}")

# Backing off shrinks distortion much faster than it loses output power,
# so the ceiling keeps rising while the efficiency proxy eta saturates at 1.
ibo = np.linspace(0.0, 12.0, 7)
ceil = [capacity_ceiling(derive_hpa(HpaModel.from_ibo_db("SEL", float(v)))) for v in ibo]
print("\nSEL ceiling vs back-off:", ", ".join(f"{v:.0f} dB -> {c:.2f}" for v, c in zip(ibo, ceil)))
