"""Performance analysis of mixed radio/optical dual-hop relaying with amplifier nonlinearities.

Modules
-------
specfun      Meijer-G and Fox-H evaluation (univariate and bivariate).
rf_channel   Radio hop under partial relay selection with outdated feedback.
fso_channel  Optical hop: turbulence, pointing error and path loss.
hpa          Power-amplifier nonlinearities (soft limiter, travelling-wave tube).
relay        End-to-end SNDR for fixed- and variable-gain relaying.
analysis     Closed-form outage, error probability, capacity and asymptotics.
mc_engine    Reproducible parallel Monte Carlo oracle.
cli          Configuration-driven sweeps and figure presets.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0+local"

__all__ = ["__version__"]
