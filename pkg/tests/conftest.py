"""Shared fixtures, link builders and the acceptance-criteria report."""

from __future__ import annotations

import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rfso.analysis import ModulationScheme  # noqa: E402
from rfso.fso_channel import UnifiedSnrParams, default_geometry, turbulence_preset  # noqa: E402
from rfso.hpa import HpaModel  # noqa: E402
from rfso.relay import LinkConfig  # noqa: E402
from rfso.rf_channel import PrsRfParams  # noqa: E402

# Reference link used across the suite: four relays, rank-3 selection, rho = 0.8.
REF_N, REF_M, REF_RHO = 4, 3, 0.8
GAMMA_TH = 2.0


def make_cfg(preset: str = "moderate", r: int = 1, mu_db: float = 20.0,
             hpa: tuple = ("SEL", 5.0), mode: str = "FG", xi: float | None = None,
             mod: ModulationScheme | None = None, N: int = REF_N, m: int = REF_M,
             rho: float = REF_RHO, sigma_atten: float = 0.0) -> LinkConfig:
    """Link with both hops at average SNR ``mu_db``."""
    mu = 10.0 ** (mu_db / 10.0)
    u = UnifiedSnrParams(default_geometry(sigma_atten=sigma_atten), turbulence_preset(preset), r, mu)
    if xi is not None:
        u = u.with_xi(xi)
    if mod is None:
        mod = ModulationScheme.bpsk() if r == 1 else ModulationScheme.ook()
    return LinkConfig(PrsRfParams(N, m, rho, mu), u, HpaModel.from_ibo_db(*hpa), mode, mod)


@pytest.fixture
def cfg_factory():
    return make_cfg


# ---------------------------------------------------------------------------
# acceptance report: tests record (criterion, ok, detail); the summary prints one line each
# ---------------------------------------------------------------------------

ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)
CRITERIA = {
    1: "SEL capacity ceilings at IBO 0/3/5 dB",
    2: "TWTA capacity ceiling at IBO 10 dB",
    3: "closed form vs Monte Carlo grid",
    4: "hardware outage floor",
    5: "ideal diversity slope",
    6: "ordering properties",
    7: "special-function identities",
    8: "amplifier distortion identity",
    9: "sampler distribution checks",
}


def record(criterion: int, name: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion].append((name, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, title in CRITERIA.items():
        entries = ACCEPTANCE.get(k)
        if not entries:
            tr.write_line(f"criterion {k} ({title}): NOT RUN")
            continue
        ok = all(e[1] for e in entries)
        failed = [e for e in entries if not e[1]]
        detail = "; ".join(f"{n}: {d}" for n, _, d in (failed or entries) if d)
        tr.write_line(f"criterion {k} ({title}): {'PASS' if ok else 'FAIL'}" + (f" -- {detail}" if detail else ""))
