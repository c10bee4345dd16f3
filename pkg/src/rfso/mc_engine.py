"""Deterministic, stream-parallel Monte Carlo of the end-to-end SNDR.

Samples are generated in fixed-size streams.  Stream ``i`` draws from a
Philox generator keyed by ``(seed, i)``, so results depend only on
``(config, seed, n)`` and not on how many worker threads process the
streams.  Per-stream sums are merged in stream order with compensated
summation.

Channel draws are stored in normalised form (unit-mean radio SNR and the
optical gain ``I_a I_l I_p`` before scaling), so one set of draws serves
every average SNR, amplifier and relaying mode of a sweep.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import ModulationScheme
from .fso_channel import sample_pointing, sample_turbulence
from .relay import LinkConfig, RelayMode, sndr_fixed_gain, sndr_variable_gain
from .rf_channel import sample_selected_snr

__all__ = [
    "STREAM_SIZE",
    "DEFAULT_SAMPLES",
    "Metric",
    "MetricEstimate",
    "ChannelDraws",
    "stream_rng",
    "draw_channels",
    "sndr_from_draws",
    "simulate_sndr",
    "estimate_from_draws",
    "estimate_metric",
]

STREAM_SIZE = 1 << 20
DEFAULT_SAMPLES = 10_000_000
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class Metric:
    """What to estimate: ``outage`` at a threshold, ``bep`` for a modulation, or ``capacity``."""

    kind: str
    gamma_th: float | None = None
    modulation: ModulationScheme | None = None

    @classmethod
    def outage(cls, gamma_th: float) -> "Metric":
        return cls("outage", gamma_th=gamma_th)

    @classmethod
    def bep(cls, modulation: ModulationScheme) -> "Metric":
        return cls("bep", modulation=modulation)

    @classmethod
    def capacity(cls) -> "Metric":
        return cls("capacity")

    def __post_init__(self):
        if self.kind == "outage" and self.gamma_th is None:
            raise ValueError("outage metric needs a threshold")
        if self.kind == "bep" and self.modulation is None:
            raise ValueError("bep metric needs a modulation")
        if self.kind not in ("outage", "bep", "capacity"):
            raise ValueError(f"unknown metric {self.kind!r}")

    def functional(self, sndr: np.ndarray, varpi: float) -> np.ndarray:
        if self.kind == "outage":
            return (sndr < self.gamma_th).astype(float)
        if self.kind == "bep":
            return np.asarray(self.modulation.conditional_bep(sndr))
        return np.log2(1.0 + varpi * sndr)

    def describe(self) -> str:
        if self.kind == "outage":
            return f"outage(gamma_th={self.gamma_th:g})"
        if self.kind == "bep":
            return f"bep({self.modulation.name})"
        return "capacity"


@dataclass(frozen=True)
class MetricEstimate:
    """Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    n_samples: int
    seed: int
    metric: str


@dataclass(frozen=True)
class ChannelDraws:
    """Normalised channel samples, split into streams.

    ``streams[i] = (g1_unit, gain)``: the selected relay's radio SNR at unit
    per-branch average SNR, and the optical gain ``I_a I_l I_p``.
    """

    seed: int
    n: int
    streams: tuple[tuple[np.ndarray, np.ndarray], ...]


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by ``(seed, stream)``."""
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))


def _stream_sizes(n: int) -> list[int]:
    full, rest = divmod(n, STREAM_SIZE)
    return [STREAM_SIZE] * full + ([rest] if rest else [])


def _run_streams(fn, count: int, threads: int):
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def draw_channels(cfg: LinkConfig, n: int, seed: int, threads: int = 1) -> ChannelDraws:
    """Draw ``n`` normalised channel samples for the link's radio and optical models."""
    if n < 1:
        raise ValueError("sample count must be positive")
    sizes = _stream_sizes(n)
    rf_unit = cfg.rf.with_snr(1.0)
    geom, dgg = cfg.fso.geometry, cfg.fso.dgg
    path_loss = cfg.fso.beam.path_loss

    def one(i: int):
        rng = stream_rng(seed, i)
        k = sizes[i]
        g1 = sample_selected_snr(rf_unit, rng, k)
        gain = sample_turbulence(dgg, rng, k) * sample_pointing(geom, rng, k) * path_loss
        return g1, gain

    return ChannelDraws(seed, n, tuple(_run_streams(one, len(sizes), threads)))


def sndr_from_draws(cfg: LinkConfig, g1_unit: np.ndarray, gain: np.ndarray) -> np.ndarray:
    """End-to-end SNDR for normalised draws scaled to the link's average SNRs."""
    g1 = cfg.rf.snr * g1_unit
    g2 = cfg.fso.mu_r * gain**cfg.r
    kappa = cfg.kappa
    if cfg.relay_mode is RelayMode.FG:
        return np.asarray(sndr_fixed_gain(g1, g2, kappa, cfg.mean_gamma1))
    return np.asarray(sndr_variable_gain(g1, g2, kappa))


def simulate_sndr(cfg: LinkConfig, n: int, seed: int, threads: int = 1) -> np.ndarray:
    """``n`` end-to-end SNDR samples (FG with the analytic ``E[gamma_1]``, VG per sample)."""
    draws = draw_channels(cfg, n, seed, threads)
    return np.concatenate([sndr_from_draws(cfg, g1, gain) for g1, gain in draws.streams])


def estimate_from_draws(cfg: LinkConfig, metric: Metric, draws: ChannelDraws,
                        threads: int = 1) -> MetricEstimate:
    """Sample mean and standard error of ``metric`` over existing draws."""
    varpi = cfg.varpi

    def one(i: int):
        g1, gain = draws.streams[i]
        vals = metric.functional(sndr_from_draws(cfg, g1, gain), varpi)
        m = float(np.mean(vals))
        return vals.size, m, float(np.sum((vals - m) ** 2))

    # Per-stream centred sums merged with the pooled-variance identity (no s2 - s1^2/n cancellation).
    parts = _run_streams(one, len(draws.streams), threads)
    n = draws.n
    mean = math.fsum(k * m for k, m, _ in parts) / n
    ss = math.fsum(q + k * (m - mean) ** 2 for k, m, q in parts)
    var = ss / (n - 1) if n > 1 else 0.0
    return MetricEstimate(mean, math.sqrt(var / n), n, draws.seed, metric.describe())


def estimate_metric(cfg: LinkConfig, metric: Metric, n: int = DEFAULT_SAMPLES,
                    seed: int = 0, threads: int = 1) -> MetricEstimate:
    """Estimate ``metric`` from ``n`` fresh samples.

    Outage is the fraction below threshold, BEP averages the conditional
    error probability over SNDR samples, capacity averages
    ``log2(1 + varpi SNDR)``.
    """
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    return estimate_from_draws(cfg, metric, draw_channels(cfg, n, seed, threads), threads)
