"""Command-line sweeps: configuration ingestion, figure presets, CSV/JSON output.

A configuration is a flat list of dotted ``key = value`` lines (``rf.N = 4``,
``hpa.ibo_db = 5``).  Keys ending in ``_db`` are given in decibels and are
converted here, nowhere else.  The JSON sidecar written next to every CSV
holds the fully resolved key set and can be passed back through
``--config`` to reproduce the CSV exactly.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .analysis import (
    ModulationScheme,
    bep_fg,
    bep_vg_numerical,
    capacity_ceiling,
    capacity_fg,
    capacity_vg_approx,
    capacity_vg_upper,
    outage_fg,
    outage_fg_asymptotic,
    outage_vg_upper,
)
from .fso_channel import DggParams, FsoGeometry, UnifiedSnrParams, turbulence_preset
from .hpa import HpaKind, HpaModel
from .mc_engine import ChannelDraws, Metric, draw_channels, estimate_from_draws
from .relay import LinkConfig, RelayMode
from .rf_channel import PrsRfParams, jakes_correlation
from .specfun import SpecialFunctionError

__all__ = [
    "ConfigError",
    "SweepSpec",
    "DEFAULTS",
    "FIGURE_PRESETS",
    "SWEEP_VARIABLES",
    "OUTPUTS",
    "load_config",
    "resolve",
    "build_link",
    "sweep_from_params",
    "run_sweep",
    "format_value",
    "main",
]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


class NumericalFailure(RuntimeError):
    """A closed form or estimator failed; the message names the operation and point."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

DEFAULTS: dict[str, Any] = {
    "relay.mode": "FG",
    "rf.N": 4,
    "rf.m": 4,
    "rf.rho": 0.9,
    "fso.turbulence": "moderate",
    "fso.r": 2,
    "fso.L": 1000.0,
    "fso.wavelength": 1550e-9,
    "fso.a": 0.05,
    "fso.w0": 0.005,
    "fso.F0": -10.0,
    "fso.sigma_s": 0.0375,
    "fso.cn2": 5e-14,
    "fso.sigma_atten": 0.0,
    "hpa.kind": "SEL",
    "hpa.ibo_db": 5.0,
    "modulation.name": "BPSK",
    "link.mu_r_db": 30.0,
    "metric.gamma_th_db": 5.0,
    "sweep.variable": "mu_r_db",
    "sweep.start": 0.0,
    "sweep.stop": 60.0,
    "sweep.step": 5.0,
    "sweep.outputs": "outage_closed,outage_mc",
    "mc.seed": 1,
    "mc.samples": 10_000_000,
    "mc.threads": 1,
    "output.name": "sweep",
}

# Optional keys with no default: explicit turbulence shapes, Jakes inputs, xi override.
OPTIONAL_KEYS = {
    "fso.alpha1", "fso.m1", "fso.alpha2", "fso.m2", "fso.xi",
    "rf.fd_hz", "rf.Td_s",
}

_INT_KEYS = {"rf.N", "rf.m", "fso.r", "mc.seed", "mc.samples", "mc.threads"}
_STR_KEYS = {
    "relay.mode", "fso.turbulence", "hpa.kind", "modulation.name",
    "sweep.variable", "sweep.outputs", "output.name",
}

SWEEP_VARIABLES = {
    "mu_r_db": "link.mu_r_db",
    "ibo_db": "hpa.ibo_db",
    "rho": "rf.rho",
    "gamma_th_db": "metric.gamma_th_db",
    "xi": "fso.xi",
    "sigma_atten": "fso.sigma_atten",
}


def _coerce(key: str, value: Any) -> Any:
    if key in _STR_KEYS:
        return str(value).strip()
    try:
        if key in _INT_KEYS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(f"{key}: expected {kind}, got {value!r}") from None


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a dotted key-value file, or the ``config`` block of a JSON sidecar."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from None
        return dict(data.get("config", data))
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None,
    )
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return dict(parser["config"])


def resolve(raw: dict[str, Any], overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """Merge ``raw`` and ``overrides`` onto the defaults and coerce types."""
    params = dict(DEFAULTS)
    for source in (raw, overrides or {}):
        for key, value in source.items():
            if key not in DEFAULTS and key not in OPTIONAL_KEYS:
                raise ConfigError(f"{key}: unknown configuration key")
            params[key] = _coerce(key, value)
    _resolve_rho(params)
    return params


def _resolve_rho(params: dict[str, Any]) -> None:
    has_fd, has_td = "rf.fd_hz" in params, "rf.Td_s" in params
    if has_fd != has_td:
        raise ConfigError("rf.fd_hz: Doppler frequency and rf.Td_s must be given together")
    if not has_fd:
        return
    try:
        rho = jakes_correlation(params["rf.fd_hz"], params["rf.Td_s"])
    except ValueError as exc:
        raise ConfigError(f"rf.fd_hz: {exc}") from None
    if rho < 0:
        warnings.warn(f"Jakes correlation {rho:.4g} is negative; clamped to 0", stacklevel=2)
        rho = 0.0
    params["rf.rho"] = rho
    del params["rf.fd_hz"], params["rf.Td_s"]


def _db(x: float) -> float:
    return 10.0 ** (x / 10.0)


def build_link(params: dict[str, Any]) -> LinkConfig:
    """Construct the :class:`LinkConfig` described by resolved parameters."""
    mu = _db(params["link.mu_r_db"])
    try:
        rf = PrsRfParams(params["rf.N"], params["rf.m"], params["rf.rho"], mu)
    except ValueError as exc:
        raise ConfigError(f"rf: {exc}") from None
    try:
        geometry = FsoGeometry(
            L=params["fso.L"], wavelength=params["fso.wavelength"], a=params["fso.a"],
            w0=params["fso.w0"], F0=params["fso.F0"], sigma_s=params["fso.sigma_s"],
            cn2=params["fso.cn2"], sigma_atten=params["fso.sigma_atten"],
        )
        shapes = [params.get(f"fso.{k}") for k in ("alpha1", "m1", "alpha2", "m2")]
        if any(s is not None for s in shapes):
            if any(s is None for s in shapes):
                raise ValueError("alpha1, m1, alpha2 and m2 must be given together")
            dgg = DggParams.unit_mean(*shapes)
        else:
            dgg = turbulence_preset(params["fso.turbulence"])
        fso = UnifiedSnrParams(geometry, dgg, params["fso.r"], mu)
        if "fso.xi" in params:
            if not params["fso.xi"] > 0:
                raise ValueError("xi must be positive")
            fso = fso.with_xi(params["fso.xi"])
    except ValueError as exc:
        raise ConfigError(f"fso: {exc}") from None
    try:
        hpa = HpaModel.from_ibo_db(params["hpa.kind"].upper(), params["hpa.ibo_db"])
    except ValueError as exc:
        raise ConfigError(f"hpa: {exc}") from None
    try:
        mode = RelayMode(params["relay.mode"].upper())
    except ValueError:
        raise ConfigError(f"relay.mode: expected FG or VG, got {params['relay.mode']!r}") from None
    try:
        mod = ModulationScheme.from_name(params["modulation.name"])
    except ValueError as exc:
        raise ConfigError(f"modulation.name: {exc}") from None
    return LinkConfig(rf, fso, hpa, mode, mod)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass
class _Context:
    cfg: LinkConfig
    gamma_th: float
    draws: Callable[[], ChannelDraws]


def _mc(metric: Callable[[_Context], Metric]):
    def fn(ctx: _Context):
        est = estimate_from_draws(ctx.cfg, metric(ctx), ctx.draws())
        return est.value, est.std_error

    return fn


def _by_mode(fg, vg):
    def fn(ctx: _Context):
        return (fg if ctx.cfg.relay_mode is RelayMode.FG else vg)(ctx)

    return fn


# name -> (evaluator, allowed modes, has standard error)
OUTPUTS: dict[str, tuple[Callable[[_Context], Any], set, bool]] = {
    "outage_closed": (
        _by_mode(lambda c: outage_fg(c.gamma_th, c.cfg), lambda c: outage_vg_upper(c.gamma_th, c.cfg)),
        {RelayMode.FG, RelayMode.VG}, False,
    ),
    "outage_asymptotic": (lambda c: outage_fg_asymptotic(c.gamma_th, c.cfg), {RelayMode.FG}, False),
    "outage_mc": (_mc(lambda c: Metric.outage(c.gamma_th)), {RelayMode.FG, RelayMode.VG}, True),
    "bep_closed": (_by_mode(lambda c: bep_fg(c.cfg), lambda c: bep_vg_numerical(c.cfg)),
                   {RelayMode.FG, RelayMode.VG}, False),
    "bep_mc": (_mc(lambda c: Metric.bep(c.cfg.modulation)), {RelayMode.FG, RelayMode.VG}, True),
    "capacity_closed": (lambda c: capacity_fg(c.cfg), {RelayMode.FG}, False),
    "capacity_mc": (_mc(lambda c: Metric.capacity()), {RelayMode.FG, RelayMode.VG}, True),
    "capacity_upper": (lambda c: capacity_vg_upper(c.cfg), {RelayMode.VG}, False),
    "capacity_approx": (lambda c: capacity_vg_approx(c.cfg), {RelayMode.VG}, False),
    "ceiling": (lambda c: capacity_ceiling(c.cfg.hpa_derived, c.cfg.varpi), {RelayMode.FG, RelayMode.VG}, False),
}


@dataclass
class SweepSpec:
    """One swept curve: base parameters, swept variable and range, requested outputs."""

    params: dict[str, Any]
    variable: str
    start: float
    stop: float
    step: float
    outputs: list[str]
    name: str = "sweep"
    _draw_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(
                f"sweep.variable: {self.variable!r} is not one of {sorted(SWEEP_VARIABLES)}"
            )
        if self.step == 0 or (self.stop - self.start) * self.step < 0:
            raise ConfigError("sweep.step: range is empty")
        if not self.outputs:
            raise ConfigError("sweep.outputs: no outputs requested")
        try:
            mode = RelayMode(str(self.params["relay.mode"]).upper())
        except ValueError:
            raise ConfigError(f"relay.mode: expected FG or VG, got {self.params['relay.mode']!r}") from None
        for name in self.outputs:
            if name not in OUTPUTS:
                raise ConfigError(f"sweep.outputs: unknown output {name!r}")
            if mode not in OUTPUTS[name][1]:
                raise ConfigError(f"sweep.outputs: {name} is not available for relay.mode = {mode.value}")
        if "ceiling" in self.outputs and str(self.params["hpa.kind"]).upper() == HpaKind.IDEAL.value:
            raise ConfigError("sweep.outputs: ceiling needs a distorting amplifier (hpa.kind = IDEAL)")

    @property
    def xs(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(count), 12)

    @property
    def columns(self) -> list[str]:
        cols = [self.variable]
        for name in self.outputs:
            cols.append(name)
            if OUTPUTS[name][2]:
                cols.append(name + "_se")
        return cols

    def point(self, x: float) -> dict[str, Any]:
        params = dict(self.params)
        params[SWEEP_VARIABLES[self.variable]] = float(x)
        return params

    def draws_for(self, cfg: LinkConfig) -> ChannelDraws:
        """Channel draws shared by every point with the same channel statistics."""
        n, seed, threads = self.params["mc.samples"], self.params["mc.seed"], self.params["mc.threads"]
        key = (cfg.rf.N, cfg.rf.m, cfg.rf.rho, cfg.fso.geometry, cfg.fso.dgg, n, seed)
        if key not in self._draw_cache:
            self._draw_cache.clear()
            self._draw_cache[key] = draw_channels(cfg, n, seed, threads)
        return self._draw_cache[key]


def sweep_from_params(params: dict[str, Any]) -> SweepSpec:
    outputs = [s.strip() for s in str(params["sweep.outputs"]).split(",") if s.strip()]
    if params["mc.samples"] < 10_000:
        raise ConfigError("mc.samples: at least 10000 samples are required")
    if not 0 <= params["mc.seed"] < 1 << 64:
        raise ConfigError("mc.seed: must be an unsigned 64-bit integer")
    if params["mc.threads"] < 1:
        raise ConfigError("mc.threads: must be at least 1")
    spec = SweepSpec(params, params["sweep.variable"], params["sweep.start"], params["sweep.stop"],
                     params["sweep.step"], outputs, params["output.name"])
    build_link(spec.point(spec.xs[0]))  # validate before any heavy work
    return spec


def run_sweep(spec: SweepSpec) -> list[list[float]]:
    """Evaluate every requested output at every sweep point."""
    rows = []
    for x in spec.xs:
        params = spec.point(x)
        cfg = build_link(params)
        ctx = _Context(cfg, _db(params["metric.gamma_th_db"]), lambda cfg=cfg: spec.draws_for(cfg))
        row = [float(x)]
        for name in spec.outputs:
            try:
                value = OUTPUTS[name][0](ctx)
            except (SpecialFunctionError, ArithmeticError, np.linalg.LinAlgError) as exc:
                raise NumericalFailure(
                    f"{name} failed at {spec.variable}={x:g} "
                    f"(mode={cfg.relay_mode.value}, hpa={cfg.hpa.kind.value}, r={cfg.r}): {exc}"
                ) from exc
            row.extend(value if isinstance(value, tuple) else (value,))
        rows.append(row)
    return rows


def format_value(v: float) -> str:
    """Plain decimal, switching to scientific notation below 1e-3 in magnitude."""
    if v == 0.0 or not math.isfinite(v):
        return repr(float(v))
    if abs(v) < 1e-3:
        return f"{v:.6e}"
    return f"{v:.10g}"


def write_outputs(spec: SweepSpec, rows: list[list[float]], out_dir: Path) -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{spec.name}.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(spec.columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    sidecar = {
        "config": spec.params,
        "seed": spec.params["mc.seed"],
        "version": __version__,
        "columns": spec.columns,
    }
    json_path = out_dir / f"{spec.name}.json"
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path, json_path


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

_SNR_SWEEP = {"sweep.variable": "mu_r_db", "sweep.start": 0.0, "sweep.stop": 60.0, "sweep.step": 5.0}


def _fig3():
    for rho in (0.5, 1.0):
        for gth in (0.0, 5.0, 10.0):
            yield f"fig3_rho{rho:g}_gth{gth:g}dB", {
                "relay.mode": "FG", "hpa.kind": "SEL", "fso.r": 2, "rf.rho": rho,
                "metric.gamma_th_db": gth, "sweep.outputs": "outage_closed,outage_mc",
            }


def _fig4():
    for turb in ("moderate", "strong"):
        for r, det in ((1, "het"), (2, "imdd")):
            yield f"fig4_{turb}_{det}", {
                "relay.mode": "VG", "hpa.kind": "TWTA", "hpa.ibo_db": 10.0, "fso.turbulence": turb,
                "fso.r": r, "sweep.outputs": "outage_closed,outage_mc",
            }


def _fig5():
    for xi in (0.4, 0.7, 0.9, 1.2):
        yield f"fig5_xi{xi:g}", {
            "relay.mode": "FG", "hpa.kind": "TWTA", "hpa.ibo_db": 10.0, "fso.r": 2, "fso.xi": xi,
            "sweep.outputs": "outage_closed,outage_mc",
        }


def _fig6():
    # Clear air, haze and light fog attenuation coefficients in 1/m.
    for label, att in (("clear", 1e-4), ("haze", 1e-3), ("fog", 3e-3)):
        yield f"fig6_{label}", {
            "relay.mode": "FG", "hpa.kind": "SEL", "fso.r": 2, "fso.sigma_atten": att,
            "sweep.outputs": "outage_closed,outage_mc",
        }


def _fig7():
    for mod in ("BPSK", "4-PSK", "16-QAM", "64-QAM"):
        yield f"fig7_{mod.lower().replace('-', '')}", {
            "relay.mode": "FG", "hpa.kind": "SEL", "fso.r": 1, "modulation.name": mod,
            "sweep.outputs": "bep_closed,bep_mc",
        }


def _fig8():
    for kind in ("SEL", "TWTA"):
        yield f"fig8_{kind.lower()}", {
            "relay.mode": "FG", "hpa.kind": kind, "hpa.ibo_db": 10.0, "fso.r": 1,
            "sweep.outputs": "capacity_mc,capacity_closed,ceiling",
        }


def _fig9():
    for ibo in (0.0, 3.0, 5.0, 30.0):
        yield f"fig9_ibo{ibo:g}dB", {
            "relay.mode": "VG", "hpa.kind": "SEL", "hpa.ibo_db": ibo, "fso.r": 1,
            "sweep.outputs": "capacity_mc,capacity_approx,capacity_upper,ceiling",
        }


def _fig10():
    for ibo in (0.0, 4.0, 8.0):
        yield f"fig10_ibo{ibo:g}dB", {
            "relay.mode": "VG", "hpa.kind": "SEL", "hpa.ibo_db": ibo, "fso.r": 2,
            "sweep.stop": 80.0, "sweep.outputs": "outage_closed,outage_mc",
        }


FIGURE_PRESETS: dict[str, Callable[[], Any]] = {
    "fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "fig6": _fig6,
    "fig7": _fig7, "fig8": _fig8, "fig9": _fig9, "fig10": _fig10,
}


def figure_sweeps(name: str, base: dict[str, Any], overrides: dict[str, Any]) -> list[SweepSpec]:
    specs = []
    for stem, preset in FIGURE_PRESETS[name]():
        merged = {**_SNR_SWEEP, **preset, "output.name": stem}
        params = resolve({**base, **merged}, overrides)
        specs.append(sweep_from_params(params))
    return specs


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rfso",
        description="Sweep outage, error probability and capacity of mixed radio/optical relaying.",
    )
    p.add_argument("--config", type=Path, help="dotted key-value file or a JSON sidecar")
    p.add_argument("--figure", choices=sorted(FIGURE_PRESETS, key=lambda s: int(s[3:])),
                   help="run a built-in figure preset")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    p.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count")
    p.add_argument("--threads", type=int, help="worker threads for Monte Carlo streams")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    overrides = {k: v for k, v in (("mc.seed", args.seed), ("mc.samples", args.samples),
                                   ("mc.threads", args.threads)) if v is not None}
    try:
        base = load_config(args.config) if args.config else {}
        if args.figure:
            specs = figure_sweeps(args.figure, base, overrides)
        else:
            specs = [sweep_from_params(resolve(base, overrides))]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for spec in specs:
        try:
            rows = run_sweep(spec)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except NumericalFailure as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        csv_path, _ = write_outputs(spec, rows, args.out)
        print(csv_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
