"""Run configuration: an INI-style key = value file plus command-line overrides.

Example::

    [potential]
    family = Exponential
    U = 30
    [trace]
    start = A6
    alpha_span = 0:12.566370614359172
    [output]
    format = csv
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .potentials import DEFAULT_MASS, DEFAULT_R0, Family, PotentialSpec
from .tracer import PoleLabel, TraceConfig

FOUR_PI = 4.0 * math.pi


def parse_interval(text: str) -> tuple[float, float]:
    """'a:b' -> (a, b); 'pi' multiples are accepted, e.g. '0:4pi'."""
    try:
        a, b = text.split(":")
        lo, hi = _number(a), _number(b)
    except ValueError as exc:
        raise ConfigError(f"bad interval {text!r}, expected A:B") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ConfigError(f"interval {text!r} must be finite with A < B")
    return lo, hi


def _number(text: str) -> float:
    t = text.strip().lower()
    if t.endswith("pi"):
        head = t[:-2].strip().rstrip("*")
        return (float(head) if head not in ("", "+") else (-1.0 if head == "-" else 1.0)) * math.pi
    return float(t)


@dataclass
class RunConfig:
    spec: PotentialSpec
    alpha_span: tuple[float, float] = (0.0, FOUR_PI)
    u_range: tuple[float, float] | None = None
    n_max: int = 4
    starts: list[PoleLabel] = field(default_factory=list)
    sweep_step: float = 0.25
    event_grid: float = 1.0
    trace: TraceConfig = field(default_factory=TraceConfig)
    format: str = "csv"
    out_dir: Path = Path("out")
    svg: Path | None = None

    def validate(self) -> "RunConfig":
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.n_max < 1:
            raise ConfigError("nmax must be at least 1")
        if self.sweep_step <= 0 or self.event_grid <= 0:
            raise ConfigError("steps must be positive")
        return self


def _get(cp, section, key, default=None):
    if cp.has_section(section) and cp.has_option(section, key):
        return cp.get(section, key).strip()
    return default


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep "U" as written
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {p} not found")
        try:
            cp.read(p)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}
    try:
        fam = Family.parse(ov.get("family") or _get(cp, "potential", "family", "Exponential"))
        U = float(ov.get("U") or _get(cp, "potential", "U", "1.0"))
        spec = PotentialSpec(
            fam,
            U,
            r0=float(_get(cp, "potential", "r0", repr(DEFAULT_R0))),
            c=float(_get(cp, "potential", "c", "-1.0" if fam is Family.HULTHEN else "0.0")),
            l=int(_get(cp, "potential", "l", "0")),
            m=float(_get(cp, "potential", "m", repr(DEFAULT_MASS))),
        )
        tol_residual = float(ov.get("tol_residual") or _get(cp, "tolerances", "tol_residual", "1e-10"))
        tol_close = float(ov.get("tol_close") or _get(cp, "tolerances", "tol_close", "1e-6"))
        cutoff = float(_get(cp, "tolerances", "cutoff", "600"))
        if tol_residual <= 0 or tol_close <= 0 or cutoff <= 0:
            raise ConfigError("tolerances must be positive")
        trace_cfg = TraceConfig(tol_residual=tol_residual, tol_close=tol_close, cutoff=cutoff)
        span_txt = ov.get("alpha_span") or _get(cp, "trace", "alpha_span")
        alpha_span = parse_interval(span_txt) if span_txt else (0.0, FOUR_PI)
        u_txt = ov.get("u_range") or _get(cp, "sweep", "u_range") or _get(cp, "events", "u_range")
        u_range = parse_interval(u_txt) if u_txt else None
        n_max = int(ov.get("n_max") or _get(cp, "trace", "n_max") or _get(cp, "events", "n_max") or 4)
        starts_txt = _get(cp, "trace", "start", "")
        starts = [PoleLabel.parse(s) for s in starts_txt.replace(",", " ").split()]
        cfg = RunConfig(
            spec=spec,
            alpha_span=alpha_span,
            u_range=u_range,
            n_max=n_max,
            starts=starts,
            sweep_step=float(_get(cp, "sweep", "step", "0.25")),
            event_grid=float(_get(cp, "events", "grid", "1.0")),
            trace=trace_cfg,
            format=ov.get("format") or _get(cp, "output", "format", "csv"),
            out_dir=Path(ov.get("out") or _get(cp, "output", "out_dir", "out")),
            svg=Path(s) if (s := ov.get("svg") or _get(cp, "output", "svg")) else None,
        )
    except ConfigError:
        raise
    except (ValueError, IndexError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
