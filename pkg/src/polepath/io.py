"""Flat-file output: CSV and JSON for trajectories, sweeps and events, plus a bare SVG plot.

Floats are written with 17 significant digits so that a parse/emit cycle is
exact. Momenta are in MeV, phases in radians.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

from .potentials import Family, PotentialSpec, fixed_zero
from .tracer import EventRecord, Periodicity, PhasePoint, PoleLabel, Trajectory


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def spec_to_dict(spec: PotentialSpec) -> dict:
    return {"family": spec.family.value, "U": spec.U, "r0": spec.r0, "c": spec.c, "l": spec.l, "m": spec.m}


def spec_from_dict(d: dict) -> PotentialSpec:
    return PotentialSpec(Family.parse(d["family"]), float(d["U"]), float(d["r0"]), float(d["c"]), int(d["l"]), float(d["m"]))


# -- trajectories ------------------------------------------------------------------


def trajectory_to_csv(traj: Trajectory) -> str:
    spec = traj.spec
    head = " ".join(f"{k}={fmt(v) if isinstance(v, float) else v}" for k, v in spec_to_dict(spec).items())
    labels = ";".join(f"{fmt(a)}:{lab}" for a, lab in sorted(traj.labels.items()))
    windings = ";".join(f"{n}:{w}" for n, w in sorted(traj.windings.items()))
    lines = [
        f"# {head} units=MeV",
        f"# start_label={traj.start_label or ''} periodicity={traj.periodicity.value} truncated={int(traj.truncated)}",
        f"# labels={labels}",
        f"# windings={windings}",
        "alpha,re_k,im_k",
    ]
    lines += [f"{fmt(p.alpha)},{fmt(p.k.real)},{fmt(p.k.imag)}" for p in traj.points]
    return "\n".join(lines) + "\n"


def _header_fields(line: str) -> dict[str, str]:
    out = {}
    for tok in line.lstrip("#").split():
        key, _, val = tok.partition("=")
        out[key] = val
    return out


def trajectory_from_csv(text: str) -> Trajectory:
    lines = text.splitlines()
    h1 = _header_fields(lines[0])
    h2 = _header_fields(lines[1])
    spec = spec_from_dict(h1)
    lab_txt = lines[2].split("=", 1)[1].strip()
    win_txt = lines[3].split("=", 1)[1].strip()
    labels = {}
    for item in filter(None, lab_txt.split(";")):
        a, _, lab = item.rpartition(":")
        labels[float(a)] = PoleLabel.parse(lab)
    windings = {}
    for item in filter(None, win_txt.split(";")):
        n, _, w = item.partition(":")
        windings[int(n)] = int(w)
    points = []
    for row in lines[5:]:
        if not row.strip():
            continue
        a, re, im = row.split(",")
        points.append(PhasePoint(float(a), complex(float(re), float(im))))
    start = PoleLabel.parse(h2["start_label"]) if h2.get("start_label") else None
    return Trajectory(
        spec, points, Periodicity(h2["periodicity"]), labels, windings, start, bool(int(h2.get("truncated", "0")))
    )


def trajectory_to_json(traj: Trajectory) -> str:
    doc = {
        "spec": spec_to_dict(traj.spec),
        "points": [{"alpha": p.alpha, "k": [p.k.real, p.k.imag]} for p in traj.points],
        "periodicity": traj.periodicity.value,
        "labels": {fmt(a): str(lab) for a, lab in sorted(traj.labels.items())},
        "windings": {str(n): w for n, w in sorted(traj.windings.items())},
        "start_label": str(traj.start_label) if traj.start_label else None,
        "truncated": traj.truncated,
        "units": "MeV",
    }
    return json.dumps(doc, indent=1) + "\n"


def trajectory_from_json(text: str) -> Trajectory:
    doc = json.loads(text)
    points = [PhasePoint(p["alpha"], complex(*p["k"])) for p in doc["points"]]
    labels = {float(a): PoleLabel.parse(v) for a, v in doc["labels"].items()}
    windings = {int(n): int(w) for n, w in doc["windings"].items()}
    start = PoleLabel.parse(doc["start_label"]) if doc.get("start_label") else None
    return Trajectory(
        spec_from_dict(doc["spec"]), points, Periodicity(doc["periodicity"]), labels, windings, start, doc.get("truncated", False)
    )


# -- sweeps and events --------------------------------------------------------------


def sweep_to_csv(result) -> str:
    lines = [f"# {result.spec.family.value} axis poles k = i kappa, units=MeV", "Ubar,pole_id,kappa,marker"]
    for u, lab, kap in result.rows:
        lines.append(f"{fmt(u)},{lab},{fmt(kap)},")
    for c in result.collisions:
        tag = "arrival" if c.arrival else "collision"
        lines.append(f"{fmt(c.ubar)},{c.labels[0]}+{c.labels[1]},{fmt(c.kappa)},{tag}")
    return "\n".join(lines) + "\n"


def sweep_to_json(result) -> str:
    doc = {
        "family": result.spec.family.value,
        "rows": [{"Ubar": u, "pole_id": str(lab), "kappa": kap} for u, lab, kap in result.rows],
        "collisions": [
            {"Ubar": c.ubar, "labels": [str(c.labels[0]), str(c.labels[1])], "kappa": c.kappa, "residual": c.residual, "arrival": c.arrival}
            for c in result.collisions
        ],
        "units": "MeV",
    }
    return json.dumps(doc, indent=1) + "\n"


def event_to_dict(e: EventRecord) -> dict:
    return {
        "kind": e.kind,
        "U_critical": e.U_critical,
        "alpha_critical": e.alpha_critical,
        "k_critical": [e.k_critical.real, e.k_critical.imag],
        "participants": list(e.participants),
        "residual": e.residual,
        "bracket": list(e.bracket) if e.bracket else None,
        "resolved": e.resolved,
    }


def events_to_csv(events: Sequence[EventRecord]) -> str:
    lines = ["# units=MeV, alpha in radians", "kind,U_critical,alpha_critical,re_k,im_k,participants,residual,status"]
    for e in events:
        status = "RESOLVED" if e.resolved else f"UNRESOLVED[{fmt(e.bracket[0])}:{fmt(e.bracket[1])}]"
        parts = " -> ".join(e.participants)
        lines.append(
            f"{e.kind},{fmt(e.U_critical)},{fmt(e.alpha_critical)},{fmt(e.k_critical.real)},{fmt(e.k_critical.imag)},"
            f"\"{parts}\",{fmt(e.residual)},{status}"
        )
    return "\n".join(lines) + "\n"


def events_to_json(events: Sequence[EventRecord]) -> str:
    return json.dumps([event_to_dict(e) for e in events], indent=1, allow_nan=True) + "\n"


# -- SVG -----------------------------------------------------------------------------


def _svg_frame(xs: Sequence[float], ys: Sequence[float], width=640, height=640, pad=50):
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 1, x1 + 1
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 1, y1 + 1
    sx = (width - 2 * pad) / (x1 - x0)
    sy = (height - 2 * pad) / (y1 - y0)

    def tx(x):
        return pad + (x - x0) * sx

    def ty(y):
        return height - pad - (y - y0) * sy

    return tx, ty, (x0, x1, y0, y1)


def _axes(tx, ty, box, width, height, xlabel, ylabel) -> list[str]:
    x0, x1, y0, y1 = box
    out = []
    if x0 <= 0 <= x1:
        out.append(f'<line x1="{tx(0):.2f}" y1="{ty(y0):.2f}" x2="{tx(0):.2f}" y2="{ty(y1):.2f}" stroke="#999" stroke-width="0.5"/>')
    if y0 <= 0 <= y1:
        out.append(f'<line x1="{tx(x0):.2f}" y1="{ty(0):.2f}" x2="{tx(x1):.2f}" y2="{ty(0):.2f}" stroke="#999" stroke-width="0.5"/>')
    out.append(f'<text x="{width / 2:.0f}" y="{height - 10}" font-size="12" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="12" y="{height / 2:.0f}" font-size="12" transform="rotate(-90 12 {height / 2:.0f})" text-anchor="middle">{ylabel}</text>')
    out.append(f'<text x="50" y="{height - 30}" font-size="10">[{x0:.4g}, {x1:.4g}] x [{y0:.4g}, {y1:.4g}]</text>')
    return out


def trajectories_svg(trajs: Sequence[Trajectory], *, width: int = 640, height: int = 640) -> str:
    """Trajectories in the k plane; filled dots at alpha = 0 mod 2 pi, open at pi mod 2 pi, crosses at fixed zeros."""
    xs = [p.k.real for t in trajs for p in t.points]
    ys = [p.k.imag for t in trajs for p in t.points]
    fz = []
    if trajs and trajs[0].spec.has_fixed_zeros:
        spec = trajs[0].spec
        lo = min(ys)
        n = 1
        while fixed_zero(n, spec).imag >= lo - 1e-9:
            fz.append(fixed_zero(n, spec))
            n += 1
    tx, ty, box = _svg_frame(xs or [0.0], (ys or [0.0]) + [z.imag for z in fz])
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    out += _axes(tx, ty, box, width, height, "Re k (MeV)", "Im k (MeV)")
    palette = ["#1f4e99", "#b3322b", "#2c7a3b", "#7a3b99", "#a36b00", "#006b6b"]
    for i, t in enumerate(trajs):
        pts = " ".join(f"{tx(p.k.real):.2f},{ty(p.k.imag):.2f}" for p in t.points)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{palette[i % len(palette)]}" stroke-width="1"/>')
        for p in t.points:
            j = p.alpha / math.pi
            if abs(j - round(j)) > 1e-9:
                continue
            fill = "black" if round(j) % 2 == 0 else "white"
            out.append(f'<circle cx="{tx(p.k.real):.2f}" cy="{ty(p.k.imag):.2f}" r="3" fill="{fill}" stroke="black"/>')
    for z in fz:
        x, y = tx(z.real), ty(z.imag)
        out.append(f'<path d="M{x - 4:.2f},{y - 4:.2f} L{x + 4:.2f},{y + 4:.2f} M{x - 4:.2f},{y + 4:.2f} L{x + 4:.2f},{y - 4:.2f}" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_svg(result, *, width: int = 640, height: int = 480) -> str:
    xs = [r[0] for r in result.rows] or [0.0]
    ys = [r[2] for r in result.rows] or [0.0]
    tx, ty, box = _svg_frame(xs, ys, width, height)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    out += _axes(tx, ty, box, width, height, "Ubar (MeV)", "kappa (MeV)")
    for lab in result.labels():
        u, kap = result.flow(lab)
        # break the polyline where the pole was not followed continuously
        pts = " ".join(f"{tx(a):.2f},{ty(b):.2f}" for a, b in zip(u, kap))
        dash = ' stroke-dasharray="4,2"' if lab.sector == "R" else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1"{dash}/>')
    for c in result.collisions:
        out.append(f'<circle cx="{tx(c.ubar):.2f}" cy="{ty(c.kappa):.2f}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
