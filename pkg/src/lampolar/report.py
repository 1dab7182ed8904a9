"""Serialization of analysis results to JSON-ready dicts, CSV rows and text."""

from __future__ import annotations

import math
from dataclasses import asdict, is_dataclass

import numpy as np

from .classification import ClassificationReport, classify_tensors
from .compliance import ComplianceSet, compliance, oracle_deviation, v2_identity
from .laminate import (
    Laminate,
    StiffnessSet,
    homogeneity_tensors,
    lamination_parameters,
    polar_homogenize,
    stiffness_tensors,
)
from .material import PlyPolar, ply_polar
from .polar import PolarParams2, PolarParams4

JSON_DIGITS = 9
PRETTY_DIGITS = 4

STIFFNESS_KEYS = ("A", "B", "D", "U", "V", "W")
COMPLIANCE_KEYS = ("a", "b", "d", "u", "v1", "v2", "w")
UNITS = {
    "A": "MPa", "B": "MPa", "D": "MPa", "C": "MPa",
    "U": "MPa/degC", "V": "MPa/degC", "W": "MPa/degC", "Y": "MPa/degC",
    "a": "1/MPa", "b": "1/MPa", "d": "1/MPa",
    "u": "1/degC", "w": "1/degC", "v1": "1/(degC mm)", "v2": "mm/degC",
}
_ANGLE_FIELDS = {"Phi0", "Phi1", "Phi", "phi0", "phi1", "phi2"}


def round_sig(x: float, digits: int = JSON_DIGITS) -> float:
    """Round to ``digits`` significant digits; also folds -0.0 into 0.0."""
    if x == 0 or not math.isfinite(x):
        return 0.0 if x == 0 else x
    return float(f"{x:.{digits - 1}e}") + 0.0


def clean(obj, digits: int = JSON_DIGITS):
    """Recursively convert numpy and dataclass values into rounded JSON types."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return clean(asdict(obj), digits)
    if isinstance(obj, dict):
        return {str(k): clean(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj), digits)
    if hasattr(obj, "value"):
        return obj.value
    return obj


def polar_dict(p) -> dict:
    """Polar parameters with angles in degrees."""
    d = asdict(p)
    for k in list(d):
        if k in _ANGLE_FIELDS:
            d[k + "_deg"] = math.degrees(d.pop(k))
    return d


def tensor_entry(x: np.ndarray, p) -> dict:
    return {"cartesian": x, "polar": polar_dict(p)}


def ply_dict(pp: PlyPolar) -> dict:
    return {
        "Q": polar_dict(pp.Q),
        "gamma": polar_dict(pp.gamma),
        "rho": pp.rho,
        "lambda": pp.lam,
    }


def analysis(lam: Laminate, tol: float, verify: bool = False) -> dict:
    """Full tensor report of a laminate as plain Python data (unrounded)."""
    s = stiffness_tensors(lam)
    c = compliance(s)
    hp = homogeneity_tensors(s)
    ply = ply_polar(lam.plies[0].material) if lam.identical_plies else None
    out = {
        "laminate": lam.to_dict(),
        "n": lam.n,
        "h_mm": lam.h,
        "units": UNITS,
        "stiffness": {k: tensor_entry(getattr(s, k), s.polar[k]) for k in STIFFNESS_KEYS},
        "compliance": {k: tensor_entry(getattr(c, k), c.polar[k]) for k in COMPLIANCE_KEYS},
        "homogeneity": {
            "C": tensor_entry(hp.C, hp.polar["C"]),
            "Y": tensor_entry(hp.Y, hp.polar["Y"]),
        },
        "ply": ply_dict(ply) if ply is not None else None,
        "lamination_parameters": (
            lamination_parameters(lam).xi if lam.identical_plies else None
        ),
        "classification": classify_tensors(s, c, ply, tol),
    }
    if verify:
        out["verify"] = verification(s, c, lam)
    return out


def verification(s: StiffnessSet, c: ComplianceSet, lam: Laminate | None = None) -> dict:
    """Independent-route checks: dense oracle, rebuilt v2 and polar homogenization."""
    dev = oracle_deviation(s, c)
    v2r = v2_identity(s, c)
    scale = max(float(np.max(np.abs(c.v2))), float(np.max(np.abs(c.u))) * s.h, 1e-300)
    out = {
        "oracle_deviation": dev,
        "oracle_max_deviation": max(dev.values()),
        "v2_identity_deviation": float(np.max(np.abs(v2r - c.v2))) / scale,
    }
    if lam is not None:
        out["two_route_deviation"] = two_route_deviation(s, polar_homogenize(lam))
    return out


def two_route_deviation(s: StiffnessSet, sp: StiffnessSet) -> float:
    """Largest difference between two stiffness sets, relative to |A| or |U|."""
    a_scale = float(np.max(np.abs(s.A)))
    u_scale = float(np.max(np.abs(s.U))) or 1.0
    out = 0.0
    for k in STIFFNESS_KEYS:
        scale = a_scale if k in "ABD" else u_scale
        out = max(out, float(np.max(np.abs(getattr(sp, k) - getattr(s, k)))) / scale)
    return out


def stiffness_from_report(rep: dict) -> tuple[StiffnessSet, PlyPolar | None]:
    """Rebuild the stiffness set (and ply polar data) stored in an analysis report."""
    st = rep["stiffness"]
    s = StiffnessSet(
        *(np.array(st[k]["cartesian"], dtype=float) for k in STIFFNESS_KEYS),
        h=float(rep["h_mm"]),
    )
    ply = None
    if rep.get("ply"):
        pr = rep["ply"]
        q, g = pr["Q"], pr["gamma"]
        ply = PlyPolar(
            PolarParams4(
                q["T0"], q["T1"], q["R0"], q["R1"],
                math.radians(q["Phi0_deg"]), math.radians(q["Phi1_deg"]),
                q["phi0_defined"], q["phi1_defined"],
            ),
            PolarParams2(g["T"], g["R"], math.radians(g["Phi_deg"]), g["phi_defined"]),
            pr["rho"],
            int(pr["lambda"]),
        )
    return s, ply


def classification_from_report(rep: dict, tol: float) -> ClassificationReport:
    s, ply = stiffness_from_report(rep)
    return classify_tensors(s, compliance(s), ply, tol)


def fmt(x: float, digits: int = PRETTY_DIGITS) -> str:
    if x == 0:
        return "0"
    return f"{x:.{digits - 1}e}" if abs(x) < 1e-2 or abs(x) >= 1e5 else f"{x:.{digits}g}"


def _matrix_lines(name: str, m, unit: str) -> list[str]:
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        return [f"  {name:<3} = [{', '.join(fmt(v) for v in m)}] {unit}"]
    rows = ["[" + ", ".join(f"{fmt(v):>10}" for v in row) + "]" for row in m]
    lines = [f"  {name:<3} = {rows[0]} {unit}"]
    lines += [f"        {r}" for r in rows[1:]]
    return lines


def _polar_line(p: dict) -> str:
    parts = []
    for k, v in p.items():
        if isinstance(v, bool):
            continue
        parts.append(f"{k}={fmt(v) if not k.endswith('_deg') else f'{v:.4g}'}")
    return "        polar: " + ", ".join(parts)


def pretty_analysis(rep: dict) -> str:
    lam = rep["laminate"]
    angles = lam.get("angles_deg") or [p["angle_deg"] for p in lam["plies"]]
    lines = [
        f"laminate {lam.get('name') or '(unnamed)'}: n={rep['n']}, h={fmt(rep['h_mm'])} mm",
        "  sequence: [" + " ".join(f"{a:g}" for a in angles) + "]",
        "stiffness",
    ]
    for group, keys in (("stiffness", STIFFNESS_KEYS), ("compliance", COMPLIANCE_KEYS),
                        ("homogeneity", ("C", "Y"))):
        if group != "stiffness":
            lines.append(group)
        for k in keys:
            e = rep[group][k]
            lines += _matrix_lines(k, e["cartesian"], UNITS[k])
            lines.append(_polar_line(e["polar"]))
    lines.append("classification")
    lines += pretty_classification(rep["classification"]).splitlines()
    if "verify" in rep:
        v = rep["verify"]
        lines.append("verification")
        lines.append(f"  oracle max deviation: {v['oracle_max_deviation']:.3e}")
        lines.append(f"  v2 identity deviation: {v['v2_identity_deviation']:.3e}")
        if "two_route_deviation" in v:
            lines.append(f"  two-route deviation: {v['two_route_deviation']:.3e}")
    return "\n".join(lines)


def pretty_classification(c: dict) -> str:
    lines = ["  symmetry: " + ", ".join(f"{k}={v}" for k, v in c["symmetry"].items())]
    for key in ("elastically_coupled", "thermally_uncoupled", "quasi_homogeneous",
                "thermally_quasi_homogeneous", "tqhcl", "warp_free_stable",
                "extension_free_stable", "k1_variant"):
        lines.append(f"  {key}: {'yes' if c[key] else 'no'}")
    lines.append(f"  special_case: {c['special_case'] or 'none'}")
    if c["satisfied_cases"]:
        lines.append("  satisfied_cases: " + ", ".join(c["satisfied_cases"]))
    return "\n".join(lines)


def csv_rows_analysis(rep: dict) -> list[tuple]:
    """Rows (quantity, component, value) covering every Cartesian tensor."""
    rows = []
    for group in ("stiffness", "compliance", "homogeneity"):
        for k, e in rep[group].items():
            m = np.asarray(e["cartesian"], dtype=float)
            if m.ndim == 1:
                for i, v in zip("126", m):
                    rows.append((k, i, v))
            else:
                for i, r in zip("126", m):
                    for j, v in zip("126", r):
                        rows.append((k, i + j, v))
            for pk, pv in e["polar"].items():
                if not isinstance(pv, bool):
                    rows.append((k, pk, pv))
    return rows
