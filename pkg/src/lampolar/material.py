"""Ply materials: engineering constants, reduced stiffness and thermal stiffness.

Units are fixed: moduli in MPa, thermal expansion coefficients in 1/°C.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import MaterialError, UnknownMaterialError
from .polar import (
    DEFAULT_TOL,
    PolarParams2,
    PolarParams4,
    kelvin_matrix,
    kelvin_vector,
    polar_from_cartesian_2,
    polar_from_cartesian_4,
    wrap_angle,
)

CATALOG_ENV = "LAMPOLAR_MATERIALS"

MATERIAL_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["name", "E1", "E2", "G12", "nu12", "alpha1", "alpha2"],
        "properties": {
            "name": {"type": "string"},
            "E1": {"type": "number", "description": "MPa"},
            "E2": {"type": "number", "description": "MPa"},
            "G12": {"type": "number", "description": "MPa"},
            "nu12": {"type": "number"},
            "alpha1": {"type": "number", "description": "1/degC"},
            "alpha2": {"type": "number", "description": "1/degC"},
            "description": {"type": "string"},
        },
    },
}


@dataclass(frozen=True)
class PlyMaterial:
    """Orthotropic ply described by its engineering constants."""

    name: str
    E1: float
    E2: float
    G12: float
    nu12: float
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        if min(self.E1, self.E2, self.G12) <= 0:
            raise MaterialError(f"{self.name}: E1, E2 and G12 must be positive")
        if 1.0 - self.nu12 * self.nu21 <= 0:
            raise MaterialError(
                f"{self.name}: 1 - nu12*nu21 must be positive (Q not positive definite)"
            )

    @property
    def nu21(self) -> float:
        return self.nu12 * self.E2 / self.E1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PlyMaterial":
        try:
            return cls(
                name=str(data["name"]),
                E1=float(data["E1"]),
                E2=float(data["E2"]),
                G12=float(data["G12"]),
                nu12=float(data["nu12"]),
                alpha1=float(data.get("alpha1", 0.0)),
                alpha2=float(data.get("alpha2", 0.0)),
            )
        except KeyError as exc:
            raise MaterialError(f"material record missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise MaterialError(f"bad material record: {exc}") from None


@dataclass(frozen=True)
class PlyPolar:
    """Polar description of a ply: stiffness, thermal stiffness, rho and lambda."""

    Q: PolarParams4
    gamma: PolarParams2
    rho: float | None
    lam: int

    @property
    def rho_defined(self) -> bool:
        return self.rho is not None

    @property
    def sign(self) -> int:
        """(-1)**lambda."""
        return -1 if self.lam else 1


def reduced_stiffness(mat: PlyMaterial) -> np.ndarray:
    """Plane-stress reduced stiffness in Kelvin notation, material frame."""
    den = 1.0 - mat.nu12 * mat.nu21
    if den <= 0:
        raise MaterialError(f"{mat.name}: reduced stiffness is not positive definite")
    return kelvin_matrix(
        mat.E1 / den, mat.nu12 * mat.E2 / den, 0.0, mat.E2 / den, 0.0, 2.0 * mat.G12
    )


def thermal_expansion(mat: PlyMaterial) -> np.ndarray:
    return kelvin_vector(mat.alpha1, mat.alpha2, 0.0)


def thermal_stiffness(Q: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """gamma = Q alpha (both in the same frame)."""
    return np.asarray(Q, dtype=float) @ np.asarray(alpha, dtype=float)


def ply_polar(mat: PlyMaterial, tol: float = DEFAULT_TOL) -> PlyPolar:
    """Polar constants of a ply, the ratio rho = R_gamma / R1 and lambda.

    ``rho`` is ``None`` for square-symmetric plies (R1 = 0), where it is not
    defined. Raises if the thermal and elastic orthotropy axes are neither
    aligned nor at a right angle.
    """
    Q = reduced_stiffness(mat)
    qp = polar_from_cartesian_4(Q)
    gp = polar_from_cartesian_2(thermal_stiffness(Q, thermal_expansion(mat)))
    scale = qp.T0 + 2.0 * qp.T1
    r1_zero = qp.R1 <= tol * scale
    rg_zero = gp.R <= tol * max(abs(gp.T) + gp.R, 1e-300)

    if rg_zero:
        lam = 0
    else:
        ref = 0.0 if r1_zero else qp.Phi1
        d = wrap_angle(gp.Phi - ref, math.pi)
        if abs(d) <= tol:
            lam = 0
        elif 0.5 * math.pi - abs(d) <= tol:
            lam = 1
        else:
            raise MaterialError(
                f"{mat.name}: thermal axes at {math.degrees(d):.3g} deg from the elastic ones"
            )
    rho = None if r1_zero else gp.R / qp.R1
    return PlyPolar(qp, gp, rho, lam)


def _builtin_records() -> list[dict]:
    text = resources.files("lampolar").joinpath("data/materials.json").read_text()
    return json.loads(text)


def load_catalog(path: str | os.PathLike | None = None) -> dict[str, PlyMaterial]:
    """Built-in materials, extended/overridden by ``path`` or $LAMPOLAR_MATERIALS."""
    records = _builtin_records()
    extra = path if path is not None else os.environ.get(CATALOG_ENV)
    if extra:
        try:
            data = json.loads(Path(extra).read_text())
        except OSError as exc:
            raise MaterialError(f"cannot read material catalog {extra}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise MaterialError(
                f"{extra}: line {exc.lineno}: invalid JSON ({exc.msg})"
            ) from None
        if not isinstance(data, list):
            raise MaterialError(f"{extra}: catalog must be a JSON array of materials")
        records = records + data
    catalog = {}
    for rec in records:
        mat = PlyMaterial.from_dict(rec)
        catalog[mat.name] = mat
    return catalog


def get_material(name: str, catalog: dict[str, PlyMaterial] | None = None) -> PlyMaterial:
    catalog = load_catalog() if catalog is None else catalog
    try:
        return catalog[name]
    except KeyError:
        known = ", ".join(sorted(catalog))
        raise UnknownMaterialError(f"unknown material {name!r} (known: {known})") from None


def t300_5208() -> PlyMaterial:
    # alpha2 = 2.25e-3 is unusually large for a carbon-epoxy ply but it is
    # the value the reference polar constants (T_gamma = 15.1 MPa/°C) follow.
    return get_material("T300/5208", {m.name: m for m in map(PlyMaterial.from_dict, _builtin_records())})
