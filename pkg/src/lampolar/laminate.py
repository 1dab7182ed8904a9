"""Stacking sequences and their homogenized stiffness and thermal tensors.

Stored tensors are h-normalized: ``A, B, D`` have the units of a stiffness
(MPa) and ``U, V, W`` of a thermal stiffness (MPa/°C); the thickness
prefactors of the constitutive law are applied in :mod:`lampolar.compliance`
and :mod:`lampolar.response`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import HybridLaminateError, ValidationError
from .material import (
    PlyMaterial,
    get_material,
    load_catalog,
    ply_polar,
    reduced_stiffness,
    thermal_expansion,
    thermal_stiffness,
)
from .polar import (
    PolarParams2,
    PolarParams4,
    cartesian_from_polar_2,
    cartesian_from_polar_4,
    kelvin_rotation,
    polar_from_cartesian_2,
    polar_from_cartesian_4,
)

DEFAULT_PLY_THICKNESS = 0.125  # mm

# Integer numerators of the stacking coefficients; denominators n, n^2, n^3.
COEF_DENOMINATOR_POWER = {"a": 1, "b": 2, "d": 3, "c": 3}


def coefficient_numerator(group: str, k: int, n: int) -> int:
    """Numerator of a_k, b_k, d_k or c_k (1-based ply index ``k``)."""
    if group == "a":
        return 1
    if group == "b":
        return 2 * k - n - 1
    if group == "d":
        return 12 * k * (k - n - 1) + 4 + 3 * n * (n + 2)
    if group == "c":
        return n * n - coefficient_numerator("d", k, n)
    raise ValueError(f"unknown coefficient group {group!r}")


def coefficient(group: str, k: int, n: int) -> float:
    return coefficient_numerator(group, k, n) / n ** COEF_DENOMINATOR_POWER[group]


def unit_power(angle: float, order: int) -> tuple[int, int] | complex:
    """exp(i*order*angle) as an exact Gaussian integer when it is one of 1, i, -1, -i.

    Falls back to a complex float otherwise.
    """
    quarter = order * angle / (0.5 * math.pi)
    q = round(quarter)
    if abs(quarter - q) < 1e-12:
        return ((1, 0), (0, 1), (-1, 0), (0, -1))[q % 4]
    return complex(math.cos(order * angle), math.sin(order * angle))


def exact_sum(group: str, order: int, angles: Sequence[float]):
    """Sum of numerator_k * exp(i*order*delta_k).

    Returns a pair of ints when every term is exact, otherwise a complex
    float accumulated with ``math.fsum``.
    """
    n = len(angles)
    re, im = [], []
    exact = True
    for k, delta in enumerate(angles, start=1):
        c = coefficient_numerator(group, k, n)
        e = unit_power(delta, order)
        if isinstance(e, tuple):
            re.append(c * e[0])
            im.append(c * e[1])
        else:
            exact = False
            re.append(c * e.real)
            im.append(c * e.imag)
    if exact:
        return sum(re), sum(im)
    return complex(math.fsum(re), math.fsum(im))


@dataclass(frozen=True)
class Ply:
    material: PlyMaterial
    angle: float  # radians


@dataclass(frozen=True)
class Laminate:
    """Ordered ply stack, bottom ply first, all plies of equal thickness."""

    plies: tuple[Ply, ...]
    ply_thickness: float = DEFAULT_PLY_THICKNESS
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "plies", tuple(self.plies))
        if not self.plies:
            raise ValidationError("a laminate needs at least one ply")
        if not self.ply_thickness > 0:
            raise ValidationError("ply thickness must be positive")

    @classmethod
    def from_angles(
        cls,
        material: PlyMaterial,
        angles_deg: Iterable[float],
        ply_thickness: float = DEFAULT_PLY_THICKNESS,
        name: str = "",
    ) -> "Laminate":
        plies = tuple(Ply(material, math.radians(a)) for a in angles_deg)
        return cls(plies, ply_thickness, name)

    @property
    def n(self) -> int:
        return len(self.plies)

    @property
    def h(self) -> float:
        return self.n * self.ply_thickness

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(p.angle for p in self.plies)

    @property
    def angles_deg(self) -> tuple[float, ...]:
        return tuple(math.degrees(p.angle) for p in self.plies)

    @property
    def identical_plies(self) -> bool:
        first = self.plies[0].material
        return all(p.material == first for p in self.plies)

    @property
    def materials(self) -> dict[str, PlyMaterial]:
        return {p.material.name: p.material for p in self.plies}

    def reversed(self) -> "Laminate":
        return Laminate(self.plies[::-1], self.ply_thickness, self.name)

    def to_dict(self) -> dict:
        out = {"name": self.name, "ply_thickness_mm": self.ply_thickness}
        if self.identical_plies:
            out["material"] = self.plies[0].material.name
            out["angles_deg"] = [_clean_deg(a) for a in self.angles_deg]
        else:
            out["plies"] = [
                {"material": p.material.name, "angle_deg": _clean_deg(math.degrees(p.angle))}
                for p in self.plies
            ]
        out["materials"] = [m.to_dict() for m in self.materials.values()]
        return out


def _clean_deg(a: float) -> float:
    r = round(a)
    return float(r) if abs(a - r) < 1e-9 else a


def _polar_dict(tensors: dict[str, np.ndarray]) -> dict:
    out = {}
    for key, x in tensors.items():
        out[key] = polar_from_cartesian_2(x) if x.shape == (3,) else polar_from_cartesian_4(x)
    return out


@dataclass(frozen=True)
class StiffnessSet:
    """h-normalized stiffness tensors A, B, D (MPa) and U, V, W (MPa/°C)."""

    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    h: float

    @cached_property
    def polar(self) -> dict:
        return _polar_dict(self.tensors())

    def tensors(self) -> dict[str, np.ndarray]:
        return {"A": self.A, "B": self.B, "D": self.D, "U": self.U, "V": self.V, "W": self.W}


@dataclass(frozen=True)
class LaminationParams:
    """xi_1..xi_16 (stored 0-based) plus the exact integer sums behind them."""

    xi: np.ndarray
    n: int
    exact: dict = field(default_factory=dict)

    def __getitem__(self, k: int) -> float:
        """1-based access, matching the usual xi_k numbering."""
        if not 1 <= k <= 16:
            raise IndexError(k)
        return float(self.xi[k - 1])

    def pair(self, k: int) -> complex:
        """xi_k + i xi_{k+1} for odd ``k``."""
        return complex(self[k], self[k + 1])


@dataclass(frozen=True)
class HomogeneityPair:
    C: np.ndarray
    Y: np.ndarray

    @cached_property
    def polar(self) -> dict:
        return _polar_dict({"C": self.C, "Y": self.Y})


def z_coordinates(lam: Laminate) -> np.ndarray:
    """Ply interface positions z_0..z_n (mm), midplane at 0."""
    return -0.5 * lam.h + lam.ply_thickness * np.arange(lam.n + 1)


def _weights(lam: Laminate) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-ply weights of A, B, D (same for U, V, W).

    The z-integrals telescope to a_k, b_k and d_k, so the exact coefficients
    are used in place of differences of powers of z.
    """
    n = lam.n
    return tuple(
        np.array([coefficient(g, k, n) for k in range(1, n + 1)]) for g in "abd"
    )


def rotated_ply(material: PlyMaterial, angle: float) -> tuple[np.ndarray, np.ndarray]:
    """Q and gamma of a ply turned by ``angle``, expressed in the laminate frame."""
    Q = reduced_stiffness(material)
    g = thermal_stiffness(Q, thermal_expansion(material))
    K = kelvin_rotation(-angle)
    return K @ Q @ K.T, K @ g


def stiffness_tensors(lam: Laminate) -> StiffnessSet:
    """A, B, D, U, V, W by direct summation over the plies.

    Plies sharing material and orientation are grouped and their integer
    coefficient numerators summed first, so cancellations (B of a
    unidirectional stack, for instance) are exact.
    """
    n = lam.n
    groups: dict = {}
    for k, ply in enumerate(lam.plies, start=1):
        acc = groups.setdefault((ply.material, ply.angle), [0, 0, 0])
        for j, g in enumerate("abd"):
            acc[j] += coefficient_numerator(g, k, n)
    A = np.zeros((3, 3))
    B = np.zeros((3, 3))
    D = np.zeros((3, 3))
    U = np.zeros(3)
    V = np.zeros(3)
    W = np.zeros(3)
    for (material, angle), (na, nb, nd) in groups.items():
        Qk, gk = rotated_ply(material, angle)
        wa, wb, wd = na / n, nb / n**2, nd / n**3
        A += wa * Qk
        B += wb * Qk
        D += wd * Qk
        U += wa * gk
        V += wb * gk
        W += wd * gk
    return StiffnessSet(A, B, D, U, V, W, lam.h)


def lamination_parameters(lam: Laminate) -> LaminationParams:
    """xi_1..xi_16 for a laminate of identical plies.

    Pairs: (1,2) a-4delta, (3,4) a-2delta, (5,6) b-4delta, (7,8) b-2delta,
    (9,10) d-4delta, (11,12) d-2delta, (13,14) c-4delta, (15,16) c-2delta.
    """
    if not lam.identical_plies:
        raise HybridLaminateError("lamination parameters need identical plies")
    n = lam.n
    xi = np.zeros(16)
    exact = {}
    for i, (group, order) in enumerate(
        [("a", 4), ("a", 2), ("b", 4), ("b", 2), ("d", 4), ("d", 2), ("c", 4), ("c", 2)]
    ):
        s = exact_sum(group, order, lam.angles)
        exact[(group, order)] = s
        den = n ** COEF_DENOMINATOR_POWER[group]
        if isinstance(s, tuple):
            xi[2 * i], xi[2 * i + 1] = s[0] / den, s[1] / den
        else:
            xi[2 * i], xi[2 * i + 1] = s.real / den, s.imag / den
    return LaminationParams(xi, n, exact)


def _polar4_from_complex(T0, T1, z0: complex, z1: complex) -> PolarParams4:
    R0, R1 = abs(z0), abs(z1)
    scale = abs(T0) + abs(T1) + R0 + R1
    eps = 1e-13 * max(scale, 1e-300)
    d0, d1 = R0 > eps, R1 > eps
    phi0 = math.atan2(z0.imag, z0.real) / 4 if d0 else 0.0
    phi1 = math.atan2(z1.imag, z1.real) / 2 if d1 else 0.0
    return PolarParams4(T0, T1, R0, R1, phi0, phi1, d0, d1)


def _polar2_from_complex(T, z: complex) -> PolarParams2:
    R = abs(z)
    defined = R > 1e-13 * max(abs(T) + R, 1e-300)
    return PolarParams2(T, R, math.atan2(z.imag, z.real) / 2 if defined else 0.0, defined)


def homogenized_polar(lam: Laminate) -> dict:
    """Polar parameters of A, B, D, U, V, W, computed in the polar domain.

    Identical plies go through the lamination parameters; hybrids use the
    general weighted sums of the ply polar parameters.
    """
    out = {}
    if lam.identical_plies:
        pp = ply_polar(lam.plies[0].material)
        q, g = pp.Q, pp.gamma
        lp = lamination_parameters(lam)
        e0 = q.R0 * complex(math.cos(4 * q.Phi0), math.sin(4 * q.Phi0))
        e1 = q.R1 * complex(math.cos(2 * q.Phi1), math.sin(2 * q.Phi1))
        eg = g.R * complex(math.cos(2 * g.Phi), math.sin(2 * g.Phi))
        for key, k4, k2, iso in (("A", 1, 3, 1.0), ("B", 5, 7, 0.0), ("D", 9, 11, 1.0)):
            out[key] = _polar4_from_complex(iso * q.T0, iso * q.T1, e0 * lp.pair(k4), e1 * lp.pair(k2))
        for key, k2, iso in (("U", 3, 1.0), ("V", 7, 0.0), ("W", 11, 1.0)):
            out[key] = _polar2_from_complex(iso * g.T, eg * lp.pair(k2))
        return out

    weights = dict(zip("ABD", _weights(lam)))
    weights.update(zip("UVW", _weights(lam)))
    plies = [(ply_polar(p.material), p.angle) for p in lam.plies]
    for key in "ABD":
        w = weights[key]
        T0 = math.fsum(wk * pp.Q.T0 for wk, (pp, _) in zip(w, plies))
        T1 = math.fsum(wk * pp.Q.T1 for wk, (pp, _) in zip(w, plies))
        z0 = sum(wk * pp.Q.R0 * np.exp(4j * (pp.Q.Phi0 + d)) for wk, (pp, d) in zip(w, plies))
        z1 = sum(wk * pp.Q.R1 * np.exp(2j * (pp.Q.Phi1 + d)) for wk, (pp, d) in zip(w, plies))
        out[key] = _polar4_from_complex(T0, T1, complex(z0), complex(z1))
    for key in "UVW":
        w = weights[key]
        T = math.fsum(wk * pp.gamma.T for wk, (pp, _) in zip(w, plies))
        z = sum(wk * pp.gamma.R * np.exp(2j * (pp.gamma.Phi + d)) for wk, (pp, d) in zip(w, plies))
        out[key] = _polar2_from_complex(T, complex(z))
    return out


def polar_homogenize(lam: Laminate) -> StiffnessSet:
    """Stiffness set rebuilt from the polar-domain homogenization."""
    p = homogenized_polar(lam)
    return StiffnessSet(
        cartesian_from_polar_4(p["A"]),
        cartesian_from_polar_4(p["B"]),
        cartesian_from_polar_4(p["D"]),
        cartesian_from_polar_2(p["U"]),
        cartesian_from_polar_2(p["V"]),
        cartesian_from_polar_2(p["W"]),
        lam.h,
    )


def homogeneity_tensors(s: StiffnessSet) -> HomogeneityPair:
    """C = A - D and Y = U - W."""
    return HomogeneityPair(s.A - s.D, s.U - s.W)


def homogeneity_from_lamination(lam: Laminate) -> HomogeneityPair:
    """C and Y through the c_k coefficients (identical plies only)."""
    if not lam.identical_plies:
        raise HybridLaminateError("c_k coefficients need identical plies")
    n = lam.n
    C = np.zeros((3, 3))
    Y = np.zeros(3)
    for k, ply in enumerate(lam.plies, start=1):
        Qk, gk = rotated_ply(ply.material, ply.angle)
        ck = coefficient("c", k, n)
        C += ck * Qk
        Y += ck * gk
    return HomogeneityPair(C, Y)


def laminate_from_dict(data: dict, catalog: dict[str, PlyMaterial] | None = None) -> Laminate:
    """Build a laminate from its JSON description.

    Accepted forms: ``{name, material, ply_thickness_mm, angles_deg}`` or
    ``{name, ply_thickness_mm, plies: [{material, angle_deg}, ...]}``. An
    optional ``materials`` array adds catalog records inline.
    """
    if not isinstance(data, dict):
        raise ValidationError("laminate description must be a JSON object")
    catalog = dict(load_catalog() if catalog is None else catalog)
    for rec in data.get("materials", []):
        mat = PlyMaterial.from_dict(rec)
        catalog[mat.name] = mat

    def resolve(ref):
        if isinstance(ref, dict):
            return PlyMaterial.from_dict(ref)
        return get_material(str(ref), catalog)

    t = float(data.get("ply_thickness_mm", DEFAULT_PLY_THICKNESS))
    name = str(data.get("name", ""))
    try:
        if "plies" in data:
            plies = [
                Ply(resolve(p["material"]), math.radians(float(p["angle_deg"])))
                for p in data["plies"]
            ]
            return Laminate(tuple(plies), t, name)
        if "angles_deg" in data and "material" in data:
            return Laminate.from_angles(resolve(data["material"]), data["angles_deg"], t, name)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad ply entry: {exc}") from None
    raise ValidationError("laminate needs either 'plies' or 'material' + 'angles_deg'")


def load_laminate(path: str | Path, catalog: dict[str, PlyMaterial] | None = None) -> Laminate:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    try:
        return laminate_from_dict(data, catalog)
    except ValidationError as exc:
        raise type(exc)(f"{path}: {exc}") from None
