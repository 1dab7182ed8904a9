"""Laminate-level classification and closed-form polar compliances.

The closed forms cover coupled laminates of identical plies whose A, B and D
share a common orthotropy frame. They are written with *signed* moduli
measured in that frame: ``R1X * cos 2(Phi1X - theta)`` and
``R0X * cos 4(Phi0X - theta)``. A negative ``R0`` therefore encodes k = 1
orthotropy, and a negative ``R1`` a tensor turned by a right angle, so one
set of polynomials covers every variant. Anisotropic outputs are returned
as signed amplitudes ``rc = r cos 2 phi`` in the same frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .compliance import ComplianceSet, compliance
from .errors import DenominatorVanishes, ValidationError
from .laminate import Laminate, StiffnessSet, homogeneity_tensors, stiffness_tensors
from .material import PlyPolar, ply_polar
from .polar import (
    DEFAULT_TOL,
    PolarParams2,
    PolarParams4,
    SymmetryClass,
    cartesian_from_polar_2,
    cartesian_from_polar_4,
    classify_symmetry,
    classify_symmetry_2,
    kelvin_vector,
    wrap_angle,
)

HALF_PI = 0.5 * math.pi


class Case(str, enum.Enum):
    """Special cases with known closed forms, most specific first per family."""

    VZERO_WARP_EXTENSION_FREE = "vzero_warp_extension_free"
    VZERO_ISOTROPIC_EXTENSION = "vzero_isotropic_extension"
    VZERO_WARP_FREE = "vzero_warp_free"
    VZERO_EXTENSION_FREE = "vzero_extension_free"
    VZERO_R0_ORTHOTROPIC = "vzero_r0_orthotropic"
    VZERO_QUASI_HOMOGENEOUS = "vzero_quasi_homogeneous"
    VZERO_ALIGNED = "vzero_aligned"
    COUPLED_CROSSPLY = "coupled_crossply"
    COUPLED_ALIGNED = "coupled_aligned"


CASE_PRIORITY = tuple(Case)


@dataclass(frozen=True)
class CaseInputs:
    """Signed polar inputs of a closed-form case, all in the case frame."""

    T0: float
    T1: float
    R0A: float
    R0B: float
    R0D: float
    R1A: float
    R1B: float
    R1D: float
    Tg: float
    rho: float
    lam: int
    h: float

    @property
    def s(self) -> int:
        return -1 if self.lam else 1

    @property
    def F(self) -> float:
        """T_gamma - (-1)^lambda T1 rho, the factor shared by every anisotropic term."""
        return self.Tg - self.s * self.T1 * self.rho


@dataclass(frozen=True)
class ThermalPolar:
    """Closed-form result for one thermal compliance vector in the case frame."""

    t: float
    rc: float

    def vector(self) -> np.ndarray:
        return kelvin_vector(self.t + self.rc, self.t - self.rc, 0.0)

    def polar(self, theta_ref: float = 0.0) -> PolarParams2:
        r = abs(self.rc)
        phi = (0.0 if self.rc >= 0 else HALF_PI) + theta_ref
        return PolarParams2(self.t, r, phi, r > 0)


def _check(name: str, value: float, scale: float, degree: int) -> float:
    if not math.isfinite(value) or abs(value) <= 1e-12 * scale**degree:
        raise DenominatorVanishes(name, value)
    return value


def closed_form_case(case: Case | str, p: CaseInputs) -> dict[str, ThermalPolar]:
    """Polar parameters of u, v1, v2, w from the closed form of ``case``.

    The caller is responsible for the case preconditions; the formulas are
    evaluated with the inputs as given (zero moduli are not enforced).
    """
    case = Case(case)
    T0, T1, h, s, F, Tg, rho = p.T0, p.T1, p.h, p.s, p.F, p.Tg, p.rho
    R0A, R0B, R0D, R1A, R1B, R1D = p.R0A, p.R0B, p.R0D, p.R1A, p.R1B, p.R1D
    scale = abs(T0) + abs(T1)
    iso = ThermalPolar(Tg / (4.0 * T1), 0.0)
    zero = ThermalPolar(0.0, 0.0)

    if case is Case.VZERO_QUASI_HOMOGENEOUS:
        p = CaseInputs(T0, T1, R0A, R0B, R0A, R1A, R1B, R1A, Tg, rho, p.lam, h)
        case = Case.VZERO_ALIGNED
        R0D, R1D = R0A, R1A

    if case is Case.VZERO_ALIGNED:
        tau1 = _check(
            "tau1",
            2 * R1A**2 * (2 * R1D**2 - (R0D + T0) * T1)
            + T1 * ((R0A + T0) * ((R0D + T0) * T1 - 2 * R1D**2) - 3 * R0B**2 * T1),
            scale, 4,
        )
        tv = -R0B * R1A * R1D * F / tau1
        return {
            "u": ThermalPolar(
                (((R0A + T0) * ((R0D + T0) * T1 - 2 * R1D**2) - 3 * R0B**2 * T1) * Tg
                 + 2 * s * R1A**2 * (2 * R1D**2 - (R0D + T0) * T1) * rho) / (4 * tau1),
                -R1A * ((R0D + T0) * T1 - 2 * R1D**2) * F / (2 * tau1),
            ),
            "v1": ThermalPolar(3 / h * tv, 3 / h * R0B * R1A * T1 * F / tau1),
            "v2": ThermalPolar(h / 4 * tv, h / 4 * R0B * R1D * T1 * F / tau1),
            "w": ThermalPolar(
                (((R0D + T0) * ((R0A + T0) * T1 - 2 * R1A**2) - 3 * R0B**2 * T1) * Tg
                 + 2 * s * R1D**2 * (2 * R1A**2 - (R0A + T0) * T1) * rho) / (4 * tau1),
                -R1D * ((R0A + T0) * T1 - 2 * R1A**2) * F / (2 * tau1),
            ),
        }

    if case is Case.VZERO_WARP_FREE:
        den = _check(
            "den", (2 * R1D**2 - (R0D + T0) * T1) * (R0A + T0) + 3 * R0B**2 * T1, scale, 3
        )
        return {
            "u": iso,
            "v1": zero,
            "v2": ThermalPolar(0.0, -h / 4 * R0B * R1D * F / den),
            "w": ThermalPolar(
                (3 * R0B**2 * Tg - (R0A + T0) * ((R0D + T0) * Tg - 2 * s * R1D**2 * rho))
                / (4 * den),
                0.5 * R1D * (R0A + T0) * F / den,
            ),
        }

    if case is Case.VZERO_EXTENSION_FREE:
        den = _check(
            "den", (2 * R1A**2 - (R0A + T0) * T1) * (R0D + T0) + 3 * R0B**2 * T1, scale, 3
        )
        return {
            "u": ThermalPolar(
                (3 * R0B**2 * Tg - (R0D + T0) * ((R0A + T0) * Tg - 2 * s * R1A**2 * rho))
                / (4 * den),
                0.5 * R1A * (R0D + T0) * F / den,
            ),
            "v1": ThermalPolar(0.0, -3 / h * R0B * R1A * F / den),
            "v2": zero,
            "w": iso,
        }

    if case is Case.VZERO_WARP_EXTENSION_FREE:
        return {"u": iso, "v1": zero, "v2": zero, "w": iso}

    if case is Case.VZERO_R0_ORTHOTROPIC:
        tau0 = _check(
            "tau0",
            4 * R1A**2 * R1D**2 - 2 * (R1A**2 + R1D**2) * T0 * T1 + (T0**2 - 3 * R0B**2) * T1**2,
            scale, 4,
        )
        tv = -R0B * R1A * R1D * F / tau0
        return {
            "u": ThermalPolar(
                ((T0**2 - 3 * R0B**2) * T1 * Tg + 2 * s * R1A**2 * (2 * R1D**2 - T0 * T1) * rho
                 - 2 * R1D**2 * T0 * Tg) / (4 * tau0),
                -R1A * (T0 * T1 - 2 * R1D**2) * F / (2 * tau0),
            ),
            "v1": ThermalPolar(3 / h * tv, 3 / h * R0B * R1A * T1 * F / tau0),
            "v2": ThermalPolar(h / 4 * tv, h / 4 * R0B * R1D * T1 * F / tau0),
            "w": ThermalPolar(
                ((T0**2 - 3 * R0B**2) * T1 * Tg + 2 * s * R1D**2 * (2 * R1A**2 - T0 * T1) * rho
                 - 2 * R1A**2 * T0 * Tg) / (4 * tau0),
                -R1D * (T0 * T1 - 2 * R1A**2) * F / (2 * tau0),
            ),
        }

    if case is Case.VZERO_ISOTROPIC_EXTENSION:
        den = _check(
            "den", 2 * R1D**2 * T0 + 3 * R0B**2 * T1 - T0 * (R0D + T0) * T1, scale, 3
        )
        return {
            "u": iso,
            "v1": zero,
            "v2": ThermalPolar(0.0, -h / 4 * R0B * R1D * F / den),
            "w": ThermalPolar(
                ((3 * R0B**2 - (R0D + T0) * T0) * Tg + 2 * s * R1D**2 * T0 * rho) / (4 * den),
                0.5 * R1D * T0 * F / den,
            ),
        }

    if case is Case.COUPLED_CROSSPLY:
        den_d = _check("den_d", (R0D + T0) * T1 - 6 * R1B**2, scale, 2)
        den_a = _check("den_a", (R0A + T0) * T1 - 6 * R1B**2, scale, 2)
        return {
            "u": ThermalPolar(((R0D + T0) * Tg - 6 * s * R1B**2 * rho) / (4 * den_d), 0.0),
            "v1": ThermalPolar(0.0, -3 / h * R1B * F / den_d),
            "v2": ThermalPolar(0.0, -h / 4 * R1B * F / den_a),
            "w": ThermalPolar(((R0A + T0) * Tg - 6 * s * R1B**2 * rho) / (4 * den_a), 0.0),
        }

    # Case.COUPLED_ALIGNED
    psi = _check(
        "psi",
        36 * R1B**4
        + 12 * R0B * R1B * (R1A + R1D) * T1
        + 2 * R1A**2 * (2 * R1D**2 - (R0D + T0) * T1)
        - 6 * R1B**2 * (4 * R1A * R1D + (R0A + R0D + 2 * T0) * T1)
        + T1 * ((R0A + T0) * ((R0D + T0) * T1 - 2 * R1D**2) - 3 * R0B**2 * T1),
        scale, 4,
    )
    tv = (
        R0D * R1A * R1B + R0A * R1B * R1D - R0B * (3 * R1B**2 + R1A * R1D)
        + R1B * (R1A + R1D) * T0
    ) * F / psi

    def t_ext(R0X, R1X, R0Y, R1Y):
        # isotropic part of u (X = A, Y = D) or of w (X = D, Y = A)
        return (
            (12 * R0B * R1B * R1Y - 6 * R1B**2 * (T0 + R0Y) - 3 * R0B**2 * T1
             + R0Y * (R0X + T0) * T1 + (R0X + T0) * (T0 * T1 - 2 * R1Y**2)) * Tg
            + 2 * s * (2 * (R1X * R1Y - 3 * R1B**2) ** 2
                       - (R0Y * R1X**2 - 6 * R0B * R1X * R1B + R1X**2 * T0
                          + 3 * R1B**2 * (R0X + T0)) * T1) * rho
        ) / (4 * psi)

    def r_ext(R0X, R1X, R0Y, R1Y):
        return -(6 * R1B**2 * R1Y - 2 * R1X * R1Y**2 - 3 * R0B * R1B * T1
                 + R1X * (R0Y + T0) * T1) * F / (2 * psi)

    return {
        "u": ThermalPolar(t_ext(R0A, R1A, R0D, R1D), r_ext(R0A, R1A, R0D, R1D)),
        "v1": ThermalPolar(
            3 / h * tv,
            3 / h * (6 * R1B**3 + R0B * R1A * T1 - R1B * (2 * R1A * R1D + (R0A + T0) * T1)) * F / psi,
        ),
        "v2": ThermalPolar(
            h / 4 * tv,
            h / 4 * (6 * R1B**3 + R0B * R1D * T1 - R1B * (2 * R1A * R1D + (R0D + T0) * T1)) * F / psi,
        ),
        "w": ThermalPolar(t_ext(R0D, R1D, R0A, R1A), r_ext(R0D, R1D, R0A, R1A)),
    }


def stiffness_from_case_inputs(p: CaseInputs, theta_ref: float = 0.0) -> StiffnessSet:
    """Stiffness set of a (possibly fictitious) identical-ply laminate.

    The tensors are assembled from the signed polar inputs, with the thermal
    tensors tied to the elastic ones as they are for identical plies.
    """

    def tensor(T0, T1, R0, R1):
        return cartesian_from_polar_4(PolarParams4(T0, T1, 0.0, 0.0)) + _aniso4(R0, R1, theta_ref)

    def vec(T, R):
        c, sn = math.cos(2 * theta_ref), math.sin(2 * theta_ref)
        return kelvin_vector(T + R * c, T - R * c, math.sqrt(2.0) * R * sn)

    sr = p.s * p.rho
    return StiffnessSet(
        A=tensor(p.T0, p.T1, p.R0A, p.R1A),
        B=tensor(0.0, 0.0, p.R0B, p.R1B),
        D=tensor(p.T0, p.T1, p.R0D, p.R1D),
        U=vec(p.Tg, sr * p.R1A),
        V=vec(0.0, sr * p.R1B),
        W=vec(p.Tg, sr * p.R1D),
        h=p.h,
    )


def _aniso4(R0: float, R1: float, theta: float) -> np.ndarray:
    # signed moduli: the phase sits on theta (or theta + quarter/half turn if negative)
    c4, s4 = R0 * math.cos(4 * theta), R0 * math.sin(4 * theta)
    c2, s2 = R1 * math.cos(2 * theta), R1 * math.sin(2 * theta)
    r2 = math.sqrt(2.0)
    return np.array(
        [
            [c4 + 4 * c2, -c4, r2 * (s4 + 2 * s2)],
            [-c4, c4 - 4 * c2, r2 * (-s4 + 2 * s2)],
            [r2 * (s4 + 2 * s2), r2 * (-s4 + 2 * s2), -2 * c4],
        ]
    )


@dataclass(frozen=True)
class ShiftAngles:
    """Invariant angle differences and shifts of A and D relative to B."""

    PhiA: float
    PhiB: float
    PhiD: float
    deltaA: float | None
    deltaD: float | None
    phi1B_defined: bool
    thermal_residuals: dict = field(default_factory=dict)


def _angle_residual(p2: PolarParams2, p4: PolarParams4, lam: int) -> float | None:
    if not (p2.phi_defined and p4.phi1_defined):
        return None
    return abs(wrap_angle(p2.Phi - p4.Phi1 - lam * HALF_PI, math.pi))


def shift_angles(s: StiffnessSet, ply: PlyPolar | None = None) -> ShiftAngles:
    """Shift angles plus, for identical plies, the thermal phase residuals.

    The residual for U is ``|Phi_U - Phi1_A - lambda pi/2|`` reduced mod pi
    (likewise V with B and W with D); ``None`` where an angle is undefined.
    """
    pa, pb, pd = s.polar["A"], s.polar["B"], s.polar["D"]
    defined = pb.phi1_defined
    dA = wrap_angle(pa.Phi1 - pb.Phi1, math.pi) if defined and pa.phi1_defined else None
    dD = wrap_angle(pd.Phi1 - pb.Phi1, math.pi) if defined and pd.phi1_defined else None
    res = {}
    if ply is not None:
        for vec, ten in (("U", "A"), ("V", "B"), ("W", "D")):
            res[vec] = _angle_residual(s.polar[vec], s.polar[ten], ply.lam)
    return ShiftAngles(
        pa.angle_difference, pb.angle_difference, pd.angle_difference, dA, dD, defined, res
    )


def reference_angle(s: StiffnessSet) -> float | None:
    """Common frame angle: Phi1 of B, else of A, else of D, else Phi0 of B or A."""
    pol = s.polar
    for key in ("B", "A", "D"):
        if pol[key].phi1_defined:
            return pol[key].Phi1
    for key in ("B", "A", "D"):
        if pol[key].phi0_defined:
            return pol[key].Phi0
    return None


def case_inputs(
    s: StiffnessSet, ply: PlyPolar, theta_ref: float | None = None
) -> tuple[CaseInputs, float]:
    """Signed closed-form inputs of a laminate and the frame angle used."""
    if ply.rho is None:
        raise ValidationError("rho is undefined for square-symmetric plies")
    theta = reference_angle(s) if theta_ref is None else theta_ref
    theta = 0.0 if theta is None else theta
    pol = s.polar

    def r0(key):
        return pol[key].R0 * math.cos(4 * (pol[key].Phi0 - theta))

    def r1(key):
        return pol[key].R1 * math.cos(2 * (pol[key].Phi1 - theta))

    p = CaseInputs(
        T0=pol["A"].T0, T1=pol["A"].T1,
        R0A=r0("A"), R0B=r0("B"), R0D=r0("D"),
        R1A=r1("A"), R1B=r1("B"), R1D=r1("D"),
        Tg=ply.gamma.T, rho=ply.rho, lam=ply.lam, h=s.h,
    )
    return p, theta


def frame_residual(s: StiffnessSet, theta: float) -> float:
    """Largest shear-type (16/26) component of A, B, D in the frame, over T0 + 2 T1."""
    pol = s.polar
    worst = 0.0
    for key in "ABD":
        q = pol[key]
        worst = max(
            worst,
            abs(q.R0 * math.sin(4 * (q.Phi0 - theta))),
            abs(q.R1 * math.sin(2 * (q.Phi1 - theta))),
        )
    return worst / (pol["A"].T0 + 2 * pol["A"].T1)


def satisfied_cases(
    s: StiffnessSet, ply: PlyPolar | None, tol: float = DEFAULT_TOL
) -> tuple[list[Case], bool]:
    """All special cases a laminate conforms to, in priority order, and a k = 1 marker.

    The marker flags any negative signed modulus (k = 1 orthotropy or a
    tensor turned by a right angle), i.e. a variant whose closed form
    differs by signs only.
    """
    if ply is None or ply.rho is None:
        return [], False
    theta = reference_angle(s)
    if theta is None or frame_residual(s, theta) > tol:
        return [], False
    p, _ = case_inputs(s, ply, theta)
    scale = p.T0 + 2 * p.T1
    if np.linalg.norm(s.B) <= tol * np.linalg.norm(s.A):
        return [], False

    def z(x):
        return abs(x) <= tol * scale

    out = []
    if z(p.R1B):
        if z(p.R1A) and z(p.R1D):
            out.append(Case.VZERO_WARP_EXTENSION_FREE)
        if z(p.R0A) and z(p.R1A):
            out.append(Case.VZERO_ISOTROPIC_EXTENSION)
        if z(p.R1A):
            out.append(Case.VZERO_WARP_FREE)
        if z(p.R1D):
            out.append(Case.VZERO_EXTENSION_FREE)
        if z(p.R0A) and z(p.R0D):
            out.append(Case.VZERO_R0_ORTHOTROPIC)
        if z(p.R0A - p.R0D) and z(p.R1A - p.R1D):
            out.append(Case.VZERO_QUASI_HOMOGENEOUS)
        out.append(Case.VZERO_ALIGNED)
    else:
        if z(p.R1A) and z(p.R1D) and z(p.R0B):
            out.append(Case.COUPLED_CROSSPLY)
        out.append(Case.COUPLED_ALIGNED)
    signed = (p.R0A, p.R0B, p.R0D, p.R1A, p.R1B, p.R1D)
    k1 = any(x < 0 and not z(x) for x in signed)
    return out, k1


@dataclass(frozen=True)
class ClassificationReport:
    symmetry: dict
    elastically_coupled: bool
    thermally_uncoupled: bool
    quasi_homogeneous: bool
    thermally_quasi_homogeneous: bool
    tqhcl: bool
    warp_free_stable: bool
    extension_free_stable: bool
    special_case: str | None
    satisfied_cases: list
    k1_variant: bool
    residuals: dict
    tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def thermal_scale(c: ComplianceSet) -> float:
    """Magnitude of the free thermal response, with h making the units agree."""
    h = c.h
    m = max(
        float(np.max(np.abs(c.u))),
        h * float(np.max(np.abs(c.v1))),
        float(np.max(np.abs(c.v2))) / h,
        float(np.max(np.abs(c.w))),
    )
    return m if m > 0 else 1.0


def residuals(s: StiffnessSet, c: ComplianceSet) -> dict[str, float]:
    """Normalized magnitudes of the tensors whose vanishing defines the classes."""
    hp = homogeneity_tensors(s)
    a_norm = float(np.linalg.norm(s.A))
    u_norm = float(np.linalg.norm(s.U)) or 1.0
    ts = thermal_scale(c)
    h = s.h
    return {
        "B": float(np.linalg.norm(s.B)) / a_norm,
        "C": float(np.linalg.norm(hp.C)) / a_norm,
        "V": float(np.linalg.norm(s.V)) / u_norm,
        "Y": float(np.linalg.norm(hp.Y)) / u_norm,
        "v1": h * float(np.linalg.norm(c.v1)) / ts,
        "v2": float(np.linalg.norm(c.v2)) / (h * ts),
    }


def _symmetry_classes(s: StiffnessSet, tol: float) -> dict[str, str]:
    pol = s.polar
    scale = pol["A"].T0 + 2 * pol["A"].T1
    tscale = abs(pol["U"].T) + pol["U"].R
    out = {}
    for key in "ABD":
        out[key] = classify_symmetry(pol[key], tol, scale).value
    for key in "UVW":
        out[key] = classify_symmetry_2(pol[key], tol, tscale).value
    if np.linalg.norm(s.B) <= tol * np.linalg.norm(s.A):
        out["B"] = "null"
    if np.linalg.norm(s.V) <= tol * (np.linalg.norm(s.U) or 1.0):
        out["V"] = "null"
    return out


def classify_tensors(
    s: StiffnessSet,
    c: ComplianceSet | None = None,
    ply: PlyPolar | None = None,
    tol: float = DEFAULT_TOL,
) -> ClassificationReport:
    """Classify a laminate from its tensors.

    ``ply`` (the common ply of an identical-ply laminate) enables the special
    case search; hybrids get ``special_case = None``.
    """
    c = compliance(s) if c is None else c
    res = residuals(s, c)
    coupled = res["B"] > tol
    thermally_uncoupled = res["V"] <= tol and res["v1"] <= tol and res["v2"] <= tol
    qh = res["C"] <= tol
    tqh = res["Y"] <= tol
    cases, k1 = satisfied_cases(s, ply, tol)
    return ClassificationReport(
        symmetry=_symmetry_classes(s, tol),
        elastically_coupled=coupled,
        thermally_uncoupled=thermally_uncoupled,
        quasi_homogeneous=qh,
        thermally_quasi_homogeneous=tqh,
        tqhcl=tqh and (res["v1"] > tol or res["v2"] > tol),
        warp_free_stable=coupled and res["v1"] <= tol,
        extension_free_stable=coupled and res["v2"] <= tol,
        special_case=cases[0].value if cases else None,
        satisfied_cases=[x.value for x in cases],
        k1_variant=k1,
        residuals=res,
        tol=tol,
    )


def classify(lam: Laminate, tol: float = DEFAULT_TOL) -> ClassificationReport:
    s = stiffness_tensors(lam)
    ply = ply_polar(lam.plies[0].material) if lam.identical_plies else None
    return classify_tensors(s, compliance(s), ply, tol)


def closed_form_vs_pipeline(
    s: StiffnessSet, ply: PlyPolar, case: Case | str
) -> dict[str, float]:
    """Relative deviation of a closed form from the numeric compliances.

    Both sides are compared as Kelvin vectors in the laminate frame; each
    deviation is scaled by the free thermal response magnitude.
    """
    p, theta = case_inputs(s, ply)
    cf = closed_form_case(case, p)
    c = compliance(s)
    ts = thermal_scale(c)
    weight = {"u": 1.0, "w": 1.0, "v1": s.h, "v2": 1.0 / s.h}
    out = {}
    for key, tp in cf.items():
        got = cartesian_from_polar_2(tp.polar(theta))
        out[key] = weight[key] * float(np.max(np.abs(got - getattr(c, key)))) / ts
    return out
