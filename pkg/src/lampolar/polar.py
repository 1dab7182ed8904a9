"""Polar representation of plane tensors in Kelvin notation.

Kelvin convention used throughout: a symmetric 2nd-rank tensor ``L`` is the
vector ``(L11, L22, sqrt(2) L12)`` and a 4th-rank elastic-type tensor is the
3x3 matrix with ``sqrt(2)`` on the 16/26 entries and ``2`` on the 66 entry.
All angles are radians.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)

# Moduli below this fraction of the component scale have no defined angle.
_UNDEFINED_ANGLE_EPS = 1e-13

DEFAULT_TOL = 1e-6


def kelvin_matrix(m11, m12, m16, m22, m26, m66) -> np.ndarray:
    """Symmetric Kelvin matrix from its six independent entries."""
    return np.array(
        [[m11, m12, m16], [m12, m22, m26], [m16, m26, m66]], dtype=float
    )


def kelvin_matrix_asym(m11, m12, m16, m21, m22, m26, m61, m62, m66) -> np.ndarray:
    return np.array(
        [[m11, m12, m16], [m21, m22, m26], [m61, m62, m66]], dtype=float
    )


def kelvin_vector(v1, v2, v6) -> np.ndarray:
    return np.array([v1, v2, v6], dtype=float)


def kelvin_rotation(theta: float) -> np.ndarray:
    """Orthogonal 3x3 map giving Kelvin components in a frame turned by ``theta``.

    A vector transforms as ``K @ v`` and a 4th-rank matrix as ``K @ M @ K.T``.
    Rotating a tensor by ``delta`` is therefore ``kelvin_rotation(-delta)``.
    """
    c, s = math.cos(theta), math.sin(theta)
    # exact zeros at multiples of a right angle keep 0/90 stacks free of shear noise
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    return np.array(
        [
            [c * c, s * s, SQRT2 * c * s],
            [s * s, c * c, -SQRT2 * c * s],
            [-SQRT2 * c * s, SQRT2 * c * s, c * c - s * s],
        ]
    )


def wrap_angle(angle: float, period: float) -> float:
    """Reduce ``angle`` into the half-open interval (-period/2, period/2]."""
    half = 0.5 * period
    r = math.fmod(angle + half, period)
    if r <= 0.0:
        r += period
    return r - half


def _angle_of(x: float, y: float, order: int, scale: float) -> tuple[float, float, bool]:
    """Modulus and angle of ``x + i y = R exp(i order Phi)``."""
    r = math.hypot(x, y)
    if r <= _UNDEFINED_ANGLE_EPS * scale or r == 0.0:
        return r, 0.0, False
    return r, math.atan2(y, x) / order, True


def _normalize_pair(phi0: float, phi1: float) -> tuple[float, float]:
    phi1 = wrap_angle(phi1, math.pi)
    phi0 = phi1 + wrap_angle(phi0 - phi1, 0.5 * math.pi)
    return phi0, phi1


@dataclass(frozen=True)
class PolarParams4:
    """Polar parameters of a plane elastic-type tensor.

    ``Phi0`` is only defined modulo pi/2 and ``Phi1`` modulo pi; they are
    stored with ``Phi1`` in (-pi/2, pi/2] and ``Phi0 - Phi1`` in (-pi/4, pi/4].
    """

    T0: float
    T1: float
    R0: float
    R1: float
    Phi0: float = 0.0
    Phi1: float = 0.0
    phi0_defined: bool = True
    phi1_defined: bool = True

    def __post_init__(self):
        if self.R0 < 0 or self.R1 < 0:
            raise ValueError("polar moduli R0, R1 must be non-negative")
        phi0, phi1 = _normalize_pair(self.Phi0, self.Phi1)
        object.__setattr__(self, "Phi0", phi0)
        object.__setattr__(self, "Phi1", phi1)

    @property
    def angle_difference(self) -> float:
        """The invariant ``Phi0 - Phi1`` in (-pi/4, pi/4]."""
        return self.Phi0 - self.Phi1

    def rotated(self, delta: float) -> "PolarParams4":
        return PolarParams4(
            self.T0, self.T1, self.R0, self.R1,
            self.Phi0 + delta, self.Phi1 + delta,
            self.phi0_defined, self.phi1_defined,
        )

    def cartesian(self, theta: float = 0.0) -> np.ndarray:
        return cartesian_from_polar_4(self, theta)


@dataclass(frozen=True)
class PolarParams2:
    """Polar parameters ``(T, R, Phi)`` of a symmetric 2nd-rank tensor."""

    T: float
    R: float
    Phi: float = 0.0
    phi_defined: bool = True

    def __post_init__(self):
        if self.R < 0:
            raise ValueError("polar modulus R must be non-negative")
        object.__setattr__(self, "Phi", wrap_angle(self.Phi, math.pi))

    def rotated(self, delta: float) -> "PolarParams2":
        return PolarParams2(self.T, self.R, self.Phi + delta, self.phi_defined)

    def cartesian(self, theta: float = 0.0) -> np.ndarray:
        return cartesian_from_polar_2(self, theta)


@dataclass(frozen=True)
class PolarParamsB9:
    """Nine polar parameters of a plane tensor without major symmetry."""

    t0: float
    t1: float
    t3: float
    r0: float
    r1: float
    r2: float
    phi0: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    phi0_defined: bool = True
    phi1_defined: bool = True
    phi2_defined: bool = True

    def __post_init__(self):
        if min(self.r0, self.r1, self.r2) < 0:
            raise ValueError("polar moduli r0, r1, r2 must be non-negative")
        phi0, phi1 = _normalize_pair(self.phi0, self.phi1)
        object.__setattr__(self, "phi0", phi0)
        object.__setattr__(self, "phi1", phi1)
        object.__setattr__(self, "phi2", wrap_angle(self.phi2, math.pi))

    def rotated(self, delta: float) -> "PolarParamsB9":
        return PolarParamsB9(
            self.t0, self.t1, self.t3, self.r0, self.r1, self.r2,
            self.phi0 + delta, self.phi1 + delta, self.phi2 + delta,
            self.phi0_defined, self.phi1_defined, self.phi2_defined,
        )

    def cartesian(self, theta: float = 0.0) -> np.ndarray:
        return cartesian_from_polar_b(self, theta)

    def is_major_symmetric(self, tol: float = DEFAULT_TOL) -> bool:
        scale = max(abs(self.t0) + 2 * abs(self.t1), self.r0, self.r1, self.r2, 1e-300)
        m = self.cartesian(0.0)
        return bool(np.max(np.abs(m - m.T)) <= tol * scale)

    def to_polar4(self) -> PolarParams4:
        """Collapse to the 6-parameter form (valid for a major-symmetric tensor)."""
        return PolarParams4(
            self.t0, self.t1, self.r0, self.r1, self.phi0, self.phi1,
            self.phi0_defined, self.phi1_defined,
        )


class SymmetryClass(str, enum.Enum):
    GENERIC_ANISOTROPIC = "generic_anisotropic"
    ORTHOTROPIC_K0 = "ordinary_orthotropic_k0"
    ORTHOTROPIC_K1 = "ordinary_orthotropic_k1"
    R0_ORTHOTROPIC = "r0_orthotropic"
    SQUARE_SYMMETRIC = "square_symmetric"
    ISOTROPIC = "isotropic"
    ANISOTROPIC_2 = "anisotropic"
    ISOTROPIC_2 = "isotropic_2nd_rank"


def polar_from_cartesian_4(m: np.ndarray) -> PolarParams4:
    m = np.asarray(m, dtype=float)
    m11, m12, m16 = m[0]
    m22, m26, m66 = m[1, 1], m[1, 2], m[2, 2]
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    T0 = (m11 + m22 - 2.0 * m12 + 2.0 * m66) / 8.0
    T1 = (m11 + m22 + 2.0 * m12) / 8.0
    R0, Phi0, d0 = _angle_of(
        (m11 + m22 - 2.0 * m12 - 2.0 * m66) / 8.0, (m16 - m26) / (2.0 * SQRT2), 4, scale
    )
    R1, Phi1, d1 = _angle_of((m11 - m22) / 8.0, (m16 + m26) / (4.0 * SQRT2), 2, scale)
    return PolarParams4(T0, T1, R0, R1, Phi0, Phi1, d0, d1)


def cartesian_from_polar_4(p: PolarParams4, theta: float = 0.0) -> np.ndarray:
    a4 = 4.0 * (p.Phi0 - theta)
    a2 = 2.0 * (p.Phi1 - theta)
    c4, s4 = p.R0 * math.cos(a4), p.R0 * math.sin(a4)
    c2, s2 = p.R1 * math.cos(a2), p.R1 * math.sin(a2)
    iso = p.T0 + 2.0 * p.T1
    return kelvin_matrix(
        iso + c4 + 4.0 * c2,
        -p.T0 + 2.0 * p.T1 - c4,
        SQRT2 * (s4 + 2.0 * s2),
        iso + c4 - 4.0 * c2,
        SQRT2 * (-s4 + 2.0 * s2),
        2.0 * (p.T0 - c4),
    )


def polar_from_cartesian_2(v: np.ndarray) -> PolarParams2:
    v1, v2, v6 = (float(x) for x in v)
    scale = max(abs(v1), abs(v2), abs(v6))
    R, Phi, defined = _angle_of(0.5 * (v1 - v2), v6 / SQRT2, 2, scale)
    return PolarParams2(0.5 * (v1 + v2), R, Phi, defined)


def cartesian_from_polar_2(p: PolarParams2, theta: float = 0.0) -> np.ndarray:
    a = 2.0 * (p.Phi - theta)
    return kelvin_vector(
        p.T + p.R * math.cos(a), p.T - p.R * math.cos(a), SQRT2 * p.R * math.sin(a)
    )


def polar_from_cartesian_b(m: np.ndarray) -> PolarParamsB9:
    m = np.asarray(m, dtype=float)
    b11, b12, b16 = m[0]
    b21, b22, b26 = m[1]
    b61, b62, b66 = m[2]
    scale = float(np.max(np.abs(m)))
    x16, x26, x61, x62 = (b / SQRT2 for b in (b16, b26, b61, b62))
    t1 = (b11 + b22 + b12 + b21) / 8.0
    iso_plus = (b11 + b22 - b12 - b21) / 4.0
    t0 = 0.5 * (iso_plus + 0.5 * b66)
    t3 = (x26 - x16 + x61 - x62) / 4.0
    r0, phi0, d0 = _angle_of(0.5 * (iso_plus - 0.5 * b66), (x61 - x62 - x26 + x16) / 4.0, 4, scale)
    r1, phi1, d1 = _angle_of((b11 - b22 + b12 - b21) / 8.0, (x61 + x62) / 4.0, 2, scale)
    r2, phi2, d2 = _angle_of((b11 - b22 - b12 + b21) / 8.0, (x16 + x26) / 4.0, 2, scale)
    return PolarParamsB9(t0, t1, t3, r0, r1, r2, phi0, phi1, phi2, d0, d1, d2)


def cartesian_from_polar_b(p: PolarParamsB9, theta: float = 0.0) -> np.ndarray:
    a0 = 4.0 * (p.phi0 - theta)
    a1 = 2.0 * (p.phi1 - theta)
    a2 = 2.0 * (p.phi2 - theta)
    c0, s0 = p.r0 * math.cos(a0), p.r0 * math.sin(a0)
    c1, s1 = p.r1 * math.cos(a1), p.r1 * math.sin(a1)
    c2, s2 = p.r2 * math.cos(a2), p.r2 * math.sin(a2)
    iso = p.t0 + 2.0 * p.t1
    return kelvin_matrix_asym(
        iso + c0 + 2.0 * c1 + 2.0 * c2,
        -p.t0 + 2.0 * p.t1 - c0 + 2.0 * c1 - 2.0 * c2,
        SQRT2 * (-p.t3 + s0 + 2.0 * s2),
        -p.t0 + 2.0 * p.t1 - c0 - 2.0 * c1 + 2.0 * c2,
        iso + c0 - 2.0 * c1 - 2.0 * c2,
        SQRT2 * (p.t3 - s0 + 2.0 * s2),
        SQRT2 * (p.t3 + s0 + 2.0 * s1),
        SQRT2 * (-p.t3 - s0 + 2.0 * s1),
        2.0 * (p.t0 - c0),
    )


def polar_of(x: np.ndarray):
    """Polar parameters of a Kelvin vector, symmetric or asymmetric matrix."""
    x = np.asarray(x, dtype=float)
    if x.shape == (3,):
        return polar_from_cartesian_2(x)
    if np.allclose(x, x.T, rtol=0.0, atol=1e-14 * max(float(np.max(np.abs(x))), 1e-300)):
        return polar_from_cartesian_4(x)
    return polar_from_cartesian_b(x)


def rotate(p, delta: float):
    """Rotate a tensor given by its polar parameters by ``delta``."""
    return p.rotated(delta)


def in_frame(p, theta_ref: float):
    """Express polar parameters in a frame whose x1 axis sits at ``theta_ref``."""
    return p.rotated(-theta_ref)


def classify_symmetry(p: PolarParams4, tol: float = DEFAULT_TOL, scale: float | None = None) -> SymmetryClass:
    """Most special symmetry class of a 4th-rank elastic-type tensor.

    Moduli are compared against ``tol * scale`` with ``scale = T0 + 2 T1``
    unless an explicit scale is given (needed for purely anisotropic
    tensors such as the coupling stiffness of identical-ply laminates).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if scale is None:
        scale = p.T0 + 2.0 * p.T1
        if scale <= 0:
            raise ValueError("T0 + 2 T1 must be positive to normalize the moduli")
    r0_zero = p.R0 <= tol * scale
    r1_zero = p.R1 <= tol * scale
    if r0_zero and r1_zero:
        return SymmetryClass.ISOTROPIC
    if r1_zero:
        return SymmetryClass.SQUARE_SYMMETRIC
    if r0_zero:
        return SymmetryClass.R0_ORTHOTROPIC
    d = abs(p.angle_difference)
    if d <= tol:
        return SymmetryClass.ORTHOTROPIC_K0
    if 0.25 * math.pi - d <= tol:
        return SymmetryClass.ORTHOTROPIC_K1
    return SymmetryClass.GENERIC_ANISOTROPIC


def classify_symmetry_2(p: PolarParams2, tol: float = DEFAULT_TOL, scale: float | None = None) -> SymmetryClass:
    if scale is None:
        scale = abs(p.T) + p.R
    if p.R <= tol * scale:
        return SymmetryClass.ISOTROPIC_2
    return SymmetryClass.ANISOTROPIC_2
