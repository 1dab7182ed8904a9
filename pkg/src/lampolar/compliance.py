"""Inversion of the laminate constitutive law.

The thickness prefactors of the constitutive law are applied here; the
stored stiffness tensors stay h-normalized.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import SingularBlockError
from .laminate import StiffnessSet
from .polar import polar_from_cartesian_2, polar_from_cartesian_4, polar_from_cartesian_b

_DET_EPS = 1e-30


def inv3(m: np.ndarray, block: str = "matrix") -> np.ndarray:
    """Inverse of a 3x3 matrix by its adjugate.

    Raises :class:`SingularBlockError` when ``|det| <= 1e-30 * scale**3``.
    """
    m = np.asarray(m, dtype=float)
    cof = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = m[r[0], c[0]] * m[r[1], c[1]] - m[r[0], c[1]] * m[r[1], c[0]]
            cof[i, j] = minor if (i + j) % 2 == 0 else -minor
    det = float(m[0] @ cof[0])
    scale = float(np.max(np.abs(m)))
    if not np.isfinite(det) or abs(det) <= _DET_EPS * scale**3 or scale == 0.0:
        raise SingularBlockError(block, det)
    return cof.T / det


@dataclass(frozen=True)
class ComplianceSet:
    """Elastic compliances a, b, d (1/MPa) and thermal compliances.

    Units: u, w in 1/°C; v1 in 1/(°C mm); v2 in mm/°C.
    """

    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    u: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    w: np.ndarray
    h: float

    @cached_property
    def polar(self) -> dict:
        return {
            "a": polar_from_cartesian_4(self.a),
            "b": polar_from_cartesian_b(self.b),
            "d": polar_from_cartesian_4(self.d),
            "u": polar_from_cartesian_2(self.u),
            "v1": polar_from_cartesian_2(self.v1),
            "v2": polar_from_cartesian_2(self.v2),
            "w": polar_from_cartesian_2(self.w),
        }

    def tensors(self) -> dict[str, np.ndarray]:
        return {
            "a": self.a, "b": self.b, "d": self.d,
            "u": self.u, "v1": self.v1, "v2": self.v2, "w": self.w,
        }


def compliance_elastic(s: StiffnessSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """a, b, d from the Schur complements of the stiffness blocks."""
    Ainv = inv3(s.A, "A")
    Dinv = inv3(s.D, "D")
    a = inv3(s.A - 3.0 * s.B @ Dinv @ s.B, "A - 3 B D^-1 B")
    d = inv3(s.D - 3.0 * s.B @ Ainv @ s.B, "D - 3 B A^-1 B")
    b = -3.0 * a @ s.B @ Dinv
    return a, b, d


def compliance_thermal(
    s: StiffnessSet, a: np.ndarray, b: np.ndarray, d: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    h = s.h
    u = a @ s.U + b @ s.V
    v1 = (2.0 / h) * (b.T @ s.U + 3.0 * d @ s.V)
    v2 = (h / 6.0) * (3.0 * a @ s.V + b @ s.W)
    w = b.T @ s.V + d @ s.W
    return u, v1, v2, w


def compliance_thermal_alt(
    s: StiffnessSet, a: np.ndarray, b: np.ndarray, d: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Second form of the thermal compliances, through A^-1 and D^-1."""
    h = s.h
    Ainv = inv3(s.A, "A")
    Dinv = inv3(s.D, "D")
    u = a @ (s.U - 3.0 * s.B @ Dinv @ s.V)
    w = d @ (s.W - 3.0 * s.B @ Ainv @ s.V)
    v1 = (6.0 / h) * d @ (s.V - s.B @ Ainv @ s.U)
    v2 = (h / 2.0) * a @ (s.V - s.B @ Dinv @ s.W)
    return u, v1, v2, w


def v2_identity(s: StiffnessSet, c: ComplianceSet) -> np.ndarray:
    """v2 rebuilt from v1; equals ``c.v2`` for every laminate."""
    h = s.h
    rhs = inv3(c.d, "d") @ c.v1 + (6.0 / h) * s.B @ (
        inv3(s.A, "A") @ s.U - inv3(s.D, "D") @ s.W
    )
    return (h * h / 12.0) * c.a @ rhs


def compliance(s: StiffnessSet) -> ComplianceSet:
    a, b, d = compliance_elastic(s)
    u, v1, v2, w = compliance_thermal(s, a, b, d)
    return ComplianceSet(a, b, d, u, v1, v2, w, s.h)


@dataclass(frozen=True)
class OracleResult:
    stiffness: np.ndarray
    inverse: np.ndarray
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    u: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    w: np.ndarray


def full_stiffness_matrix(s: StiffnessSet) -> np.ndarray:
    """The 6x6 matrix mapping (eps, kappa) to (N, M)."""
    h = s.h
    return np.block(
        [[h * s.A, 0.5 * h * h * s.B], [0.5 * h * h * s.B, h**3 / 12.0 * s.D]]
    )


def full_inverse_oracle(s: StiffnessSet) -> OracleResult:
    """Compliances by dense inversion and direct solves of the 6x6 system."""
    h = s.h
    K = full_stiffness_matrix(s)
    try:
        Kinv = np.linalg.inv(K)
        free_t = np.linalg.solve(K, np.concatenate([h * s.U, 0.5 * h * h * s.V]))
        free_g = np.linalg.solve(K, np.concatenate([0.5 * h * h * s.V, h**3 / 12.0 * s.W]))
    except np.linalg.LinAlgError:
        raise SingularBlockError("6x6 stiffness", 0.0) from None
    return OracleResult(
        stiffness=K,
        inverse=Kinv,
        a=h * Kinv[:3, :3],
        b=0.5 * h * h * Kinv[:3, 3:],
        d=h**3 / 12.0 * Kinv[3:, 3:],
        u=free_t[:3],
        v1=free_t[3:],
        v2=free_g[:3],
        w=free_g[3:],
    )


def _rel(x: np.ndarray, y: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(y))), float(np.max(np.abs(x))))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(x - y))) / scale


def oracle_deviation(s: StiffnessSet, c: ComplianceSet | None = None) -> dict[str, float]:
    """Relative deviation of each block-formula compliance from the dense oracle.

    Thermal tensors are compared on the scale of the whole thermal response
    (``u`` for strains, ``w`` for curvatures, with h making units agree), so a
    tensor that is zero up to round-off does not produce a spurious ratio.
    """
    c = compliance(s) if c is None else c
    o = full_inverse_oracle(s)
    h = s.h
    out = {k: _rel(getattr(c, k), getattr(o, k)) for k in ("a", "b", "d")}
    therm = max(
        float(np.max(np.abs(o.u))),
        h * float(np.max(np.abs(o.v1))),
        float(np.max(np.abs(o.v2))) / h,
        float(np.max(np.abs(o.w))),
    )
    therm = therm if therm > 0 else 1.0
    out["u"] = float(np.max(np.abs(c.u - o.u))) / therm
    out["w"] = float(np.max(np.abs(c.w - o.w))) / therm
    out["v1"] = h * float(np.max(np.abs(c.v1 - o.v1))) / therm
    out["v2"] = float(np.max(np.abs(c.v2 - o.v2))) / (h * therm)
    return out
