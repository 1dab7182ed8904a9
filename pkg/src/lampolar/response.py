"""Deformation under mechanical and thermal loads, and curvature geometry.

Sign convention for shapes: a positive curvature component bends the plate
downwards, ``z = -(k1 x^2 + k2 y^2 + sqrt(2) k6 x y) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compliance import ComplianceSet
from .laminate import StiffnessSet
from .polar import (
    SQRT2,
    PolarParams2,
    PolarParams4,
    PolarParamsB9,
    cartesian_from_polar_2,
    cartesian_from_polar_4,
    cartesian_from_polar_b,
)


@dataclass(frozen=True)
class ThermalLoad:
    """Uniform temperature change ``t`` (°C) and through-thickness gradient ``grad_t`` (°C/mm)."""

    t: float = 0.0
    grad_t: float = 0.0


@dataclass(frozen=True)
class Response:
    eps: np.ndarray
    kappa: np.ndarray
    K_gauss: float
    H_mean: float
    kappa_I: float
    kappa_II: float

    def to_dict(self) -> dict:
        return {
            "eps": self.eps.tolist(),
            "kappa": self.kappa.tolist(),
            "K_gauss": self.K_gauss,
            "H_mean": self.H_mean,
            "kappa_I": self.kappa_I,
            "kappa_II": self.kappa_II,
        }


def curvature_tensor(kappa: np.ndarray) -> np.ndarray:
    """2x2 curvature tensor from its Kelvin vector."""
    k1, k2, k6 = kappa
    return np.array([[k1, k6 / SQRT2], [k6 / SQRT2, k2]])


def curvature_geometry(kappa: np.ndarray) -> tuple[float, float, float, float]:
    """Principal curvatures (descending), Gaussian and mean curvature."""
    k1, k2, k6 = (float(x) for x in kappa)
    mean = 0.5 * (k1 + k2)
    radius = math.hypot(0.5 * (k1 - k2), k6 / SQRT2)
    kI, kII = mean + radius, mean - radius
    gauss = k1 * k2 - 0.5 * k6 * k6
    return kI, kII, gauss, mean


def _vec(x) -> np.ndarray:
    v = np.zeros(3) if x is None else np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError("force and moment resultants must have three Kelvin components")
    return v


def deform(
    s: StiffnessSet,
    c: ComplianceSet,
    N=None,
    M=None,
    load: ThermalLoad = ThermalLoad(),
) -> Response:
    """Midplane strain and curvature from resultants and a thermal load.

    ``N`` (N/mm) and ``M`` (N) are Kelvin vectors; ``None`` means zero.
    """
    N, M = _vec(N), _vec(M)
    h = s.h
    eps = c.a @ N / h + 2.0 / h**2 * c.b @ M + load.t * c.u + load.grad_t * c.v2
    kappa = 2.0 / h**2 * c.b.T @ N + 12.0 / h**3 * c.d @ M + load.t * c.v1 + load.grad_t * c.w
    kI, kII, gauss, mean = curvature_geometry(kappa)
    return Response(eps, kappa, gauss, mean, kI, kII)


def internal_actions(
    s: StiffnessSet, eps, kappa, load: ThermalLoad = ThermalLoad()
) -> tuple[np.ndarray, np.ndarray]:
    """Resultants (N, M) produced by a given strain, curvature and thermal load."""
    eps, kappa = _vec(eps), _vec(kappa)
    h = s.h
    N = h * s.A @ eps + 0.5 * h**2 * s.B @ kappa - load.t * h * s.U - load.grad_t * 0.5 * h**2 * s.V
    M = (
        0.5 * h**2 * s.B @ eps
        + h**3 / 12.0 * s.D @ kappa
        - load.t * 0.5 * h**2 * s.V
        - load.grad_t * h**3 / 12.0 * s.W
    )
    return N, M


def surface_height(kappa, x, y):
    k1, k2, k6 = (float(v) for v in kappa)
    return -0.5 * (k1 * x * x + k2 * y * y + SQRT2 * k6 * x * y)


def surface_sample(
    resp: Response | np.ndarray, side_x: float, side_y: float, grid: int
) -> np.ndarray:
    """Height field over the centered ``side_x`` x ``side_y`` rectangle.

    Returns an array of rows ``(x, y, z)`` in mm, ``grid`` points per side,
    x varying fastest.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    if side_x <= 0 or side_y <= 0:
        raise ValueError("plate sides must be positive")
    kappa = resp.kappa if isinstance(resp, Response) else np.asarray(resp, dtype=float)
    xs = np.linspace(-0.5 * side_x, 0.5 * side_x, grid)
    ys = np.linspace(-0.5 * side_y, 0.5 * side_y, grid)
    X, Y = np.meshgrid(xs, ys)
    Z = surface_height(kappa, X, Y)
    return np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])


def polar_diagram(
    p: PolarParams4 | PolarParamsB9 | PolarParams2, component: str, step_deg: float = 1.0
) -> np.ndarray:
    """Rows ``(theta_deg, value)`` of one Kelvin component over a full turn.

    ``component`` is one of 11, 12, 16, 22, 26, 66 for 4th-rank tensors (plus
    21, 61, 62 without major symmetry) and 1, 2, 6 for vectors. Values are
    Kelvin components, including the sqrt(2) and 2 factors.
    """
    if not step_deg > 0:
        raise ValueError("step must be positive")
    count = int(round(360.0 / step_deg))
    if abs(count * step_deg - 360.0) > 1e-9:
        raise ValueError("step must divide 360 degrees")
    thetas = np.arange(count) * step_deg
    if isinstance(p, (PolarParams4, PolarParamsB9)):
        idx = {"11": (0, 0), "12": (0, 1), "16": (0, 2), "22": (1, 1), "26": (1, 2), "66": (2, 2)}
        conv = cartesian_from_polar_4
        if isinstance(p, PolarParamsB9):
            idx.update({"21": (1, 0), "61": (2, 0), "62": (2, 1)})
            conv = cartesian_from_polar_b
        if component not in idx:
            raise ValueError(f"unknown component {component!r} (use one of {', '.join(idx)})")
        i, j = idx[component]
        vals = [conv(p, math.radians(t))[i, j] for t in thetas]
    else:
        idx = {"1": 0, "2": 1, "6": 2}
        if component not in idx:
            raise ValueError(f"unknown component {component!r} (use one of 1, 2, 6)")
        vals = [cartesian_from_polar_2(p, math.radians(t))[idx[component]] for t in thetas]
    return np.column_stack([thetas, vals])
