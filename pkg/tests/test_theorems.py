"""Invariant sweep over 1000 randomized identical-ply laminates."""

import math

import numpy as np
import pytest

from lampolar.classification import shift_angles
from lampolar.compliance import compliance, oracle_deviation, v2_identity
from lampolar.laminate import (
    Laminate,
    homogeneity_tensors,
    polar_homogenize,
    stiffness_tensors,
)
from lampolar.material import ply_polar
from lampolar.report import two_route_deviation
from lampolar.search import SearchSpec, enumerate_indices

from conftest import max_rel, random_angles, random_material

N_LAMINATES = 1000


@pytest.fixture(scope="module")
def sweep():
    """(laminate, ply polar, stiffness, compliance) for 1000 random stacks."""
    rng = np.random.default_rng(2024)
    out = []
    for i in range(N_LAMINATES):
        mat = random_material(rng)
        n = int(rng.integers(2, 17))
        angles = random_angles(rng, n, discrete=bool(i % 4 == 0))
        lam = Laminate.from_angles(mat, angles, ply_thickness=float(rng.uniform(0.05, 0.5)))
        s = stiffness_tensors(lam)
        out.append((lam, ply_polar(mat), s, compliance(s)))
    return out


@pytest.fixture(scope="module")
def quasi_homogeneous():
    """Coupled quasi-homogeneous stacks (exact C = O) on random materials and frames."""
    seqs = []
    for n, ors in ((8, (0.0, 90.0, 45.0, -45.0)), (12, (0.0, 90.0))):
        spec = SearchSpec(n, ors, {"C_zero", "B_nonzero"}, max_results=60)
        seqs += [[ors[k] for k in idx] for idx in enumerate_indices(spec)]
    assert len(seqs) >= 60
    rng = np.random.default_rng(7)
    out = []
    for seq in seqs:
        mat = random_material(rng)
        offset = float(rng.uniform(-90, 90))
        lam = Laminate.from_angles(mat, [a + offset for a in seq])
        s = stiffness_tensors(lam)
        out.append((lam, s, compliance(s)))
    return out


def test_two_route_homogenization(sweep):
    worst = max(two_route_deviation(s, polar_homogenize(lam)) for lam, _, s, _ in sweep)
    assert worst < 1e-10


def test_block_inverse_matches_dense(sweep):
    worst = max(max(oracle_deviation(s, c).values()) for _, _, s, c in sweep)
    assert worst < 1e-9


def test_v2_identity(sweep):
    for _, _, s, c in sweep:
        scale = max(np.max(np.abs(c.v2)), np.max(np.abs(c.u)) * s.h)
        assert np.max(np.abs(v2_identity(s, c) - c.v2)) < 1e-9 * scale


def test_rho_ratios(sweep):
    for _, ply, s, _ in sweep:
        scale = abs(ply.rho) * s.polar["A"].T0
        for vec, ten in (("U", "A"), ("V", "B"), ("W", "D")):
            assert abs(s.polar[vec].R - abs(ply.rho) * s.polar[ten].R1) < 1e-10 * scale


def test_thermal_isotropic_parts(sweep):
    for _, ply, s, _ in sweep:
        tg = ply.gamma.T
        assert s.polar["U"].T == pytest.approx(tg, rel=1e-10)
        assert s.polar["W"].T == pytest.approx(tg, rel=1e-10)
        assert abs(s.polar["V"].T) < 1e-10 * abs(tg)


def test_thermal_angle_relations(sweep):
    checked = 0
    for _, ply, s, _ in sweep:
        res = shift_angles(s, ply).thermal_residuals
        for key, ten in (("U", "A"), ("V", "B"), ("W", "D")):
            # the angle is well conditioned only away from a vanishing modulus
            if s.polar[ten].R1 > 1e-6 * s.polar["A"].T0:
                assert res[key] is not None and res[key] < 1e-10
                checked += 1
    assert checked > 2000


def test_quasi_homogeneous_implications(quasi_homogeneous):
    for lam, s, c in quasi_homogeneous:
        hp = homogeneity_tensors(s)
        a_scale = np.max(np.abs(s.A))
        assert np.max(np.abs(hp.C)) < 1e-12 * a_scale
        assert np.max(np.abs(hp.Y)) < 1e-12 * np.max(np.abs(s.U))
        assert np.max(np.abs(s.B)) > 1e-3 * a_scale
        assert max_rel(c.a, c.d) < 1e-9
        assert max_rel(c.b, c.b.T, np.max(np.abs(c.b))) < 1e-9
        assert max_rel(c.u, c.w) < 1e-9


def test_thermal_isotropic_parts_ratio(sweep):
    checked = 0
    for _, _, s, c in sweep:
        t1, t2 = c.polar["v1"].T, c.polar["v2"].T
        if abs(t1) * s.h > 1e-6 * np.max(np.abs(c.u)):
            assert t2 / t1 == pytest.approx(s.h**2 / 12, rel=1e-9)
            checked += 1
    assert checked > 100


def test_rari_constant_coupling(sweep):
    for _, _, s, _ in sweep:
        scale = max(np.max(np.abs(s.A)), 1.0)
        assert abs(s.B[0, 1] - s.B[2, 2] / 2) < 1e-12 * scale


def test_reversal_negates_coupling(sweep):
    for lam, _, s, _ in sweep[:300]:
        r = stiffness_tensors(lam.reversed())
        a_scale, u_scale = np.max(np.abs(s.A)), np.max(np.abs(s.U))
        assert np.max(np.abs(r.B + s.B)) < 1e-12 * a_scale
        assert np.max(np.abs(r.V + s.V)) < 1e-12 * u_scale
        for k in "AD":
            assert np.max(np.abs(getattr(r, k) - getattr(s, k))) < 1e-12 * a_scale
        for k in "UW":
            assert np.max(np.abs(getattr(r, k) - getattr(s, k))) < 1e-12 * u_scale
