import itertools

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lampolar.compliance import (
    compliance,
    compliance_elastic,
    compliance_thermal,
    compliance_thermal_alt,
    full_inverse_oracle,
    full_stiffness_matrix,
    inv3,
    oracle_deviation,
    v2_identity,
)
from lampolar.errors import SingularBlockError
from lampolar.laminate import Laminate, Ply, StiffnessSet, exact_sum, stiffness_tensors
from lampolar.material import ply_polar

from conftest import LAMINATES, max_rel, random_angles, random_material


def _random_laminate(seed, n, hybrid=False):
    rng = np.random.default_rng(seed)
    if not hybrid:
        return Laminate.from_angles(random_material(rng), random_angles(rng, n))
    mats = [random_material(rng) for _ in range(2)]
    return Laminate(tuple(Ply(mats[k % 2], np.radians(a)) for k, a in enumerate(random_angles(rng, n))))


def test_inv3_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m = rng.normal(size=(3, 3))
        np.testing.assert_allclose(inv3(m), np.linalg.inv(m), rtol=1e-10, atol=1e-12)


def test_inv3_singular_names_block():
    with pytest.raises(SingularBlockError) as info:
        inv3(np.ones((3, 3)), "A")
    assert info.value.block == "A"
    assert "A" in str(info.value)
    with pytest.raises(SingularBlockError):
        inv3(np.zeros((3, 3)))


def test_singular_stiffness_raises():
    z = np.zeros((3, 3))
    s = StiffnessSet(z, z, np.eye(3), np.zeros(3), np.zeros(3), np.zeros(3), 1.0)
    with pytest.raises(SingularBlockError):
        compliance(s)
    with pytest.raises(SingularBlockError):
        full_inverse_oracle(s)


def test_first_laminate_values(first):
    _, _, c = first
    assert c.a[0, 0] == pytest.approx(2.59e-5, rel=1e-2)
    assert c.b[0, 0] == pytest.approx(3.47e-5, rel=1e-2)
    np.testing.assert_allclose(c.u, [5.21e-4, 5.21e-4, 0], rtol=1e-2, atol=1e-15)
    np.testing.assert_allclose(c.v1, [1.14e-3, -1.14e-3, 0], rtol=1e-2, atol=1e-15)
    np.testing.assert_allclose(c.v2, [2.13e-4, -2.13e-4, 0], rtol=1e-2, atol=1e-15)
    pa = c.polar["a"]
    assert pa.T0 == pytest.approx(2.41e-5, rel=1e-2)
    assert pa.T1 == pytest.approx(6.28e-6, rel=1e-2)
    assert pa.R0 == pytest.approx(1.08e-5, rel=1e-2)


def test_second_laminate_values(second):
    _, _, c = second
    np.testing.assert_allclose(c.u, [1.54e-4, 1.54e-4, 0], rtol=1e-2, atol=1e-15)
    np.testing.assert_allclose(c.w, c.u, rtol=1e-12, atol=1e-18)
    assert c.polar["v1"].R == pytest.approx(5.11e-5, rel=1e-2)
    assert c.polar["v2"].R == pytest.approx(9.59e-6, rel=1e-2)
    # the coupling compliance of this laminate is an order of magnitude below the first one
    assert c.b[0, 0] == pytest.approx(1.56e-6, rel=1e-2)


@pytest.mark.parametrize("fixture", ["first", "second", "two_ply"])
def test_oracle_on_reference_laminates(fixture, request):
    _, s, c = request.getfixturevalue(fixture)
    assert max(oracle_deviation(s, c).values()) < 1e-9


@given(st.integers(0, 2**32 - 1), st.integers(1, 14), st.booleans())
def test_oracle_random(seed, n, hybrid):
    s = stiffness_tensors(_random_laminate(seed, n, hybrid))
    dev = oracle_deviation(s)
    assert max(dev.values()) < 1e-9, dev


def test_oracle_blocks_are_inverse(first):
    _, s, c = first
    o = full_inverse_oracle(s)
    np.testing.assert_allclose(o.stiffness @ o.inverse, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(full_stiffness_matrix(s), o.stiffness)


@given(st.integers(0, 2**32 - 1), st.integers(1, 14), st.booleans())
def test_alternate_thermal_forms(seed, n, hybrid):
    s = stiffness_tensors(_random_laminate(seed, n, hybrid))
    a, b, d = compliance_elastic(s)
    main = compliance_thermal(s, a, b, d)
    alt = compliance_thermal_alt(s, a, b, d)
    h = s.h
    scale = max(np.max(np.abs(main[0])), h * np.max(np.abs(main[1])),
                np.max(np.abs(main[2])) / h, np.max(np.abs(main[3])))
    for x, y, f in zip(main, alt, (1, h, 1 / h, 1)):
        assert np.max(np.abs(x - y)) * f <= 1e-10 * scale


@given(st.integers(0, 2**32 - 1), st.integers(1, 14), st.booleans())
def test_coupling_compliance_second_form(seed, n, hybrid):
    s = stiffness_tensors(_random_laminate(seed, n, hybrid))
    a, b, d = compliance_elastic(s)
    assert max_rel(-3 * inv3(s.A) @ s.B @ d, b, scale=np.max(np.abs(a))) < 1e-10


@given(st.integers(0, 2**32 - 1), st.integers(1, 14), st.booleans())
def test_v2_identity(seed, n, hybrid):
    s = stiffness_tensors(_random_laminate(seed, n, hybrid))
    c = compliance(s)
    scale = max(np.max(np.abs(c.v2)), np.max(np.abs(c.u)) * s.h)
    assert np.max(np.abs(v2_identity(s, c) - c.v2)) <= 1e-9 * scale


def test_uncoupled_reduction(t300):
    s = stiffness_tensors(Laminate.from_angles(t300, [0, 45, -45, 90, 90, -45, 45, 0]))
    assert np.all(s.B == 0) and np.all(s.V == 0)
    c = compliance(s)
    np.testing.assert_allclose(c.a, np.linalg.inv(s.A), rtol=1e-12, atol=1e-20)
    np.testing.assert_allclose(c.d, np.linalg.inv(s.D), rtol=1e-12, atol=1e-20)
    assert np.all(c.b == 0)
    np.testing.assert_allclose(c.u, np.linalg.solve(s.A, s.U), rtol=1e-12)
    np.testing.assert_allclose(c.w, np.linalg.solve(s.D, s.W), rtol=1e-12)
    assert np.all(c.v1 == 0) and np.all(c.v2 == 0)


def test_scaled_identity_stiffness():
    I = np.eye(3)
    s = StiffnessSet(2 * I, 0 * I, 5 * I, np.ones(3), np.zeros(3), np.ones(3), 1.0)
    c = compliance(s)
    np.testing.assert_allclose(c.a, I / 2)
    np.testing.assert_allclose(c.d, I / 5)
    np.testing.assert_allclose(c.u, np.ones(3) / 2)


@pytest.mark.parametrize("fixture", ["first", "second"])
def test_equal_extension_and_bending_stiffness(fixture, request):
    _, s, c = request.getfixturevalue(fixture)
    np.testing.assert_allclose(c.a, c.d, rtol=1e-10, atol=1e-10 * np.max(np.abs(c.a)))
    np.testing.assert_allclose(c.b, c.b.T, atol=1e-10 * np.max(np.abs(c.b)))
    np.testing.assert_allclose(c.u, c.w, atol=1e-10 * np.max(np.abs(c.u)))


def test_hybrid_coupling_compliance_is_asymmetric():
    from lampolar.laminate import load_laminate

    c = compliance(stiffness_tensors(load_laminate(LAMINATES / "hybrid.json")))
    assert np.max(np.abs(c.b - c.b.T)) > 1e-3 * np.max(np.abs(c.b))


def _zero_v_sequences():
    out = []
    for seq in itertools.product([0, 90, 45, -45], repeat=7):
        angles = np.radians(seq)
        if exact_sum("b", 2, angles) == (0, 0) and exact_sum("b", 4, angles) != (0, 0):
            out.append(seq)
    return out


ZERO_V = _zero_v_sequences()


def test_zero_v_witnesses_exist():
    assert (0, 90, 90, 0, 45, 45, -45) in ZERO_V


@given(st.integers(0, 2**32 - 1), st.integers(2, 14))
def test_thermal_isotropic_parts_ratio(seed, n):
    lam = _random_laminate(seed, n)
    c = compliance(stiffness_tensors(lam))
    t1, t2 = c.polar["v1"].T, c.polar["v2"].T
    if abs(t1) > 1e-8 * np.max(np.abs(c.v1)):
        assert t2 / t1 == pytest.approx(lam.h**2 / 12, rel=1e-9)


def test_thermal_isotropic_parts_ratio_fails_for_hybrids():
    lam = _random_laminate(0, 3, hybrid=True)
    c = compliance(stiffness_tensors(lam))
    assert abs(c.polar["v2"].T / c.polar["v1"].T / (lam.h**2 / 12) - 1) > 0.1


@given(st.integers(0, 2**32 - 1), st.sampled_from(ZERO_V))
def test_zero_v_with_coupling(seed, seq):
    mat = random_material(np.random.default_rng(seed))
    q = ply_polar(mat).Q
    # B keeps only its R0 part, which vanishes with the ply's R0
    assume(q.R0 > 1e-2 * q.T0)
    lam = Laminate.from_angles(mat, seq)
    s = stiffness_tensors(lam)
    assert np.max(np.abs(s.V)) <= 1e-14 * np.max(np.abs(s.U))
    xi = abs(complex(*exact_sum("b", 4, np.radians(seq)))) / len(seq) ** 2
    assert s.polar["B"].R0 == pytest.approx(q.R0 * xi, rel=1e-9)
    assert s.polar["B"].R1 < 1e-12 * q.T0
    c = compliance(s)
    np.testing.assert_allclose(c.v1, (2 / s.h) * c.b.T @ s.U, rtol=1e-12, atol=1e-12 * np.max(np.abs(c.v1)))
    np.testing.assert_allclose(c.v2, (s.h / 6) * c.b @ s.W, rtol=1e-12, atol=1e-12 * np.max(np.abs(c.v2)))
    # small for some stacks (down to ~5e-4) but far above round-off
    assert np.max(np.abs(c.v1)) > 1e-8 * np.max(np.abs(c.u)) / s.h
