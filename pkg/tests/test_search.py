import math

import numpy as np
import pytest

from lampolar.errors import ValidationError
from lampolar.laminate import Laminate, exact_sum, stiffness_tensors
from lampolar.search import (
    PREDICATES,
    SearchSpec,
    all_sequences,
    batch_numeric_pass,
    batch_residuals,
    enumerate_indices,
    enumerate_sequences,
    verify,
)

from conftest import FIRST, REFERENCE_SEQUENCES, random_material

CROSSPLY = frozenset({"C_zero", "B_nonzero", "balanced_crossply"})
QUAD = (0.0, 90.0, 45.0, -45.0)
# exhaustive enumeration is the oracle for these counts
PINNED_COUNTS = {"none": 70, "reversal": 35, "rotation": 33}


@pytest.fixture(scope="module")
def crossply_results():
    return list(enumerate_sequences(SearchSpec(12, (0, 90), CROSSPLY)))


def test_reference_sequences_found(crossply_results):
    found = {r.sequence for r in crossply_results}
    for seq in REFERENCE_SEQUENCES:
        assert tuple(float(a) for a in seq) in found
    assert all(r.verified for r in crossply_results)


@pytest.mark.parametrize("dedup", sorted(PINNED_COUNTS))
def test_pinned_counts(dedup):
    assert len(enumerate_indices(SearchSpec(12, (0, 90), CROSSPLY, dedup=dedup))) == PINNED_COUNTS[dedup]


def test_crossply_count_matches_brute_force():
    seqs = all_sequences(12, 2)
    res = batch_residuals(random_material(np.random.default_rng(4)), (0, 90), seqs)
    mask = np.ones(len(seqs), dtype=bool)
    for p in CROSSPLY:
        mask &= batch_numeric_pass(p, res, (0, 90), seqs)
    assert int(mask.sum()) == PINNED_COUNTS["none"]


def test_deterministic_order(crossply_results):
    again = [r.sequence for r in enumerate_sequences(SearchSpec(12, (0, 90), CROSSPLY))]
    assert again == [r.sequence for r in crossply_results]
    assert again == sorted(again, key=lambda s: [(0, 90).index(a) for a in s])


def test_two_ply_cross_ply():
    hits = [r.sequence for r in enumerate_sequences(SearchSpec(2, (0, 90), {"C_zero"}))]
    assert (0.0, 90.0) in hits and (90.0, 0.0) in hits
    assert exact_sum("c", 2, [0.0, math.pi / 2]) == (0, 0)
    assert exact_sum("c", 4, [0.0, math.pi / 2]) == (0, 0)


@pytest.mark.parametrize("n", [2, 5, 9])
def test_single_orientation(n):
    hits = list(enumerate_sequences(SearchSpec(n, (30.0,), {"B_zero", "C_zero", "V_zero"})))
    assert [r.sequence for r in hits] == [(30.0,) * n]
    assert hits[0].verified
    assert list(enumerate_sequences(SearchSpec(n, (30.0,), {"B_nonzero"}))) == []


def test_infeasible_is_empty():
    assert list(enumerate_sequences(SearchSpec(3, (0, 90), {"balanced_crossply"}))) == []
    assert list(enumerate_sequences(SearchSpec(4, (0, 45), {"balanced_crossply"}))) == []


def test_max_results():
    assert len(enumerate_indices(SearchSpec(12, (0, 90), CROSSPLY, max_results=5))) == 5
    assert enumerate_indices(SearchSpec(12, (0, 90), CROSSPLY, max_results=0)) == []


@pytest.mark.slow
def test_workers_parity():
    serial = enumerate_indices(SearchSpec(10, QUAD, {"C_zero", "B_nonzero"}))
    parallel = enumerate_indices(SearchSpec(10, QUAD, {"C_zero", "B_nonzero"}, workers=2))
    assert serial == parallel and serial


def test_reversal_dedup_keeps_one_of_each_pair():
    full = set(enumerate_indices(SearchSpec(12, (0, 90), CROSSPLY)))
    kept = enumerate_indices(SearchSpec(12, (0, 90), CROSSPLY, dedup="reversal"))
    assert {min(t, t[::-1]) for t in full} == set(kept)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(2, 9))
def test_exact_agrees_with_numeric_exhaustively(n, t300):
    seqs = all_sequences(n, len(QUAD))
    res = batch_residuals(t300, QUAD, seqs)
    for p in PREDICATES:
        exact = set(enumerate_indices(SearchSpec(n, QUAD, {p})))
        numeric = set(map(tuple, seqs[batch_numeric_pass(p, res, QUAD, seqs)]))
        assert exact == numeric, p


_EXACT_ZERO = {
    "B_zero": (("b", 2), ("b", 4)),
    "V_zero": (("b", 2),),
    "C_zero": (("c", 2), ("c", 4)),
}


@pytest.mark.slow
@pytest.mark.parametrize("n", range(9, 13))
def test_exact_agrees_with_numeric_sampled(n):
    rng = np.random.default_rng(n)
    mat = random_material(rng)
    rows = [rng.integers(0, 4, size=(2000, n))]
    for p in _EXACT_ZERO:
        rows.append(np.array(enumerate_indices(SearchSpec(n, QUAD, {p}, max_results=200))))
    seqs = np.vstack(rows)
    res = batch_residuals(mat, QUAD, seqs)
    rad = np.radians(QUAD)
    for p, sums in _EXACT_ZERO.items():
        exact = np.array(
            [all(exact_sum(g, o, rad[row]) == (0, 0) for g, o in sums) for row in seqs]
        )
        assert exact.any()
        assert np.array_equal(batch_numeric_pass(p, res, QUAD, seqs), exact), p


def test_non_exact_orientations():
    ors = (0.0, 30.0, -30.0, 60.0, -60.0, 90.0)
    hits = list(enumerate_sequences(SearchSpec(6, ors, {"B_zero"}, max_results=20)))
    assert hits and all(r.verified for r in hits)
    assert isinstance(hits[0].exact[("b", 2)], complex)


def test_verify_first_sequence(t300):
    report = verify(FIRST, t300)
    assert report["C_zero"]["passed"] and report["B_nonzero"]["passed"]
    assert not report["warp_free"]["passed"]
    assert not report["V_zero"]["passed"]
    assert report["balanced_crossply"]["passed"]


def test_antisymmetric_coupling_sign(t300):
    lam = Laminate.from_angles(t300, FIRST)
    re, im = exact_sum("b", 2, lam.angles)
    assert (re, im) == (-72, 0)
    assert stiffness_tensors(lam).B[0, 0] < 0


@pytest.mark.parametrize("n", [1, 4, 7])
def test_unidirectional_passes_zero_predicates(n, t300):
    report = verify([0] * max(n, 1), t300, ["B_zero", "V_zero", "C_zero"])
    assert all(v["passed"] for v in report.values())


def test_result_dict(crossply_results):
    d = crossply_results[0].to_dict()
    assert d["sequence"] == list(crossply_results[0].sequence)
    assert d["exact"]["b2"][1] == 0 and d["verified"] is True
    assert set(d["verification"]) == set(CROSSPLY)


def test_spec_validation():
    with pytest.raises(ValidationError):
        SearchSpec(1, (0,))
    with pytest.raises(ValidationError):
        SearchSpec(4, ())
    with pytest.raises(ValidationError):
        SearchSpec(4, (0, 180))
    with pytest.raises(ValidationError):
        SearchSpec(4, (0, 90), {"nonsense"})
    with pytest.raises(ValidationError):
        SearchSpec(4, (0, 90), dedup="mirror")
    with pytest.raises(ValidationError):
        SearchSpec(4, (0, 90), max_results=-1)
