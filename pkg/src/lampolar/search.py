"""Exact enumeration of stacking sequences with prescribed properties.

Sequences of ``n`` identical plies drawn from a finite orientation set are
explored depth-first in lexicographic order of orientation indices. Zero
constraints on the lamination parameters are tested on integer numerators
(Gaussian integers when every ``exp(2i delta)``/``exp(4i delta)`` is one of
1, i, -1, -i) so equality is exact; other angle sets fall back to ``fsum``
floats with a 1e-12 relative tolerance. Every hit is re-verified on the
full tensor pipeline.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .classification import residuals
from .compliance import compliance
from .errors import ValidationError
from .laminate import (
    DEFAULT_PLY_THICKNESS,
    Laminate,
    coefficient_numerator,
    rotated_ply,
    stiffness_tensors,
    unit_power,
)
from .material import PlyMaterial, t300_5208

PREDICATES = (
    "B_zero",
    "B_nonzero",
    "V_zero",
    "R1B_zero",
    "C_zero",
    "warp_free",
    "extension_free",
    "balanced_crossply",
)

DEDUP_POLICIES = ("none", "reversal", "rotation")

# Lamination-parameter sums that must vanish for each predicate.
_ZERO_SUMS = {
    "B_zero": (("b", 2), ("b", 4)),
    "V_zero": (("b", 2),),
    "R1B_zero": (("b", 2),),
    "C_zero": (("c", 2), ("c", 4)),
    "warp_free": (("b", 2), ("a", 2)),
    "extension_free": (("b", 2), ("d", 2)),
}
_NEEDS_COUPLING = {"B_nonzero", "warp_free", "extension_free"}
_ALL_SUMS = tuple((g, o) for g in "abdc" for o in (2, 4))

FLOAT_TOL = 1e-12
VERIFY_TOL = 1e-9


@dataclass(frozen=True)
class SearchSpec:
    n: int
    orientations: tuple[float, ...]  # degrees
    predicates: frozenset = frozenset()
    max_results: int | None = None
    dedup: str = "none"
    material: PlyMaterial | None = None
    ply_thickness: float = DEFAULT_PLY_THICKNESS
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "orientations", tuple(float(a) for a in self.orientations))
        object.__setattr__(self, "predicates", frozenset(self.predicates))
        if self.n < 2:
            raise ValidationError("search needs n >= 2")
        if not self.orientations:
            raise ValidationError("orientation set is empty")
        if len(set(_mod180(a) for a in self.orientations)) != len(self.orientations):
            raise ValidationError("orientation set has duplicates (mod 180 deg)")
        unknown = self.predicates - set(PREDICATES)
        if unknown:
            raise ValidationError(f"unknown predicates: {', '.join(sorted(unknown))}")
        if self.dedup not in DEDUP_POLICIES:
            raise ValidationError(f"dedup must be one of {', '.join(DEDUP_POLICIES)}")
        if self.max_results is not None and self.max_results < 0:
            raise ValidationError("max_results must be non-negative")


@dataclass(frozen=True)
class SearchResult:
    sequence: tuple[float, ...]
    exact: dict
    verification: dict
    verified: bool
    equivalents: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, tuple):
                return list(v)
            return [v.real, v.imag]

        return {
            "sequence": list(self.sequence),
            "exact": {f"{g}{o}": enc(v) for (g, o), v in self.exact.items()},
            "verification": self.verification,
            "verified": self.verified,
        }


def _mod180(a: float) -> float:
    r = math.fmod(a, 180.0)
    if r < 0:
        r += 180.0
    return 0.0 if abs(r - 180.0) < 1e-9 else round(r, 9)


def _unit_tables(orientations: Sequence[float]):
    rad = [math.radians(a) for a in orientations]
    tables = {o: [unit_power(x, o) for x in rad] for o in (2, 4)}
    exact = all(isinstance(e, tuple) for t in tables.values() for e in t)
    if not exact:
        tables = {
            o: [complex(*e) if isinstance(e, tuple) else e for e in t] for o, t in tables.items()
        }
    return tables, exact


class _Enumerator:
    def __init__(self, spec: SearchSpec):
        self.spec = spec
        n = spec.n
        self.tables, self.exact = _unit_tables(spec.orientations)
        self.coef = {g: [coefficient_numerator(g, k, n) for k in range(1, n + 1)] for g in "abdc"}
        zero = set()
        for p in spec.predicates:
            zero.update(_ZERO_SUMS.get(p, ()))
        self.zero = tuple(sorted(zero))
        # remaining |coef| mass after position k (0-based) is assigned
        self.rest = {
            g: [sum(abs(c) for c in self.coef[g][k + 1:]) for k in range(n)] for g in "abdc"
        }
        self.tol = {g: FLOAT_TOL * max(1, sum(abs(c) for c in self.coef[g])) for g in "abdc"}
        m = [_mod180(a) for a in spec.orientations]
        self.crossply = "balanced_crossply" in spec.predicates
        self.idx0 = m.index(0.0) if 0.0 in m else None
        self.idx90 = m.index(90.0) if 90.0 in m else None
        self.rot90 = self._rotation_map(m)

    @staticmethod
    def _rotation_map(m):
        target = [_mod180(x + 90.0) for x in m]
        if all(t in m for t in target):
            return [m.index(t) for t in target]
        return None

    def _zero(self, g, s) -> bool:
        if self.exact:
            return s == (0, 0)
        return abs(s.real) <= self.tol[g] and abs(s.imag) <= self.tol[g]

    def _add(self, s, c, e):
        if self.exact:
            return (s[0] + c * e[0], s[1] + c * e[1])
        return s + c * e

    def sums(self, idx: Sequence[int]) -> dict:
        out = {}
        for g, o in _ALL_SUMS:
            tab = self.tables[o]
            if self.exact:
                re = sum(c * tab[i][0] for c, i in zip(self.coef[g], idx))
                im = sum(c * tab[i][1] for c, i in zip(self.coef[g], idx))
                out[(g, o)] = (re, im)
            else:
                terms = [c * tab[i] for c, i in zip(self.coef[g], idx)]
                out[(g, o)] = complex(
                    math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)
                )
        return out

    def leaf_ok(self, idx) -> bool:
        preds = self.spec.predicates
        if preds & _NEEDS_COUPLING or "B_zero" in preds:
            s = self.sums(idx)
            b_zero = self._zero("b", s[("b", 2)]) and self._zero("b", s[("b", 4)])
            if "B_zero" in preds and not b_zero:
                return False
            if preds & _NEEDS_COUPLING and b_zero:
                return False
        return True

    def canonical(self, idx: tuple[int, ...]) -> bool:
        pol = self.spec.dedup
        if pol == "none":
            return True
        members = [idx, idx[::-1]]
        if pol == "rotation" and self.rot90 is not None:
            members += [tuple(self.rot90[i] for i in m) for m in list(members)]
        return idx == min(members)

    def run(self, prefix: tuple[int, ...] = ()) -> Iterator[tuple[int, ...]]:
        n = self.spec.n
        k_orient = len(self.spec.orientations)
        zero_exact = (0, 0)
        init = zero_exact if self.exact else 0j
        sums = {key: init for key in self.zero}
        counts = [0, 0]
        half = n // 2
        idx: list[int] = []
        # exact states (depth, sums, counts) known to admit no zero-sum completion
        dead: set = set()
        leaves = [0]

        def push(i, k):
            for g, o in self.zero:
                sums[(g, o)] = self._add(sums[(g, o)], self.coef[g][k], self.tables[o][i])
            if self.crossply:
                counts[0] += i == self.idx0
                counts[1] += i == self.idx90

        def feasible(k) -> bool:
            if self.crossply:
                if n % 2 or counts[0] > half or counts[1] > half:
                    return False
                if counts[0] + counts[1] != k + 1:
                    return False
            for g, o in self.zero:
                s = sums[(g, o)]
                bound = self.rest[g][k] + (0 if self.exact else self.tol[g])
                re, im = (s if self.exact else (s.real, s.imag))
                if abs(re) > bound or abs(im) > bound:
                    return False
            return True

        def rec(k):
            if k == n:
                if all(self._zero(g, sums[(g, o)]) for g, o in self.zero):
                    leaves[0] += 1
                    t = tuple(idx)
                    if self.leaf_ok(t) and self.canonical(t):
                        yield t
                return
            choices = [prefix[k]] if k < len(prefix) else range(k_orient)
            for i in choices:
                saved = dict(sums), list(counts)
                push(i, k)
                key = (k, tuple(sums.values()), tuple(counts)) if self.exact else None
                if feasible(k) and key not in dead:
                    idx.append(i)
                    before = leaves[0]
                    yield from rec(k + 1)
                    if key is not None and leaves[0] == before:
                        dead.add(key)
                    idx.pop()
                sums.clear()
                sums.update(saved[0])
                counts[:] = saved[1]

        if self.crossply and (self.idx0 is None or self.idx90 is None):
            return
        yield from rec(0)


def _run_prefix(spec: SearchSpec, prefix: tuple[int, ...]) -> list[tuple[int, ...]]:
    return list(_Enumerator(spec).run(prefix))


def enumerate_indices(spec: SearchSpec) -> list[tuple[int, ...]]:
    """Orientation-index tuples satisfying the exact predicates, in lexicographic order."""
    if spec.workers > 1:
        prefixes = [(i,) for i in range(len(spec.orientations))]
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            parts = list(pool.map(_run_prefix, [spec] * len(prefixes), prefixes))
        hits = [t for part in parts for t in part]
    else:
        hits = []
        for t in _Enumerator(spec).run():
            hits.append(t)
            if spec.max_results is not None and len(hits) >= spec.max_results:
                break
    if spec.max_results is not None:
        hits = hits[: spec.max_results]
    return hits


def enumerate_sequences(spec: SearchSpec) -> Iterator[SearchResult]:
    """Stream of verified results for ``spec`` (empty when infeasible)."""
    en = _Enumerator(spec)
    material = spec.material or t300_5208()
    for idx in enumerate_indices(spec):
        seq = tuple(spec.orientations[i] for i in idx)
        report = verify(seq, material, spec.predicates, spec.ply_thickness)
        yield SearchResult(
            sequence=seq,
            exact=en.sums(idx),
            verification=report,
            verified=all(v["passed"] for v in report.values()),
        )


def _numeric_checks(res: dict[str, float], n_balance: bool | None, predicates) -> dict:
    tests = {
        "B_zero": ("B", lambda r: r["B"] <= VERIFY_TOL),
        "B_nonzero": ("B", lambda r: r["B"] > VERIFY_TOL),
        "V_zero": ("V", lambda r: r["V"] <= VERIFY_TOL),
        "R1B_zero": ("V", lambda r: r["V"] <= VERIFY_TOL),
        "C_zero": ("C", lambda r: r["C"] <= VERIFY_TOL),
        "warp_free": ("v1", lambda r: r["v1"] <= VERIFY_TOL and r["B"] > VERIFY_TOL),
        "extension_free": ("v2", lambda r: r["v2"] <= VERIFY_TOL and r["B"] > VERIFY_TOL),
    }
    out = {}
    for p in sorted(predicates):
        if p == "balanced_crossply":
            out[p] = {"passed": bool(n_balance), "residual": 0.0 if n_balance else 1.0}
            continue
        key, test = tests[p]
        out[p] = {"passed": bool(test(res)), "residual": res[key]}
    return out


def _is_balanced_crossply(seq_deg: Sequence[float]) -> bool:
    m = [_mod180(a) for a in seq_deg]
    return all(x in (0.0, 90.0) for x in m) and m.count(0.0) == m.count(90.0)


def verify(
    sequence_deg: Sequence[float],
    material: PlyMaterial | None = None,
    predicates=PREDICATES,
    ply_thickness: float = DEFAULT_PLY_THICKNESS,
) -> dict:
    """Check predicates on the actual tensors of a laminate.

    Returns ``{predicate: {"passed": bool, "residual": float}}`` with the
    normalized residuals used by the classifier.
    """
    material = material or t300_5208()
    lam = Laminate.from_angles(material, sequence_deg, ply_thickness)
    s = stiffness_tensors(lam)
    res = residuals(s, compliance(s))
    return _numeric_checks(res, _is_balanced_crossply(sequence_deg), predicates)


def batch_residuals(
    material: PlyMaterial,
    orientations: Sequence[float],
    sequences: np.ndarray,
    ply_thickness: float = DEFAULT_PLY_THICKNESS,
) -> dict[str, np.ndarray]:
    """Vectorized counterpart of :func:`verify` residuals for many sequences.

    ``sequences`` is an integer array ``(count, n)`` of orientation indices.
    Uses LAPACK batch inversion, so it is independent of the adjugate route.
    """
    seqs = np.asarray(sequences, dtype=int)
    count, n = seqs.shape
    h = n * ply_thickness
    z = -0.5 * h + ply_thickness * np.arange(n + 1)
    w1 = np.diff(z) / h
    w2 = np.diff(z**2) / h**2
    w3 = 4.0 * np.diff(z**3) / h**3
    Qs, gs = zip(*(rotated_ply(material, math.radians(a)) for a in orientations))
    Qs, gs = np.array(Qs)[seqs], np.array(gs)[seqs]
    A = np.einsum("k,nkij->nij", w1, Qs)
    B = np.einsum("k,nkij->nij", w2, Qs)
    D = np.einsum("k,nkij->nij", w3, Qs)
    U = np.einsum("k,nki->ni", w1, gs)
    V = np.einsum("k,nki->ni", w2, gs)
    W = np.einsum("k,nki->ni", w3, gs)
    Ainv, Dinv = np.linalg.inv(A), np.linalg.inv(D)
    a = np.linalg.inv(A - 3 * B @ Dinv @ B)
    d = np.linalg.inv(D - 3 * B @ Ainv @ B)
    b = -3 * a @ B @ Dinv
    bT = np.transpose(b, (0, 2, 1))

    def mv(m, v):
        return np.einsum("nij,nj->ni", m, v)

    u = mv(a, U) + mv(b, V)
    v1 = 2 / h * (mv(bT, U) + 3 * mv(d, V))
    v2 = h / 6 * (3 * mv(a, V) + mv(b, W))
    w = mv(bT, V) + mv(d, W)
    norm = lambda x: np.sqrt(np.sum(x.reshape(count, -1) ** 2, axis=1))  # noqa: E731
    amax = lambda x: np.max(np.abs(x), axis=1)  # noqa: E731
    ts = np.maximum.reduce([amax(u), h * amax(v1), amax(v2) / h, amax(w)])
    ts = np.where(ts > 0, ts, 1.0)
    a_norm, u_norm = norm(A), norm(U)
    u_norm = np.where(u_norm > 0, u_norm, 1.0)
    return {
        "B": norm(B) / a_norm,
        "C": norm(A - D) / a_norm,
        "V": norm(V) / u_norm,
        "Y": norm(U - W) / u_norm,
        "v1": h * norm(v1) / ts,
        "v2": norm(v2) / (h * ts),
    }


def batch_numeric_pass(
    predicate: str, res: dict[str, np.ndarray], orientations: Sequence[float], sequences: np.ndarray
) -> np.ndarray:
    """Boolean mask of sequences passing ``predicate`` on the batch residuals."""
    if predicate == "balanced_crossply":
        return np.array(
            [_is_balanced_crossply([orientations[i] for i in row]) for row in sequences]
        )
    tol = VERIFY_TOL
    coupled = res["B"] > tol
    masks = {
        "B_zero": res["B"] <= tol,
        "B_nonzero": coupled,
        "V_zero": res["V"] <= tol,
        "R1B_zero": res["V"] <= tol,
        "C_zero": res["C"] <= tol,
        "warp_free": (res["v1"] <= tol) & coupled,
        "extension_free": (res["v2"] <= tol) & coupled,
    }
    return masks[predicate]


def all_sequences(n: int, k: int) -> np.ndarray:
    """Every index tuple of length ``n`` over ``k`` orientations, lexicographic."""
    return np.array(np.unravel_index(np.arange(k**n), (k,) * n)).T
