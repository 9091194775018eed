"""The acceptance suite: twelve exact or trend checks with runtime budgets.

Each criterion is a zero-argument callable returning (passed, detail);
``run_criterion`` adds wall-clock timing and folds the budget into the
verdict, and ``run_all`` executes the suite in order. The CLI ``verify``
subcommand and the acceptance tests are both thin wrappers over this
module, so a criterion can never pass in one place and fail in the other.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cayley_graphs import CayleyGraph, cycle_from_tuple, cycles_through_vertex, total_cycle_count
from .configurations import (
    SphericalConfig,
    congruence_class_count,
    degenerate_span_count,
    gram_fingerprint,
    random_signed_permutation,
    transform_config,
)
from .constructions import build_bad_set, independent_set_no_good_tuples
from .energy import (
    additive_energy,
    brute_force_energy,
    classified_tuples,
    classify_tuples,
    energy_inequality_check,
    good_energy_count,
)
from .field_algebra import PointSet, build_field, is_prime, sphere
from .spectral import (
    MultiSet,
    closed_walk_count,
    fourier_spectrum,
    mixing_check,
)

SUITE_SEED = 2026


@dataclass(frozen=True)
class CriterionResult:
    number: int
    slug: str
    passed: bool
    elapsed: float
    budget: float
    detail: str

    @property
    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag} criterion-{self.number:02d} {self.slug} "
                f"({self.elapsed:.2f}s / budget {self.budget:.0f}s): {self.detail}")


# ---------------------------------------------------------------------------
# 1. character orthogonality


def _orthogonality_grid():
    """Deterministic (p, r, d) grid covering every supported field shape q^d <= 1e4."""
    cells = []
    for p in [n for n in range(2, 98) if is_prime(n)]:
        for r in range(1, 7):
            q = p**r
            if r > 1 and q > 4096:
                break
            d = 1
            while q**d <= 10**4:
                cells.append((p, r, d))
                d += 1
    return cells


def criterion_orthogonality():
    cells = _orthogonality_grid()
    fields = {}
    worst = 0.0
    for p, r, d in cells:
        ctx = fields.get((p, r))
        if ctx is None:
            ctx = fields[(p, r)] = build_field(p, r)
        n = ctx.q**d
        full = PointSet(ctx, d, np.arange(n, dtype=np.int64))
        spec = fourier_spectrum(full)
        if abs(spec.values[0] - n) > 1e-9 * n:
            return False, f"({p},{r},{d}): main value off by {abs(spec.values[0]-n):.3g}"
        off_peak = float(np.abs(spec.values[1:]).max()) if n > 1 else 0.0
        worst = max(worst, off_peak / n)
        if off_peak > 1e-9 * n:
            return False, f"({p},{r},{d}): off-peak character sum {off_peak:.3g}"
    return True, f"{len(cells)} field/dimension cells, worst |sum|/q^d = {worst:.2e}"


# ---------------------------------------------------------------------------
# 2. spectral closed-walk counts equal adjacency traces


def criterion_walk_equivalence():
    checked = 0
    for q in (3, 5):
        ctx = build_field(q)
        for d in (2, 3):
            ps = sphere(ctx, d)
            mat = CayleyGraph(ps).adjacency_matrix()
            power = mat.copy()
            for walk_len in range(2, 6):
                power = power @ mat
                expected = int(np.trace(power))
                got = closed_walk_count(ps, walk_len)
                if got != expected:
                    return False, (f"S in F_{q}^{d}, L={walk_len}: "
                                   f"spectral {got} != adjacency {expected}")
                checked += 1
    return True, f"{checked} exact integer walk counts matched"


# ---------------------------------------------------------------------------
# 3. additive energy equals brute force on random small sets


def criterion_energy_oracle():
    rng = np.random.default_rng(SUITE_SEED)
    spaces = [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3), (11, 2)]
    fields = {p: build_field(p) for p, _ in spaces}
    for trial in range(30):
        p, d = spaces[trial % len(spaces)]
        ctx = fields[p]
        size = min(int(rng.integers(2, 13)), ctx.q**d)
        picks = rng.choice(ctx.q**d, size=size, replace=False)
        ps = PointSet(ctx, d, picks)
        for k in (2, 3):
            fast = additive_energy(ps, k)
            slow = brute_force_energy(ps, k)
            if fast != slow:
                return False, (f"trial {trial} (p={p}, d={d}, |E|={len(ps)}, k={k}): "
                               f"{fast} != {slow}")
    return True, "30 random sets x k in {2,3}: convolution == enumeration"


# ---------------------------------------------------------------------------
# 4. the energy growth inequality


def criterion_energy_inequality():
    rng = np.random.default_rng(SUITE_SEED)
    checked = 0
    violations = []
    ctx5 = build_field(5)
    s53 = sphere(ctx5, 3)
    for trial in range(50):
        size = int(rng.integers(4, len(s53) + 1))
        picks = rng.choice(s53.indices, size=size, replace=False)
        ps = PointSet(ctx5, 3, picks)
        for k in (2, 3):
            rep = energy_inequality_check(ps, k)
            checked += 1
            if not rep.holds:
                violations.append(f"random trial {trial} (|E|={size}, k={k})")
    for q in (3, 5, 7, 11):
        ctx = build_field(q)
        for d in (2, 3):
            ps = sphere(ctx, d)
            for k in (2, 3):
                rep = energy_inequality_check(ps, k)
                checked += 1
                if not rep.holds:
                    violations.append(
                        f"full sphere (q={q},d={d},k={k}): "
                        f"lhs {float(rep.lhs):.3f} > rhs {rep.rhs:.3f}"
                    )
    if violations:
        head = "; ".join(violations[:3])
        more = f" (+{len(violations) - 3} more)" if len(violations) > 3 else ""
        return False, f"{len(violations)}/{checked} instances violated: {head}{more}"
    return True, f"{checked} inequality instances, zero violations"


# ---------------------------------------------------------------------------
# 5. energy main-term trend


def criterion_energy_trend():
    violations = []
    ratios = {}
    for q in (5, 7, 11, 13):
        ctx = build_field(q)
        for d in (2, 3):
            s = sphere(ctx, d)
            for k in (2, 3):
                t_k = additive_energy(s, k)
                ratio = float(Fraction(t_k * q, len(s) ** (2 * k - 1)))
                ratios[(d, k, q)] = ratio
                if not 0.5 <= ratio <= 2.0:
                    violations.append(f"(d={d},k={k},q={q}) ratio={ratio:.4f}")
    for d in (2, 3):
        for k in (2, 3):
            near, far = ratios[(d, k, 13)], ratios[(d, k, 5)]
            if not abs(near - 1) < abs(far - 1):
                violations.append(
                    f"(d={d},k={k}) |ratio-1| grew: q=5 {abs(far-1):.4f} -> q=13 {abs(near-1):.4f}"
                )
    if violations:
        return False, "; ".join(violations)
    return True, "16 ratios in [0.5, 2] and all four (d,k) trends tighten toward 1"


# ---------------------------------------------------------------------------
# 6. good tuples generate distinct-vertex cycles


def criterion_good_tuple_cycles():
    rng = np.random.default_rng(SUITE_SEED)
    details = []
    for q, expected_good in ((5, 5040), (7, 8064)):
        ctx = build_field(q)
        ps = sphere(ctx, 3)
        g = CayleyGraph(ps)
        good = [t for t in classified_tuples(ps, 2) if t.good]
        counted = good_energy_count(ps, 2, mode="exhaustive").value
        if len(good) != counted or counted != expected_good:
            return False, f"q={q}: good-tuple counts disagree ({len(good)}, {counted})"
        for tup in good:
            rec = cycle_from_tuple(g, 0, tup)  # raises NotGoodTuple on any defect
            if len(set(rec.vertices)) != 4:
                return False, f"q={q}: cycle from good tuple repeats a vertex"
        counts = {int(v): cycles_through_vertex(g, int(v), 4)
                  for v in rng.integers(0, g.n, size=10)}
        if len(set(counts.values())) != 1:
            return False, f"q={q}: per-vertex counts differ: {sorted(set(counts.values()))}"
        per_vertex = next(iter(counts.values()))
        if per_vertex < counted:
            return False, f"q={q}: per-vertex {per_vertex} < good tuples {counted}"
        details.append(f"q={q}: {counted} good tuples, per-vertex {per_vertex}")
    return True, "; ".join(details)


# ---------------------------------------------------------------------------
# 7. total cycle count identity


def criterion_cycle_totals():
    ctx = build_field(5)
    ps = sphere(ctx, 3)
    g = CayleyGraph(ps)
    per_vertex = cycles_through_vertex(g, 0, 4)
    counts = total_cycle_count(g, 4)  # asserts divisibility by 2*2k internally
    if counts.rooted_total != g.n * per_vertex:
        return False, (f"total {counts.rooted_total} != "
                       f"{g.n} x per-vertex {per_vertex}")
    if counts.unrooted_total * 8 != counts.rooted_total:
        return False, "unrooted division by 2*2k is inexact"
    ratio = counts.rooted_total / (len(ps) ** 3 * ctx.q**2)
    if not 0.3 <= ratio <= 3.0:
        return False, f"ratio against |S|^3 q^2 is {ratio:.4f}"
    return True, (f"total {counts.rooted_total} = 125 x {per_vertex}, "
                  f"unrooted {counts.unrooted_total}, ratio {ratio:.4f}")


# ---------------------------------------------------------------------------
# 8. mixing inequality on random vertex sets


def _random_multiset(rng, n: int) -> MultiSet:
    size = int(rng.integers(1, 41))
    draws = rng.integers(0, n, size=size)
    return MultiSet.from_draws(draws)


def criterion_mixing():
    rng = np.random.default_rng(SUITE_SEED)
    ctx5 = build_field(5)
    s53 = sphere(ctx5, 3)
    for _ in range(100):
        u_set = _random_multiset(rng, s53.space_size)
        w_set = _random_multiset(rng, s53.space_size)
        if not mixing_check(s53, u_set, w_set).holds:
            return False, "multiset violation on the F_5^3 sphere graph"
    ctx3 = build_field(3)
    s32 = sphere(ctx3, 2)
    for _ in range(100):
        sizes = rng.integers(1, 10, size=2)
        u_set = MultiSet.uniform(rng.choice(9, size=int(sizes[0]), replace=False))
        w_set = MultiSet.uniform(rng.choice(9, size=int(sizes[1]), replace=False))
        if not mixing_check(s32, u_set, w_set).holds:
            return False, "set violation on the F_3^2 circle graph"
    return True, "200 exact edge counts inside the mixing bound"


# ---------------------------------------------------------------------------
# 9. hyperplane-avoiding certificates


def criterion_bad_set():
    details = []
    for p, r, d in ((3, 2, 2), (2, 3, 2), (3, 2, 3)):
        cert = build_bad_set(p, r, d, 2)
        cert.verify()
        if cert.edges_hh != 0:
            return False, f"({p},{r},{d}): e(H,H) = {cert.edges_hh}"
        if cert.mu < cert.bound - 1e-6:
            return False, f"({p},{r},{d}): mu {cert.mu:.6f} < bound {cert.bound:.6f}"
        details.append(f"({p},{r},{d}): mu={cert.mu:.3f} >= {cert.bound:.3f}")
    return True, "; ".join(details)


# ---------------------------------------------------------------------------
# 10. degenerate span count bound


def criterion_degenerate_span():
    details = []
    for q in (3, 5, 7):
        ctx = build_field(q)
        s = sphere(ctx, 3)
        count = degenerate_span_count(ctx, 3, 2)
        constant = count * q**2 / len(s) ** 3
        if constant > 4.0:
            return False, f"q={q}: L q^2 / |S|^3 = {constant:.4f} > 4"
        details.append(f"q={q}: L={count}, const={constant:.3f}")
    return True, "; ".join(details)


# ---------------------------------------------------------------------------
# 11. congruence class bookkeeping


def criterion_congruence_classes():
    ctx = build_field(7)
    ps = sphere(ctx, 3)
    classes = congruence_class_count(ps, 2)
    t_star = classify_tuples(ps, 2).t_star
    if classes.total != t_star:
        return False, f"sum of multiplicities {classes.total} != T_2^* {t_star}"
    rng = np.random.default_rng(SUITE_SEED)
    reps = [SphericalConfig(ctx, 3, points)
            for points in classes.representatives.values()]
    for i in range(200):
        cfg = reps[i % len(reps)]
        moved = transform_config(cfg, random_signed_permutation(ctx, 3, rng))
        if gram_fingerprint(moved) != gram_fingerprint(cfg):
            return False, f"fingerprint changed under transform {i}"
    return True, (f"{classes.count} classes, sum mu = {classes.total} = T_2^*, "
                  "200 transforms fingerprint-invariant")


# ---------------------------------------------------------------------------
# 12. independent set with zero good tuples


def criterion_independent_set():
    ctx = build_field(5)
    rep = independent_set_no_good_tuples(ctx, 3, 2)
    recount = good_energy_count(rep.connection, 2, mode="exhaustive").value
    if rep.certified_good_count != 0 or recount != 0:
        return False, f"good-tuple count nonzero: {rep.certified_good_count}, {recount}"
    if not len(rep.connection):
        return False, "construction returned an empty set"
    return True, (f"|E| = {len(rep.connection)} of sphere {rep.sphere_size}, "
                  f"T_2^good certified 0, ratio {rep.ratio:.3f}")


CRITERIA = [
    (1, "character-orthogonality", 10.0, criterion_orthogonality),
    (2, "walk-count-equivalence", 30.0, criterion_walk_equivalence),
    (3, "energy-oracle-equivalence", 60.0, criterion_energy_oracle),
    (4, "energy-growth-inequality", 120.0, criterion_energy_inequality),
    (5, "energy-main-term-trend", 300.0, criterion_energy_trend),
    (6, "good-tuples-give-cycles", 180.0, criterion_good_tuple_cycles),
    (7, "cycle-total-identity", 300.0, criterion_cycle_totals),
    (8, "mixing-inequality", 120.0, criterion_mixing),
    (9, "bad-set-certificates", 60.0, criterion_bad_set),
    (10, "degenerate-span-bound", 180.0, criterion_degenerate_span),
    (11, "congruence-bookkeeping", 180.0, criterion_congruence_classes),
    (12, "independent-set-certified", 120.0, criterion_independent_set),
]


def run_criterion(number: int) -> CriterionResult:
    for num, slug, budget, func in CRITERIA:
        if num == number:
            start = time.perf_counter()
            passed, detail = func()
            elapsed = time.perf_counter() - start
            if passed and elapsed >= budget:
                passed = False
                detail = f"over budget ({elapsed:.1f}s >= {budget:.0f}s); {detail}"
            return CriterionResult(num, slug, passed, elapsed, budget, detail)
    raise ValueError(f"no criterion numbered {number}")


def run_all() -> list[CriterionResult]:
    return [run_criterion(num) for num, _, _, _ in CRITERIA]
