"""Representation counts, additive energy, good tuples, and tuple classification.

For E ⊆ F_q^d the k-fold representation function r_k(v) counts ordered
k-tuples of E summing to v, and the k-additive energy T_k(E) counts ordered
2k-tuples (a_1..a_k, b_1..b_k) with equal side sums. A k-energy tuple is
"good" when every signed partial sum over index sets (I, J) — except the two
forced pairs (empty, empty) and (full, full) — is nonzero. Tuples are further
classified by whether the shifted difference vectors are independent, whether
all pairwise distances are nonzero, and goodness, in that priority order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    InfeasibleSize,
    NotOnSphere,
    PreconditionFailed,
    SizeCapExceeded,
)
from .field_algebra import (
    PointSet,
    check_space,
    decode_vector,
    matrix_rank,
    norm_table,
    vadd,
    vsub,
)

MAX_EXHAUSTIVE_TUPLES = 5_000_000
MAX_CLASSIFY_PAIRS = 20_000_000
EXHAUSTIVE_K = (2, 3)


@dataclass(frozen=True)
class CountTable:
    """Exact k-fold representation counts r_k(v) over every index v."""

    counts: np.ndarray
    k: int

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.counts))


def rep_counts(ps: PointSet, k: int, cap: int | None = None) -> CountTable:
    """r_k via k-1 exact integer convolutions with the indicator of E.

    Each convolution shifts the running table by every element of E using
    cyclic rolls along the base-p digit axes (vector addition in F_q^d is
    digitwise mod p).
    """
    if k < 1:
        raise PreconditionFailed("k must be >= 1")
    if len(ps) and len(ps) ** k >= 2**62:
        raise SizeCapExceeded(
            f"|E|^k = {len(ps)**k} overflows exact int64 counting",
            required=len(ps) ** k,
            cap=2**62,
        )
    if cap is not None:
        check_space(ps.space_size, cap)
    ctx = ps.ctx
    p, r = ctx.p, ctx.r
    shape = (p,) * (ps.d * r)
    base = ps.bitmap.astype(np.int64).reshape(shape)
    ndim = base.ndim
    shifts = []
    for e in ps.indices.tolist():
        digits = [(e // p**u) % p for u in range(ndim)]
        shifts.append((tuple(digits[::-1]), tuple(range(ndim))))
    table = base
    for _ in range(k - 1):
        acc = np.zeros(shape, dtype=np.int64)
        for shift, axes in shifts:
            acc += np.roll(table, shift, axis=axes)
        table = acc
    counts = table.reshape(-1)
    total = int(counts.sum())
    if total != len(ps) ** k:
        raise AssertionError("representation counts do not total |E|^k")
    return CountTable(counts=counts, k=k)


def additive_energy(ps: PointSet, k: int, cap: int | None = None) -> int:
    """T_k(E) = sum_v r_k(v)^2, the number of equal-sum ordered 2k-tuples."""
    counts = rep_counts(ps, k, cap).counts
    if len(ps) and len(ps) ** (2 * k - 1) < 2**62:
        return int(np.sum(counts * counts))
    return int(np.sum(counts.astype(object) ** 2))


@dataclass(frozen=True)
class DoublingReport:
    """Sumset size |E+E| and doubling ratio K = |E+E|/|E|."""

    sumset_size: int
    ratio: Fraction


def doubling(ps: PointSet) -> DoublingReport:
    if len(ps) == 0:
        raise PreconditionFailed("doubling of an empty set is undefined")
    size = rep_counts(ps, 2).support_size
    return DoublingReport(sumset_size=size, ratio=Fraction(size, len(ps)))


def require_on_sphere(ps: PointSet, radius: int = 1) -> None:
    """Raise NotOnSphere unless every point of E has the given norm."""
    norms = norm_table(ps.ctx, ps.d)
    if len(ps) and not np.all(norms[ps.indices] == radius % ps.ctx.q):
        off = int(ps.indices[norms[ps.indices] != radius % ps.ctx.q][0])
        raise NotOnSphere(
            f"point {decode_vector(ps.ctx, ps.d, off)} has norm "
            f"{int(norms[off])}, expected {radius}"
        )


@dataclass(frozen=True)
class EnergyInequalityReport:
    """Both sides of |T_k - |E|^{2k-1}/q| <= q^{(d-1)/2} sqrt(T_k T_{k-1})."""

    k: int
    t_k: int
    t_km1: int
    lhs: Fraction
    rhs: float
    holds: bool
    slack: float


def energy_inequality_check(ps: PointSet, k: int, radius: int = 1,
                            cap: int | None = None) -> EnergyInequalityReport:
    """Check the energy growth inequality for subsets of a sphere.

    The left side is exact rational arithmetic; the right side is a float,
    so a relative 1e-12 guard absorbs rounding of a true inequality.
    """
    if k < 2:
        raise PreconditionFailed("the inequality needs k >= 2")
    require_on_sphere(ps, radius)
    q = ps.ctx.q
    t_k = additive_energy(ps, k, cap)
    t_km1 = len(ps) if k == 2 else additive_energy(ps, k - 1, cap)
    lhs = abs(Fraction(t_k) - Fraction(len(ps) ** (2 * k - 1), q))
    rhs = float(q ** ((ps.d - 1) / 2) * np.sqrt(float(t_k) * float(t_km1)))
    holds = float(lhs) <= rhs * (1 + 1e-12) + 1e-12
    return EnergyInequalityReport(
        k=k, t_k=t_k, t_km1=t_km1, lhs=lhs, rhs=rhs, holds=holds,
        slack=rhs - float(lhs),
    )


# ---- tuple enumeration ----


def _tuples_by_sum(ps: PointSet, k: int) -> dict:
    """Group all ordered k-tuples of E by their sum: {v: [(e_1..e_k), ...]}."""
    if len(ps) ** k > MAX_EXHAUSTIVE_TUPLES:
        raise SizeCapExceeded(
            f"{len(ps)**k} ordered {k}-tuples exceed the exhaustive cap",
            required=len(ps) ** k,
            cap=MAX_EXHAUSTIVE_TUPLES,
        )
    ctx = ps.ctx
    n = ps.space_size
    move = {
        int(e): np.asarray(vadd(ctx, ps.d, np.arange(n, dtype=np.int64), int(e)))
        for e in ps.indices.tolist()
    }
    items = [((), 0)]
    for _ in range(k):
        items = [(t + (e,), int(move[e][s])) for (t, s) in items for e in move]
    buckets: dict[int, list] = {}
    for t, s in items:
        buckets.setdefault(s, []).append(t)
    return buckets


def _proper_subset_sums(ctx, d: int, tup: tuple) -> frozenset:
    """Sums over every nonempty proper subset of positions of the tuple."""
    k = len(tup)
    sums = []
    for mask in range(1, 2**k - 1):
        s = 0
        for i in range(k):
            if mask >> i & 1:
                s = vadd(ctx, d, s, tup[i])
        sums.append(int(s))
    return frozenset(sums)


def _signature(ctx, d: int, tup: tuple, total: int):
    """Goodness signature, or None if the tuple can never sit in a good pair.

    A tuple is immediately disqualified when some nonempty subset sums to 0
    (a signed partial sum against J = empty vanishes) or to the full sum
    (it vanishes against J = full).
    """
    sig = _proper_subset_sums(ctx, d, tup)
    if 0 in sig or total in sig:
        return None
    return sig


def is_good_tuple(ps: PointSet, a: tuple, b: tuple) -> bool:
    """Exact goodness test for one k-energy tuple (used by oracles and checks)."""
    ctx, d = ps.ctx, ps.d
    sa = 0
    for e in a:
        sa = vadd(ctx, d, sa, e)
    sb = 0
    for e in b:
        sb = vadd(ctx, d, sb, e)
    if sa != sb:
        raise PreconditionFailed("not an energy tuple: side sums differ")
    if sa == 0:
        return False
    siga = _signature(ctx, d, a, sa)
    sigb = _signature(ctx, d, b, sb)
    return siga is not None and sigb is not None and not (siga & sigb)


@dataclass(frozen=True)
class GoodCountResult:
    """Exact count (exhaustive mode) or seeded estimate (sample mode) of T_k^good."""

    k: int
    mode: str
    count: int | None = None
    estimate: float | None = None
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def value(self) -> float:
        return self.count if self.mode == "exhaustive" else self.estimate


def good_energy_count(ps: PointSet, k: int, mode: str = "auto",
                      samples: int = 100_000, seed: int = 0) -> GoodCountResult:
    """Count k-energy tuples whose signed partial sums all avoid zero.

    Exhaustive mode (k in {2, 3}) joins tuples on their bucket sum and counts
    ordered pairs with disjoint goodness signatures, grouped by signature so
    the join cost scales with distinct signatures, not tuples. Sample mode
    draws tuples from E^{2k-1} with the last element solved and returns an
    estimate with its standard error; it is never exact.
    """
    if mode == "auto":
        mode = "exhaustive" if k in EXHAUSTIVE_K else "sample"
    if mode == "exhaustive":
        if k not in EXHAUSTIVE_K:
            raise InfeasibleSize(f"exhaustive good counting supports k in {EXHAUSTIVE_K}")
        return GoodCountResult(k=k, mode="exhaustive", count=_good_count_exhaustive(ps, k))
    if mode != "sample":
        raise PreconditionFailed(f"unknown mode {mode!r}")
    return _good_count_sampled(ps, k, samples, seed)


def _good_count_exhaustive(ps: PointSet, k: int) -> int:
    ctx, d = ps.ctx, ps.d
    total = 0
    for v, tuples in _tuples_by_sum(ps, k).items():
        if v == 0:
            continue
        groups: dict[frozenset, int] = {}
        for t in tuples:
            sig = _signature(ctx, d, t, v)
            if sig is not None:
                groups[sig] = groups.get(sig, 0) + 1
        sigs = list(groups.items())
        for i, (f, cf) in enumerate(sigs):
            for g, cg in sigs[i:]:
                if not (f & g):
                    # f == g is impossible here: a signature meets itself
                    total += 2 * cf * cg
    return total


def _good_count_sampled(ps: PointSet, k: int, samples: int, seed: int) -> GoodCountResult:
    if samples < 1:
        raise PreconditionFailed("need at least one sample")
    ctx, d = ps.ctx, ps.d
    rng = np.random.default_rng(seed)
    elems = ps.indices
    hits = 0
    for _ in range(samples):
        draw = elems[rng.integers(0, len(elems), size=2 * k - 1)].tolist()
        a = tuple(draw[:k])
        b_head = tuple(draw[k:])
        sa = 0
        for e in a:
            sa = vadd(ctx, d, sa, e)
        sb_head = 0
        for e in b_head:
            sb_head = vadd(ctx, d, sb_head, e)
        b_last = int(vsub(ctx, d, sa, sb_head))
        if b_last in ps and is_good_tuple(ps, a, b_head + (b_last,)):
            hits += 1
    domain = len(ps) ** (2 * k - 1)
    phat = hits / samples
    return GoodCountResult(
        k=k,
        mode="sample",
        estimate=phat * domain,
        stderr=float(np.sqrt(phat * (1 - phat) / samples)) * domain,
        samples=samples,
        seed=seed,
    )


# ---- classification ----


@dataclass(frozen=True)
class EnergyTuple:
    """One k-energy tuple with its classification flags."""

    a: tuple
    b: tuple
    independent: bool
    nondegenerate: bool
    good: bool

    @property
    def category(self) -> str:
        if not self.independent:
            return "dep"
        if not self.nondegenerate:
            return "zero"
        if not self.good:
            return "bad"
        return "star"


@dataclass(frozen=True)
class Classification:
    """Partition of all k-energy tuples by the failure categories.

    Categories are assigned by priority dep > zero > bad, so they are
    disjoint and T_k = T_dep + T_0 + T_bad + T_star exactly. T_good counts
    tuples passing the goodness test alone, regardless of the other flags.
    """

    k: int
    t_k: int
    t_dep: int
    t_zero: int
    t_bad: int
    t_star: int
    t_good: int


def classified_tuples(ps: PointSet, k: int, radius: int = 1):
    """Yield every k-energy tuple of E ⊆ sphere with all three flags set.

    The independence flag tests whether the shifted differences
    {x_2..x_k, y_1..y_k} (with x_i = a_i - a_1, y_j = b_j - a_1) attain the
    maximal possible rank 2k-2; the forced relation sum(x) = sum(y) makes
    literal independence of the 2k-1 vectors unattainable. The degeneracy
    flag tests that all pairwise distances among the 2k points are nonzero.
    """
    if k not in EXHAUSTIVE_K:
        raise InfeasibleSize(f"classification supports k in {EXHAUSTIVE_K}")
    require_on_sphere(ps, radius)
    ctx, d = ps.ctx, ps.d
    counts = rep_counts(ps, k).counts
    pairs = int(np.sum(counts * counts))
    if pairs > MAX_CLASSIFY_PAIRS:
        raise SizeCapExceeded(
            f"{pairs} energy tuples exceed the classification cap",
            required=pairs,
            cap=MAX_CLASSIFY_PAIRS,
        )
    norms = norm_table(ctx, d)
    elems = ps.indices.tolist()
    pos = {e: i for i, e in enumerate(elems)}
    # null-difference table over E x E and decoded coordinates, computed once
    dist0 = np.zeros((len(elems), len(elems)), dtype=bool)
    for i, e in enumerate(elems):
        dist0[i] = norms[np.asarray(vsub(ctx, d, e, ps.indices))] == 0
    coords = {e: decode_vector(ctx, d, e) for e in elems}

    def row_sub(cb, ca):
        if ctx.r == 1:
            return [(x - y) % ctx.p for x, y in zip(cb, ca)]
        return [int(ctx.sub(x, y)) for x, y in zip(cb, ca)]

    buckets = _tuples_by_sum(ps, k)
    for v, tuples in buckets.items():
        enriched = []
        for t in tuples:
            sig = _signature(ctx, d, t, v)
            tp = tuple(pos[e] for e in t)
            dists_ok = not any(
                dist0[tp[i], tp[j]] for i in range(k) for j in range(i + 1, k)
            )
            enriched.append((t, tp, sig, dists_ok))
        for a, pa, sig_a, a_ok in enriched:
            base = coords[a[0]]
            # the forced relation sum(x_i) = sum(y_j) makes x_k a combination
            # of the others, so the rank of {x_2..x_k, y_1..y_k} equals the
            # rank of the 2k-2 rows {x_2..x_{k-1}, y_1..y_k}
            a_rows = [row_sub(coords[a[i]], base) for i in range(1, k - 1)]
            for b, pb, sig_b, b_ok in enriched:
                rows = a_rows + [row_sub(coords[bj], base) for bj in b]
                independent = matrix_rank(ctx, rows) == 2 * k - 2
                cross_ok = not any(dist0[i, j] for i in pa for j in pb)
                nondegenerate = a_ok and b_ok and cross_ok
                good = (
                    v != 0
                    and sig_a is not None
                    and sig_b is not None
                    and not (sig_a & sig_b)
                )
                yield EnergyTuple(
                    a=a, b=b, independent=independent,
                    nondegenerate=nondegenerate, good=good,
                )


def classify_tuples(ps: PointSet, k: int, radius: int = 1) -> Classification:
    """Tally the classification partition over all k-energy tuples."""
    t_k = t_dep = t_zero = t_bad = t_star = t_good = 0
    for tup in classified_tuples(ps, k, radius):
        t_k += 1
        t_good += tup.good
        cat = tup.category
        if cat == "dep":
            t_dep += 1
        elif cat == "zero":
            t_zero += 1
        elif cat == "bad":
            t_bad += 1
        else:
            t_star += 1
    return Classification(
        k=k, t_k=t_k, t_dep=t_dep, t_zero=t_zero, t_bad=t_bad,
        t_star=t_star, t_good=t_good,
    )


def star_tuples(ps: PointSet, k: int, radius: int = 1):
    """The tuples passing all three tests, as produced by classified_tuples."""
    for tup in classified_tuples(ps, k, radius):
        if tup.category == "star":
            yield tup


def brute_force_energy(ps: PointSet, k: int) -> int:
    """Independent oracle: count equal-sum 2k-tuples by direct enumeration.

    Joins the two sides on their sums with plain dict counting over
    itertools.product, sharing no code with the convolution path.
    """
    ctx, d = ps.ctx, ps.d
    elems = ps.indices.tolist()
    side: dict[int, int] = {}
    for t in itertools.product(elems, repeat=k):
        s = 0
        for e in t:
            s = vadd(ctx, d, s, e)
        side[s] = side.get(s, 0) + 1
    return sum(c * c for c in side.values())


def brute_force_good_count(ps: PointSet, k: int) -> int:
    """Independent oracle for T_k^good: test every equal-sum pair directly."""
    ctx, d = ps.ctx, ps.d
    elems = ps.indices.tolist()
    buckets: dict[int, list] = {}
    for t in itertools.product(elems, repeat=k):
        s = 0
        for e in t:
            s = vadd(ctx, d, s, e)
        buckets.setdefault(s, []).append(t)
    total = 0
    for tuples in buckets.values():
        for a in tuples:
            for b in tuples:
                if is_good_tuple(ps, a, b):
                    total += 1
    return total
