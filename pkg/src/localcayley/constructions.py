"""Explicit constructions: large-eigenvalue sets, doubling bounds, independent sets.

Three builders with exact certificates:

* ``build_bad_set`` picks a spherical connection set disjoint from the
  difference set of a union of hyperplane translates, which forces the
  second eigenvalue up to |E|/q^(1/r) — far above the square-root decay
  seen for full spheres.  The certificate re-derives the inequality from
  the exact edge count e(H, H) = 0, so it never rests on floating point.
* ``doubling_eigenvalue_bound`` turns small additive doubling |E+E| = K|E|
  into an eigenvalue lower bound through the exact energy chain
  T_2 >= |E|^3 / K and T_2 <= |E|^4/q^d + mu^2 |E|.
* ``independent_set_no_good_tuples`` greedily deletes symmetric pairs from
  a sphere until no good 2-energy tuples remain, certifying the result
  with the exhaustive counter rather than the construction logic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .energy import _tuples_by_sum, additive_energy, good_energy_count, is_good_tuple
from .errors import (
    InfeasibleSize,
    InvariantViolation,
    PreconditionFailed,
)
from .field_algebra import (
    FieldCtx,
    PointSet,
    check_space,
    coord,
    sphere,
    vadd,
    vneg,
)
from .spectral import MultiSet, count_edges_between, second_eigenvalue

MU_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# hyperplane-translate construction


def subspace_column(ctx: FieldCtx) -> list[int]:
    """Indices of the F_p-subspace of F_q spanned by 1, x, ..., x^(r-2).

    In the little-endian digit encoding these are exactly the field elements
    with index below p^(r-1) (top coefficient zero), closed under addition
    and negation, with p^(r-1) elements.
    """
    return list(range(ctx.p ** (ctx.r - 1)))


def translate_union(ctx: FieldCtx, d: int, cap: int | None = None) -> PointSet:
    """H = {v : last coordinate lies in the subspace}, a subgroup of size q^(d-1) p^(r-1)."""
    n = ctx.q**d
    check_space(n, cap)
    idx = np.arange(n, dtype=np.int64)
    last = coord(ctx, d, idx, d - 1)
    members = idx[last < ctx.p ** (ctx.r - 1)]
    return PointSet(ctx, d, members, cap=cap)


@dataclass
class BadSetCertificate:
    """A connection set E on the unit sphere avoiding H - H, with verified mu bound.

    mixing_lower is the exact rational |E| |H| / q^d forced by e(H, H) = 0;
    it always dominates bound = |E| / (2 q^(1/r)), so the inequality is
    certified in exact arithmetic and the float mu is only cross-checked.
    """

    ctx: FieldCtx
    d: int
    subspace: tuple
    translate_set: PointSet
    connection: PointSet
    epsilon: Fraction
    mu: float
    bound: float
    mixing_lower: Fraction
    edges_hh: int
    holds: bool

    def verify(self) -> None:
        """Re-derive every certificate claim from scratch; raise on any failure."""
        ctx, d = self.ctx, self.d
        h, e = self.translate_set, self.connection
        if len(h) != ctx.q ** (d - 1) * ctx.p ** (ctx.r - 1):
            raise InvariantViolation("translate-union size is wrong")
        if not e.symmetric:
            raise InvariantViolation("connection set is not symmetric")
        norms = {int(ps_norm) for ps_norm in _norms_of(e)}
        if norms - {1}:
            raise InvariantViolation("connection set leaves the unit sphere")
        diff_hits = _difference_hits(h, e)
        if diff_hits:
            raise InvariantViolation("(H - H) meets E")
        hm = MultiSet.uniform(h.indices)
        if count_edges_between(e, hm, hm) != self.edges_hh or self.edges_hh != 0:
            raise InvariantViolation("edge count e(H, H) is not zero")
        lower = Fraction(len(e) * len(h), ctx.q**d)
        if lower != self.mixing_lower:
            raise InvariantViolation("stored mixing lower bound is stale")
        if lower < Fraction(len(e)) / (2 * ctx.p):
            raise InvariantViolation("mixing lower bound fails to dominate the claim")
        mu, _ = second_eigenvalue(e)
        if mu < self.bound - MU_MARGIN or abs(mu - self.mu) > MU_MARGIN:
            raise InvariantViolation("computed mu contradicts the certificate")


def _norms_of(ps: PointSet) -> np.ndarray:
    from .field_algebra import norm_table

    return norm_table(ps.ctx, ps.d)[ps.indices]


def _difference_hits(h: PointSet, e: PointSet) -> int:
    """Exact count of pairs (u, w) in H x H with u - w in E."""
    hm = MultiSet.uniform(h.indices)
    return count_edges_between(e, hm, hm)


def build_bad_set(p: int, r: int, d: int, m: int,
                  seed: int | None = None, cap: int | None = None) -> BadSetCertificate:
    """Construct E of size ~m on the unit sphere with mu >= |E| / (2 q^(1/r)).

    The sphere points whose last coordinate escapes the subspace are taken
    in increasing index order, symmetric pairs {x, -x} atomically (so the
    achieved size is m rounded up to the next pair boundary in odd
    characteristic). A seed switches to random pair selection for
    experiments; the default is deterministic.
    """
    if r < 2:
        raise PreconditionFailed("need r >= 2 so that epsilon = 1/r < 1")
    from .field_algebra import build_field

    ctx = build_field(p, r)
    h = translate_union(ctx, d, cap)
    s = sphere(ctx, d, 1, cap=cap)
    threshold = p ** (r - 1)
    candidates = [v for v in s.indices.tolist()
                  if coord(ctx, d, v, d - 1) >= threshold]
    if m > len(candidates):
        raise InfeasibleSize(
            f"requested {m} points but only {len(candidates)} sphere points avoid H - H"
        )
    order: list[int] = candidates
    if seed is not None:
        rng = np.random.default_rng(seed)
        order = [candidates[i] for i in rng.permutation(len(candidates)).tolist()]
    chosen: list[int] = []
    used = set()
    for v in order:
        if len(chosen) >= m:
            break
        if v in used:
            continue
        w = int(vneg(ctx, d, v))
        if w in used:
            continue
        used.add(v)
        used.add(w)
        chosen.append(v)
        if w != v:
            chosen.append(w)
    if len(chosen) < m:
        raise InfeasibleSize(
            f"only {len(chosen)} of the requested {m} points are available in pairs"
        )
    e = PointSet(ctx, d, chosen, cap=cap)
    mu, _ = second_eigenvalue(e, cap)
    bound = len(e) / (2 * ctx.q ** (1 / r))
    cert = BadSetCertificate(
        ctx=ctx,
        d=d,
        subspace=tuple(subspace_column(ctx)),
        translate_set=h,
        connection=e,
        epsilon=Fraction(1, r),
        mu=mu,
        bound=bound,
        mixing_lower=Fraction(len(e) * len(h), ctx.q**d),
        edges_hh=_difference_hits(h, e),
        holds=mu >= bound - MU_MARGIN,
    )
    cert.verify()
    return cert


# ---------------------------------------------------------------------------
# doubling constant to eigenvalue lower bound


@dataclass(frozen=True)
class DoublingBoundReport:
    """Exact chain from small doubling to an eigenvalue lower bound."""

    size: int
    sumset_size: int
    doubling: Fraction
    t_2: int
    mu: float
    implied_lower: float
    chain_lower_holds: bool
    chain_upper_holds: bool
    holds: bool


def doubling_eigenvalue_bound(ps: PointSet, cap: int | None = None) -> DoublingBoundReport:
    """Derive mu >= sqrt((T_2 - |E|^4/q^d) / |E|) from the doubling constant.

    Checks the two links exactly where integer arithmetic allows:
    T_2 * |E+E| >= |E|^4 (Cauchy-Schwarz on sum-representation counts) and
    T_2 <= |E|^4/q^d + mu^2 |E| (spectral moment), then reports the implied
    lower bound. Requires |E+E| < q^d / 2, the small-doubling regime.
    """
    if not len(ps):
        raise PreconditionFailed("doubling of the empty set is undefined")
    ctx, d = ps.ctx, ps.d
    n = ps.space_size
    idx = ps.indices
    sums = np.asarray(vadd(ctx, d, idx[:, None], idx[None, :])).ravel()
    sumset = int(np.unique(sums).size)
    if 2 * sumset >= n:
        raise PreconditionFailed(
            f"|E+E| = {sumset} is not below q^d / 2 = {n / 2}: no small-doubling bound"
        )
    size = len(ps)
    t_2 = additive_energy(ps, 2, cap)
    mu, _ = second_eigenvalue(ps, cap)
    chain_lower = t_2 * sumset >= size**4
    main = size**4 / n
    chain_upper = t_2 <= main + mu * mu * size + 1e-6
    implied = float(np.sqrt(max(0.0, (t_2 - main) / size)))
    return DoublingBoundReport(
        size=size,
        sumset_size=sumset,
        doubling=Fraction(sumset, size),
        t_2=t_2,
        mu=mu,
        implied_lower=implied,
        chain_lower_holds=chain_lower,
        chain_upper_holds=chain_upper,
        holds=chain_lower and chain_upper and mu >= implied - MU_MARGIN,
    )


# ---------------------------------------------------------------------------
# greedy independent set with no good 2-energy tuples


@dataclass(frozen=True)
class IndependentSetReport:
    """A spherical set with exactly zero good 2-energy tuples, certified."""

    connection: PointSet
    sphere_size: int
    pairs_removed: int
    threshold: float
    ratio: float
    certified_good_count: int


def independent_set_no_good_tuples(ctx: FieldCtx, d: int, k: int,
                                   seed: int | None = None, radius: int = 1,
                                   cap: int | None = None) -> IndependentSetReport:
    """Delete symmetric pairs from the radius-j sphere until no good tuple survives.

    Greedy set cover on the hypergraph whose edges are the good k-energy
    tuples: each round removes the pair {x, -x} covering the most remaining
    tuples (ties to the lowest index, or seeded-random when a seed is
    given). The final count is certified by the exhaustive counter, not by
    the deletion bookkeeping.
    """
    if k != 2:
        raise PreconditionFailed("only k = 2 is supported at desk scale")
    s = sphere(ctx, d, radius, cap=cap)
    threshold = float(ctx.q ** (d / (2 * k - 1)))
    if not len(s):
        empty = PointSet(ctx, d, [], cap=cap)
        return IndependentSetReport(
            connection=empty, sphere_size=0, pairs_removed=0,
            threshold=threshold, ratio=0.0, certified_good_count=0,
        )
    tuples = []
    for total, bucket in _tuples_by_sum(s, k).items():
        if total == 0:
            continue
        for a in bucket:
            for b in bucket:
                if is_good_tuple(s, a, b):
                    tuples.append(a + b)
    pair_of = {}
    for v in s.indices.tolist():
        w = int(vneg(ctx, d, v))
        pair_of[v] = (min(v, w), max(v, w))
    rng = np.random.default_rng(seed) if seed is not None else None
    alive = set(s.indices.tolist())
    removed = 0
    while tuples:
        cover: dict[tuple, int] = {}
        for t in tuples:
            for pair in {pair_of[e] for e in t}:
                cover[pair] = cover.get(pair, 0) + 1
        best_count = max(cover.values())
        tied = sorted(p for p, c in cover.items() if c == best_count)
        pick = tied[int(rng.integers(len(tied)))] if rng is not None else tied[0]
        alive -= set(pick)
        removed += 1
        tuples = [t for t in tuples if not (set(pick) & set(t))]
    e = PointSet(ctx, d, sorted(alive), cap=cap)
    certified = good_energy_count(e, k, mode="exhaustive").value
    if certified != 0:
        raise InvariantViolation(
            f"greedy deletion claims zero good tuples but the counter finds {certified}"
        )
    return IndependentSetReport(
        connection=e,
        sphere_size=len(s),
        pairs_removed=removed,
        threshold=threshold,
        ratio=len(e) / threshold,
        certified_good_count=certified,
    )
