"""Spherical configurations, congruence fingerprints, and class counting.

An ordered tuple of points on a common sphere is treated as a configuration;
two configurations are congruent when an orthogonal map carries one to the
other, which for configurations with independent difference vectors is
equivalent to equality of their Gram matrices of pairwise dot products. The
class table over a sphere collects the configurations arising from star
energy tuples (independent, nondegenerate, good) and counts multiplicity per
Gram fingerprint.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

import numpy as np

from .energy import star_tuples
from .errors import (
    NotOnSphere,
    PreconditionFailed,
    SizeCapExceeded,
)
from .field_algebra import (
    FieldCtx,
    PointSet,
    decode_vector,
    encode_vector,
    matrix_rank,
    norm_table,
    sphere,
    vadd,
    vdot,
    vsub,
)

MAX_COPY_SET = 512
MAX_SPAN_ENUM = 5_000_000
MAX_UNORDERED_POINTS = 6


@dataclass(frozen=True)
class SphericalConfig:
    """An ordered tuple of points lying on a common sphere about a center."""

    ctx: FieldCtx
    d: int
    points: tuple
    center: int = 0
    radius: int = 1

    def __post_init__(self):
        norms = norm_table(self.ctx, self.d)
        for pt in self.points:
            if norms[vsub(self.ctx, self.d, pt, self.center)] != self.radius % self.ctx.q:
                raise NotOnSphere(
                    f"point {decode_vector(self.ctx, self.d, pt)} is not at distance "
                    f"{self.radius} from the center"
                )

    @property
    def n(self) -> int:
        return len(self.points)


def span_dimension(cfg: SphericalConfig) -> int:
    """dim Span(X - X): rank over F_q of the differences from the base point."""
    if cfg.n < 2:
        raise PreconditionFailed("span dimension needs at least 2 points")
    rows = [
        decode_vector(cfg.ctx, cfg.d, vsub(cfg.ctx, cfg.d, pt, cfg.points[0]))
        for pt in cfg.points[1:]
    ]
    return matrix_rank(cfg.ctx, rows)


def gram_matrix(cfg: SphericalConfig) -> np.ndarray:
    """Matrix of pairwise dot products [p_i . p_j] as field element encodings."""
    ctx, n = cfg.ctx, cfg.n
    if ctx.r == 1:
        coords = np.array(
            [decode_vector(ctx, cfg.d, pt) for pt in cfg.points], dtype=np.int64
        )
        return (coords @ coords.T) % ctx.p
    g = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            g[i, j] = vdot(ctx, cfg.d, cfg.points[i], cfg.points[j])
    return g


def gram_fingerprint(cfg: SphericalConfig) -> bytes:
    """Canonical byte string of the ordered configuration's Gram matrix.

    Invariant under every dot-product-preserving map of the points; prefixed
    with (q, d, n) so fingerprints from different ambient spaces never collide.
    """
    g = gram_matrix(cfg)
    head = f"{cfg.ctx.q},{cfg.d},{cfg.n}:".encode()
    return head + g.astype(np.int32).tobytes()


def unordered_fingerprint(cfg: SphericalConfig) -> bytes:
    """Fingerprint minimized over simultaneous row/column permutations."""
    if cfg.n > MAX_UNORDERED_POINTS:
        raise SizeCapExceeded(
            f"unordered canonicalization supports at most {MAX_UNORDERED_POINTS} points",
            required=cfg.n,
            cap=MAX_UNORDERED_POINTS,
        )
    g = gram_matrix(cfg)
    head = f"{cfg.ctx.q},{cfg.d},{cfg.n}:".encode()
    best = None
    for perm in itertools.permutations(range(cfg.n)):
        p = list(perm)
        body = g[np.ix_(p, p)].astype(np.int32).tobytes()
        if best is None or body < best:
            best = body
    return head + best


def fingerprint_hash(fp: bytes) -> str:
    return hashlib.sha256(fp).hexdigest()[:16]


# ---- congruence classes over a sphere ----


@dataclass(frozen=True)
class CongruenceClasses:
    """Congruence classes of star-tuple configurations on a sphere.

    multiplicities maps each ordered-Gram fingerprint to mu(X), the number of
    star tuples in the class; representatives holds one point tuple per class.
    """

    k: int
    multiplicities: dict
    representatives: dict
    unordered_count: int

    @property
    def count(self) -> int:
        return len(self.multiplicities)

    @property
    def total(self) -> int:
        return sum(self.multiplicities.values())

    def sorted_items(self):
        """Deterministic (fingerprint, mu, representative) rows."""
        return [
            (fp, self.multiplicities[fp], self.representatives[fp])
            for fp in sorted(self.multiplicities)
        ]


def tuple_config(ps: PointSet, a: tuple, b: tuple, radius: int = 1) -> SphericalConfig:
    """The ordered 2k-point configuration (a_1..a_k, b_1..b_k) of an energy tuple."""
    return SphericalConfig(ps.ctx, ps.d, tuple(a) + tuple(b), center=0, radius=radius)


def congruence_class_count(ps: PointSet, k: int, radius: int = 1) -> CongruenceClasses:
    """Enumerate star tuples, fingerprint each as a 2k-point configuration.

    Star tuples are exactly the Q-membership conditions: independent shifted
    differences, no null pairwise distances, and goodness.
    """
    mult: dict[bytes, int] = {}
    reps: dict[bytes, tuple] = {}
    unordered: set[bytes] = set()
    for tup in star_tuples(ps, k, radius):
        cfg = tuple_config(ps, tup.a, tup.b, radius)
        fp = gram_fingerprint(cfg)
        mult[fp] = mult.get(fp, 0) + 1
        if fp not in reps:
            reps[fp] = cfg.points
            unordered.add(unordered_fingerprint(cfg))
    return CongruenceClasses(
        k=k, multiplicities=mult, representatives=reps, unordered_count=len(unordered)
    )


# ---- degenerate span counting ----


def degenerate_span_count(ctx: FieldCtx, d: int, n: int, radius: int = 1,
                          cap: int | None = None) -> int:
    """Count (v_0..v_n) in (S^{d-1})^{n+1} with some v_i - v_0 in the
    all-nonzero-coefficient span of the other differences.

    Constructive enumeration: for each i, choose v_0, the other v_j, and a
    coefficient vector in (F_q^*)^{n-1}; v_i is then determined, kept when it
    lands on the sphere. Tuples are deduplicated across i and coefficients.
    """
    if n < 2:
        raise PreconditionFailed("need n >= 2 difference vectors")
    if d <= n:
        raise PreconditionFailed("degenerate span counting needs d > n")
    s = sphere(ctx, d, radius)
    q = ctx.q
    work = len(s) ** n * (q - 1) ** (n - 1) * n
    limit = MAX_SPAN_ENUM if cap is None else cap
    if work > limit:
        raise SizeCapExceeded(
            f"degenerate span enumeration needs {work} steps", required=work, cap=limit
        )
    elems = s.indices.tolist()
    nonzero = [c for c in range(1, q)]
    found: set[tuple] = set()
    for i in range(1, n + 1):
        others = [j for j in range(1, n + 1) if j != i]
        for v0 in elems:
            for rest in itertools.product(elems, repeat=n - 1):
                diffs = [vsub(ctx, d, vj, v0) for vj in rest]
                for coeffs in itertools.product(nonzero, repeat=n - 1):
                    acc = v0
                    for c, x in zip(coeffs, diffs):
                        scaled = encode_vector(
                            ctx,
                            tuple(
                                int(ctx.mul(c, xc))
                                for xc in decode_vector(ctx, d, x)
                            ),
                        )
                        acc = vadd(ctx, d, acc, scaled)
                    if acc in s:
                        tup = [None] * (n + 1)
                        tup[0] = v0
                        tup[i] = acc
                        for j, vj in zip(others, rest):
                            tup[j] = vj
                        found.add(tuple(tup))
    return len(found)


def degenerate_span_brute_force(ctx: FieldCtx, d: int, n: int, radius: int = 1) -> int:
    """Direct oracle: test every (n+1)-tuple on the sphere for the span condition."""
    s = sphere(ctx, d, radius)
    q = ctx.q
    elems = s.indices.tolist()
    nonzero = list(range(1, q))
    count = 0
    for tup in itertools.product(elems, repeat=n + 1):
        v0 = tup[0]
        diffs = [vsub(ctx, d, v, v0) for v in tup[1:]]
        hit = False
        for i in range(n):
            others = [diffs[j] for j in range(n) if j != i]
            for coeffs in itertools.product(nonzero, repeat=n - 1):
                acc = 0
                for c, x in zip(coeffs, others):
                    scaled = encode_vector(
                        ctx,
                        tuple(int(ctx.mul(c, xc)) for xc in decode_vector(ctx, d, x)),
                    )
                    acc = vadd(ctx, d, acc, scaled)
                if acc == diffs[i]:
                    hit = True
                    break
            if hit:
                break
        count += hit
    return count


# ---- isometric copy counting ----


def count_isometric_copies(cfg: SphericalConfig, ps: PointSet) -> int:
    """N(X): ordered tuples in E whose pairwise dot products match the configuration.

    Backtracking over positions, pruning candidates against every already
    placed point; this is the congruence criterion (x_i . x_j = v_i . v_j).
    """
    if cfg.n > 4:
        raise PreconditionFailed("copy counting supports at most 4 points")
    if len(ps) > MAX_COPY_SET:
        raise SizeCapExceeded(
            f"copy counting over {len(ps)} points exceeds cap", required=len(ps),
            cap=MAX_COPY_SET,
        )
    ctx, d = ps.ctx, ps.d
    g = gram_matrix(cfg)
    elems = ps.indices
    m = len(elems)
    dots = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        dots[i] = np.asarray(vdot(ctx, d, int(elems[i]), elems))
    total = 0
    stack = [()]
    while stack:
        partial = stack.pop()
        i = len(partial)
        mask = dots[np.arange(m), np.arange(m)] == g[i, i]
        for j, prev in enumerate(partial):
            mask &= dots[prev] == g[j, i]
        cand = np.nonzero(mask)[0]
        if i == cfg.n - 1:
            total += int(cand.size)
        else:
            stack.extend(partial + (int(c),) for c in cand)
    return total


# ---- orthogonal transforms for fingerprint invariance checks ----


def signed_permutation(ctx: FieldCtx, perm, signs) -> tuple:
    """Rows of the matrix sending e_i to signs[i] * e_{perm[i]}; lies in O(d)."""
    d = len(perm)
    rows = []
    for i in range(d):
        row = [0] * d
        row[perm[i]] = 1 if signs[i] > 0 else int(ctx.neg(1))
        rows.append(tuple(row))
    return tuple(rows)


def random_signed_permutation(ctx: FieldCtx, d: int, rng) -> tuple:
    perm = rng.permutation(d).tolist()
    signs = rng.choice([-1, 1], size=d).tolist()
    return signed_permutation(ctx, perm, signs)


def apply_matrix(ctx: FieldCtx, d: int, rows: tuple, point: int) -> int:
    """Image of an encoded point under the matrix with the given rows."""
    coords = decode_vector(ctx, d, point)
    out = []
    for row in rows:
        acc = 0
        for c, x in zip(row, coords):
            acc = ctx.add(acc, ctx.mul(c, x))
        out.append(int(acc))
    return encode_vector(ctx, tuple(out))


def transform_config(cfg: SphericalConfig, rows: tuple) -> SphericalConfig:
    pts = tuple(apply_matrix(cfg.ctx, cfg.d, rows, pt) for pt in cfg.points)
    center = apply_matrix(cfg.ctx, cfg.d, rows, cfg.center)
    return SphericalConfig(cfg.ctx, cfg.d, pts, center=center, radius=cfg.radius)
