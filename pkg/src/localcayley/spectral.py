"""Character sums of point sets: eigenvalues, second eigenvalue, walks, mixing.

For E ⊆ F_q^d the eigenvalues of the Cayley graph Cay(F_q^d, E) are the
character sums lambda_m = sum_{x in E} chi(m.x) indexed by m in [0, q^d),
where chi is the canonical additive character. The fast path decomposes
F_q^d as (F_p)^{d r} additively, applies a one-dimensional p-point character
transform along every base-p axis, and reindexes the result through the
trace pairing of the power basis. A direct-summation path is kept as an
independent oracle for small spaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    NumericalDrift,
    PreconditionFailed,
    SizeCapExceeded,
)
from .field_algebra import DEFAULT_INDEX_CAP, FieldCtx, PointSet, check_space, vdot, vsub

NAIVE_CAP = 10_000
SYMMETRY_TOL = 1e-9
INTEGRALITY_TOL = 1e-6


@dataclass(frozen=True)
class Spectrum:
    """All Cayley-graph eigenvalues of a point set, with the second eigenvalue.

    values[m] = sum_{x in E} chi(m.x); values[0] is the degree |E|. mu is
    max_{m != 0} |values[m]| and argmax_m is the smallest index attaining it.
    """

    values: np.ndarray
    size: int
    mu: float
    argmax_m: int

    @property
    def degree(self) -> int:
        return self.size


def _digit_tensor(ps: PointSet) -> np.ndarray:
    """Indicator of E reshaped to (p,)*(d*r); digit u of the index is axis ndim-1-u."""
    p, r = ps.ctx.p, ps.ctx.r
    return ps.bitmap.astype(np.complex128).reshape((p,) * (ps.d * r))


def _trace_pairing_matrix(ctx: FieldCtx) -> np.ndarray:
    """T[s, t] = Tr(alpha^{s+t}) for the power basis 1, alpha, ..., alpha^{r-1}."""
    r = ctx.r
    if r == 1:
        return np.array([[1]], dtype=np.int64)
    alpha = ctx.p  # encoding of the basis generator
    powers = [1]
    for _ in range(2 * r - 2):
        powers.append(int(ctx.mul(powers[-1], alpha)))
    return np.array(
        [[ctx.trace(powers[s + t]) for t in range(r)] for s in range(r)], dtype=np.int64
    )


def _trace_perm(ctx: FieldCtx, d: int) -> np.ndarray:
    """Index permutation J with spectrum[m] = transform[J[m]].

    The transform computes G(j) = sum_v f(v) omega^{sum_u j_u v_u} over base-p
    digits; the eigenvalue at m needs j-digits T @ m-digits within each field
    coordinate block, where T is the trace pairing matrix.
    """
    p, r, q = ctx.p, ctx.r, ctx.q
    m = np.arange(q**d, dtype=np.int64)
    if r == 1:
        return m
    T = _trace_pairing_matrix(ctx)
    J = np.zeros_like(m)
    for i in range(d):
        block = (m // q**i) % q
        digits = [(block // p**s) % p for s in range(r)]
        for t in range(r):
            jt = sum(int(T[s, t]) * digits[s] for s in range(r)) % p
            J += jt * p ** (i * r + t)
    return J


def _perm_for(ctx: FieldCtx, d: int) -> np.ndarray:
    perm = ctx._perm_cache.get(d)
    if perm is None:
        perm = _trace_perm(ctx, d)
        ctx._perm_cache[d] = perm
    return perm


def fast_transform_values(ps: PointSet) -> np.ndarray:
    """All lambda_m via per-axis character transforms plus the trace reindexing."""
    ctx = ps.ctx
    p = ctx.p
    omega = np.exp(2j * np.pi / p)
    W = omega ** (np.outer(np.arange(p), np.arange(p)))
    t = _digit_tensor(ps)
    for ax in range(t.ndim):
        t = np.moveaxis(np.tensordot(W, t, axes=([1], [ax])), 0, ax)
    flat = t.reshape(-1)
    return flat[_perm_for(ctx, ps.d)]


def naive_spectrum(ps: PointSet, cap: int | None = NAIVE_CAP) -> np.ndarray:
    """Direct-summation oracle: lambda_m = sum_{x in E} chi(m.x), one m at a time."""
    n = ps.space_size
    if cap is not None and n > cap:
        raise SizeCapExceeded(
            f"naive transform over {n} indices exceeds cap {cap}", required=n, cap=cap
        )
    ctx = ps.ctx
    out = np.zeros(n, dtype=np.complex128)
    for m in range(n):
        pair = vdot(ctx, ps.d, m, ps.indices)
        out[m] = ctx.char_value(np.asarray(pair)).sum()
    return out


def fourier_spectrum(ps: PointSet, cap: int | None = None) -> Spectrum:
    """Spectrum of Cay(F_q^d, E) with degree, mu, and argmax recorded.

    Raises NumericalDrift if lambda_0 strays from |E| or, for symmetric E,
    if any eigenvalue has imaginary part above 1e-9.
    """
    if len(ps) == 0:
        raise PreconditionFailed("spectrum of an empty set is degenerate")
    check_space(ps.space_size, DEFAULT_INDEX_CAP if cap is None else cap)
    values = fast_transform_values(ps)
    if abs(values[0] - len(ps)) > SYMMETRY_TOL:
        raise NumericalDrift(f"lambda_0 = {values[0]} differs from |E| = {len(ps)}")
    if ps.symmetric and np.abs(values.imag).max() > SYMMETRY_TOL:
        raise NumericalDrift("symmetric set produced non-real eigenvalues")
    mags = np.abs(values[1:])
    if mags.size == 0:
        mu, arg = 0.0, 0
    else:
        mu = float(mags.max())
        # several m may be tied at the maximum up to float noise; report the
        # smallest index attaining it within a 1e-9 relative tolerance
        tied = np.nonzero(mags >= mu - max(mu, 1.0) * 1e-9)[0]
        arg = int(tied[0]) + 1
    return Spectrum(values=values, size=len(ps), mu=mu, argmax_m=arg)


def second_eigenvalue(ps: PointSet, cap: int | None = None) -> tuple[float, int]:
    """mu = max_{m != 0} |lambda_m| and the smallest attaining index."""
    spec = fourier_spectrum(ps, cap)
    return spec.mu, spec.argmax_m


def integer_nearest(x: float, tol: float = INTEGRALITY_TOL, what: str = "value") -> int:
    """Round a float that is supposed to be an integer; drift beyond tol is an error."""
    nearest = round(x)
    if abs(x - nearest) > tol:
        raise NumericalDrift(f"{what} {x!r} is {abs(x - nearest):.3g} from an integer")
    return int(nearest)


def closed_walk_count(ps: PointSet, length: int, cap: int | None = None) -> int:
    """Number of closed walks of the given length, via trace(A^L) = sum_m lambda_m^L.

    Requires a symmetric set (undirected graph). The spectral sum must land
    within 1e-6 of an integer or NumericalDrift is raised.
    """
    if length < 1:
        raise PreconditionFailed("walk length must be >= 1")
    if not ps.symmetric:
        raise PreconditionFailed("closed walk identity needs a symmetric set")
    spec = fourier_spectrum(ps, cap)
    total = float(np.sum(spec.values.real.astype(np.float64) ** length))
    return integer_nearest(total, what=f"closed {length}-walk sum")


@dataclass(frozen=True)
class MultiSet:
    """A multiset of vertices: distinct support indices with positive multiplicities."""

    support: np.ndarray
    mult: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        mult = np.asarray(self.mult, dtype=np.int64)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mult", mult)
        if support.shape != mult.shape or support.ndim != 1:
            raise PreconditionFailed("support and multiplicities must align")
        if np.unique(support).size != support.size:
            raise PreconditionFailed("multiset support must be distinct")
        if support.size and mult.min() < 1:
            raise PreconditionFailed("multiplicities must be >= 1")

    @classmethod
    def uniform(cls, indices) -> "MultiSet":
        return cls(np.unique(np.asarray(list(indices), dtype=np.int64)),
                   np.ones(len(set(indices)), dtype=np.int64))

    @classmethod
    def from_draws(cls, draws) -> "MultiSet":
        """Collapse a sequence of (possibly repeated) indices into a multiset."""
        support, mult = np.unique(np.asarray(list(draws), dtype=np.int64), return_counts=True)
        return cls(support, mult)

    @property
    def size(self) -> int:
        return int(self.mult.sum())

    @property
    def sq_norm(self) -> int:
        return int((self.mult.astype(object) ** 2).sum())


@dataclass(frozen=True)
class MixingReport:
    """Outcome of one expander-mixing inequality check on a pair of multisets."""

    edges: int
    main_term: Fraction
    deviation: Fraction
    bound: float
    slack: float
    holds: bool


def count_edges_between(ps: PointSet, u_set: MultiSet, w_set: MultiSet) -> int:
    """e(U, W) = sum over u, w of m(u) m(w) [u - w in E], exactly."""
    ctx = ps.ctx
    total = 0
    for u, mu_mult in zip(u_set.support.tolist(), u_set.mult.tolist()):
        diffs = np.asarray(vsub(ctx, ps.d, u, w_set.support))
        hit = ps.bitmap[diffs]
        total += mu_mult * int(np.dot(hit, w_set.mult))
    return total


def mixing_check(ps: PointSet, u_set: MultiSet, w_set: MultiSet,
                 cap: int | None = None) -> MixingReport:
    """Check |e(U,W) - |E||U||W|/q^d| <= mu * sqrt(sum m(u)^2) * sqrt(sum m(w)^2).

    The edge count and main term are exact; the bound uses the float mu, so a
    relative 1e-9 guard absorbs roundoff when the two sides coincide.
    """
    if not ps.symmetric:
        raise PreconditionFailed("mixing inequality needs a symmetric set")
    edges = count_edges_between(ps, u_set, w_set)
    main = Fraction(len(ps) * u_set.size * w_set.size, ps.space_size)
    deviation = abs(edges - main)
    mu, _ = second_eigenvalue(ps, cap)
    bound = mu * float(np.sqrt(u_set.sq_norm) * np.sqrt(w_set.sq_norm))
    holds = float(deviation) <= bound * (1 + 1e-9) + 1e-9
    return MixingReport(
        edges=edges,
        main_term=main,
        deviation=deviation,
        bound=bound,
        slack=bound - float(deviation),
        holds=holds,
    )


def parseval_defect(ps: PointSet, cap: int | None = None) -> float:
    """Relative defect of sum_m |lambda_m|^2 against q^d |E| (zero in exact math)."""
    spec = fourier_spectrum(ps, cap)
    lhs = float(np.sum(np.abs(spec.values) ** 2))
    rhs = float(ps.space_size * len(ps))
    return abs(lhs - rhs) / rhs


def sphere_decay_constant(spec: Spectrum, q: int, d: int) -> float:
    """Observed constant C with mu = C * q^{(d-1)/2}."""
    return spec.mu / q ** ((d - 1) / 2)
