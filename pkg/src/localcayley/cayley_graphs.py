"""The Cayley graph on F_q^d with a symmetric connection set: cycles and paths.

Vertices are all of F_q^d; x ~ y iff y - x lies in the connection set E,
which must be symmetric and avoid 0 (no loops). Cycle counts follow the
rooted directed convention — sequences (w_0..w_{L-1}) of distinct vertices
with every step and the closing step in E — because the identities being
checked count exactly these; the unrooted undirected count is total/(2L)
with an exact divisibility assertion.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .energy import EnergyTuple
from .errors import (
    InvariantViolation,
    NotGoodTuple,
    PreconditionFailed,
    SizeCapExceeded,
)
from .field_algebra import PointSet, vadd, vsub

MAX_CYCLE_SPACE = 2500


@dataclass
class CayleyGraph:
    """Implicit adjacency structure: x ~ y iff y - x is in the connection set."""

    connection: PointSet

    def __post_init__(self):
        ps = self.connection
        if not ps.symmetric:
            raise PreconditionFailed("connection set must be symmetric")
        if 0 in ps:
            raise PreconditionFailed("connection set contains 0: loops are not allowed")
        self._neighbors = None

    @property
    def ctx(self):
        return self.connection.ctx

    @property
    def d(self) -> int:
        return self.connection.d

    @property
    def n(self) -> int:
        return self.connection.space_size

    @property
    def degree(self) -> int:
        return len(self.connection)

    def neighbor_table(self) -> np.ndarray:
        """(n, degree) array; row v lists the neighbors of v in increasing order."""
        if self._neighbors is None:
            if self.n > MAX_CYCLE_SPACE:
                raise SizeCapExceeded(
                    f"neighbor table over {self.n} vertices exceeds cap",
                    required=self.n,
                    cap=MAX_CYCLE_SPACE,
                )
            ps = self.connection
            cols = [
                np.asarray(vadd(self.ctx, self.d, np.arange(self.n, dtype=np.int64), e))
                for e in ps.indices.tolist()
            ]
            self._neighbors = np.sort(np.stack(cols, axis=1), axis=1)
        return self._neighbors

    def adjacent(self, u: int, w: int) -> bool:
        return bool(self.connection.bitmap[vsub(self.ctx, self.d, w, u)])

    def adjacency_row(self, v: int) -> np.ndarray:
        """Boolean row of the adjacency matrix for vertex v."""
        diffs = np.asarray(vsub(self.ctx, self.d, np.arange(self.n, dtype=np.int64), v))
        return self.connection.bitmap[diffs]

    def adjacency_matrix(self) -> np.ndarray:
        if self.n > MAX_CYCLE_SPACE:
            raise SizeCapExceeded(
                f"dense adjacency over {self.n} vertices exceeds cap",
                required=self.n,
                cap=MAX_CYCLE_SPACE,
            )
        return np.stack([self.adjacency_row(v) for v in range(self.n)]).astype(np.int64)


@dataclass(frozen=True)
class CycleRecord:
    """A rooted directed distinct-vertex closed cycle."""

    vertices: tuple
    rooted: bool
    source: str


def cycle_from_tuple(g: CayleyGraph, root: int, tup) -> CycleRecord:
    """Build the 2k-cycle v, v+a_1, ..., v+sum(a)-sum(b_1..b_{k-1}) from a good tuple.

    Walks forward along the a_i and backward along the b_j; the energy
    identity closes the cycle and goodness makes the vertices distinct.
    Raises NotGoodTuple if distinctness or an edge step fails — that means
    the tuple was not actually good, i.e. a bug in the goodness check.
    """
    if isinstance(tup, EnergyTuple):
        a, b = tup.a, tup.b
    else:
        a, b = tup
    ctx, d = g.ctx, g.d
    for e in a + b:
        if e not in g.connection:
            raise PreconditionFailed("tuple entries must lie in the connection set")
    vertices = [root]
    for ai in a:
        vertices.append(int(vadd(ctx, d, vertices[-1], ai)))
    for bj in b[:-1]:
        vertices.append(int(vsub(ctx, d, vertices[-1], bj)))
    closing = vsub(ctx, d, vertices[-1], b[-1])
    if closing != root:
        raise NotGoodTuple("cycle does not close: side sums differ")
    if len(set(vertices)) != len(vertices):
        raise NotGoodTuple(
            "cycle vertices collide: the tuple was not good (goodness-check bug)"
        )
    for u, w in zip(vertices, vertices[1:] + [root]):
        if not g.adjacent(u, w):
            raise NotGoodTuple("cycle step leaves the connection set")
    return CycleRecord(vertices=tuple(vertices), rooted=True, source="from_tuple")


def cycles_through_vertex(g: CayleyGraph, root: int, length: int) -> int:
    """Rooted directed distinct-vertex cycles of the given length starting at root.

    DFS over the neighbor table in increasing vertex order; the last level is
    counted vectorized against the root's adjacency row.
    """
    if length < 3:
        raise PreconditionFailed("cycles need length >= 3")
    nbr = g.neighbor_table()
    adj_root = g.adjacency_row(root)
    visited = np.zeros(g.n, dtype=bool)
    visited[root] = True

    def rec(w: int, depth: int) -> int:
        cand = nbr[w]
        if depth == length - 2:
            return int(np.sum(adj_root[cand] & ~visited[cand]))
        total = 0
        for u in cand.tolist():
            if not visited[u]:
                visited[u] = True
                total += rec(u, depth + 1)
                visited[u] = False
        return total

    return rec(root, 0)


@dataclass(frozen=True)
class CycleCounts:
    """Rooted directed total and the derived unrooted undirected count."""

    length: int
    rooted_total: int
    unrooted_total: int


def total_cycle_count(g: CayleyGraph, length: int) -> CycleCounts:
    """Sum of per-root DFS counts over every vertex, plus the unrooted view.

    The total is computed as an independent sum over all roots (not by
    multiplying one root's count), so identities like total = n x per-vertex
    remain genuine cross-checks. Each unrooted undirected cycle is counted
    2 x length times among rooted directed ones; divisibility is asserted.
    """
    total = sum(cycles_through_vertex(g, v, length) for v in range(g.n))
    if total % (2 * length):
        raise InvariantViolation(
            f"rooted cycle total {total} is not divisible by {2 * length}"
        )
    return CycleCounts(length=length, rooted_total=total,
                       unrooted_total=total // (2 * length))


@dataclass(frozen=True)
class PathReport:
    """Exact path census within a vertex subset.

    path_total counts directed distinct-vertex paths of the requested length;
    pair_count is sum over (x, y) of C(P(x,y), 2), the number of unordered
    pairs of distinct equal-endpoint paths; convexity_bound is the
    |A|^2 * C(avg, 2) lower bound implied by convexity (a float, possibly
    negative when paths are sparse, in which case it is vacuous).
    """

    length: int
    path_total: int
    pair_count: int
    convexity_bound: float


def count_paths_in_subset(g: CayleyGraph, subset: PointSet, length: int) -> PathReport:
    """Count directed distinct-vertex paths of the given edge length inside subset."""
    if length < 1:
        raise PreconditionFailed("paths need length >= 1")
    if subset.ctx != g.ctx or subset.d != g.d:
        raise PreconditionFailed("subset lives in a different space than the graph")
    nbr = g.neighbor_table()
    in_subset = subset.bitmap
    endpoint: dict[tuple, int] = {}
    visited = np.zeros(g.n, dtype=bool)

    def rec(start: int, w: int, depth: int):
        for u in nbr[w].tolist():
            if in_subset[u] and not visited[u]:
                if depth == length - 1:
                    key = (start, u)
                    endpoint[key] = endpoint.get(key, 0) + 1
                else:
                    visited[u] = True
                    rec(start, u, depth + 1)
                    visited[u] = False

    for x in subset.indices.tolist():
        visited[x] = True
        rec(x, x, 0)
        visited[x] = False
    path_total = sum(endpoint.values())
    pair_count = sum(comb(c, 2) for c in endpoint.values())
    size = len(subset)
    if size:
        avg = path_total / size**2
        convexity_bound = size**2 * avg * (avg - 1) / 2
    else:
        convexity_bound = 0.0
    return PathReport(
        length=length,
        path_total=path_total,
        pair_count=pair_count,
        convexity_bound=convexity_bound,
    )
