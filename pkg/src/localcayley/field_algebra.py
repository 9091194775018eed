"""Exact arithmetic in F_{p^r}, vectors over F_q^d, spheres, and additive characters.

Field elements are encoded as integers in [0, q) whose little-endian base-p
digits are the coefficients of the representative polynomial: the element
c_0 + c_1*x + ... + c_{r-1}*x^{r-1} encodes as sum(c_t * p^t). Vectors in
F_q^d are encoded as integers in [0, q^d) whose little-endian base-q digits
are the coordinate encodings. All arithmetic helpers accept plain ints or
numpy integer arrays and are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeTooLarge,
    DimensionMismatch,
    NotPrime,
    ReduciblePolynomial,
    SizeCapExceeded,
)

MAX_EXTENSION_DEGREE = 6
MAX_EXTENSION_ORDER = 4096
DEFAULT_INDEX_CAP = 2_000_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _poly_mul_mod(a: Sequence[int], b: Sequence[int], poly: Sequence[int], p: int) -> tuple:
    r = len(poly) - 1
    prod = [0] * (2 * r - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce x^deg term by term using x^r = -(poly[0] + ... + poly[r-1] x^{r-1})
    for deg in range(2 * r - 2, r - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for t in range(r):
                prod[deg - r + t] = (prod[deg - r + t] - c * poly[t]) % p
    return tuple(prod[:r])


def _poly_divides(div: Sequence[int], poly: Sequence[int], p: int) -> bool:
    deg = len(div) - 1
    rem = list(poly)
    for k in range(len(poly) - 1 - deg, -1, -1):
        c = rem[k + deg]
        if c:
            for t in range(deg + 1):
                rem[k + t] = (rem[k + t] - c * div[t]) % p
    return not any(rem[:deg])


def poly_is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Check irreducibility over F_p by trial division against all low-degree monics."""
    r = len(poly) - 1
    if r == 1:
        return True
    for deg in range(1, r // 2 + 1):
        for lower in itertools.product(range(p), repeat=deg):
            if _poly_divides(list(lower) + [1], poly, p):
                return False
    return True


def default_irreducible_poly(p: int, r: int) -> tuple:
    """Return the lexicographically smallest monic irreducible of degree r over F_p.

    Coefficients are little-endian, constant term first, and include the
    leading 1. The choice is deterministic so field contexts are reproducible.
    """
    if r == 1:
        return (0, 1)
    for lower in itertools.product(range(p), repeat=r):
        poly = lower + (1,)
        if poly_is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")


class FieldCtx:
    """A finite field F_{p^r} with exact element arithmetic on encoded integers.

    For r = 1 the operations are plain modular arithmetic. For r > 1 addition
    is digitwise mod p and multiplication goes through discrete exp/log tables
    built from a primitive element, so only O(q) memory is used.
    """

    def __init__(self, p: int, r: int = 1, poly: Sequence[int] | None = None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if not 1 <= r <= MAX_EXTENSION_DEGREE:
            raise DegreeTooLarge(f"extension degree {r} outside 1..{MAX_EXTENSION_DEGREE}")
        q = p**r
        if r > 1 and q > MAX_EXTENSION_ORDER:
            raise DegreeTooLarge(
                f"extension field order {q} exceeds table cap {MAX_EXTENSION_ORDER}"
            )
        self.p = p
        self.r = r
        self.q = q
        if poly is None:
            poly = default_irreducible_poly(p, r)
        else:
            poly = tuple(c % p for c in poly)
            if len(poly) != r + 1 or poly[-1] != 1:
                raise ReduciblePolynomial(
                    f"modulus must be monic of degree {r}, got coefficients {poly}"
                )
            if not poly_is_irreducible(poly, p):
                raise ReduciblePolynomial(f"polynomial {poly} factors over F_{p}")
        self.poly = tuple(poly)
        self._build_tables()
        self._perm_cache: dict[int, np.ndarray] = {}
        self._norm_cache: dict[int, np.ndarray] = {}

    def _build_tables(self) -> None:
        p, r, q = self.p, self.r, self.q
        if r == 1:
            self._log = None
            self._exp = None
        else:
            self._exp, self._log = self._build_exp_log()
        a = np.arange(q, dtype=np.int64)
        self.square_table = np.asarray(self.mul(a, a), dtype=np.int64)
        # trace via x + x^p + ... + x^{p^{r-1}}
        tr = a.copy()
        if r > 1:
            frob = a.copy()
            for _ in range(r - 1):
                frob = self.pow(frob, p)
                tr = self.add(tr, frob)
        self.trace_table = np.asarray(tr, dtype=np.int64) % p if r == 1 else np.asarray(tr, dtype=np.int64)
        if r > 1 and np.any(self.trace_table >= p):
            raise AssertionError("trace left the prime subfield")
        self.char_table = np.exp(2j * np.pi * self.trace_table / p)

    def _build_exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        p, r, q = self.p, self.r, self.q

        def enc(coeffs):
            return sum(int(c) * p**t for t, c in enumerate(coeffs))

        def dec(x):
            return tuple((x // p**t) % p for t in range(r))

        for g in range(2, q):
            powers = [1]
            cur = g
            while cur != 1:
                powers.append(cur)
                cur = enc(_poly_mul_mod(dec(cur), dec(g), self.poly, p))
                if len(powers) > q:
                    raise AssertionError("multiplication order runaway")
            if len(powers) == q - 1:
                exp = np.array(powers + powers, dtype=np.int64)
                log = np.zeros(q, dtype=np.int64)
                for i, v in enumerate(powers):
                    log[v] = i
                return exp, log
        raise AssertionError("no primitive element found")

    # ---- element arithmetic (ints or numpy arrays) ----

    def add(self, a, b):
        if self.r == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        for t in range(self.r):
            da = (a // p**t) % p
            db = (b // p**t) % p
            out = out + ((da + db) % p) * p**t
        return out

    def neg(self, a):
        if self.r == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        for t in range(self.r):
            da = (a // p**t) % p
            out = out + ((-da) % p) * p**t
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.r == 1:
            return (a * b) % self.p
        a = np.asarray(a)
        b = np.asarray(b)
        res = self._exp[self._log[a] + self._log[b]]
        res = np.where((a == 0) | (b == 0), 0, res)
        return res if res.ndim else int(res)

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero field element")
        if self.r == 1:
            return pow(int(a), self.p - 2, self.p) if np.ndim(a) == 0 else np.array(
                [pow(int(x), self.p - 2, self.p) for x in a], dtype=np.int64
            )
        a = np.asarray(a)
        res = self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return res if res.ndim else int(res)

    def pow(self, a, e: int):
        if self.r == 1:
            if np.ndim(a) == 0:
                return pow(int(a), e, self.p)
            return np.array([pow(int(x), e, self.p) for x in np.asarray(a)], dtype=np.int64)
        a = np.asarray(a)
        res = self._exp[(self._log[a] * e) % (self.q - 1)]
        res = np.where(a == 0, 0 if e else 1, res)
        return res if res.ndim else int(res)

    def square(self, a):
        return self.square_table[a] if np.ndim(a) else int(self.square_table[a])

    def trace(self, x):
        """Trace into F_p, returned as an integer (or array) in [0, p)."""
        return self.trace_table[x] if np.ndim(x) else int(self.trace_table[x])

    def char_value(self, t):
        """Canonical additive character exp(2*pi*i * trace(t) / p)."""
        return self.char_table[t] if np.ndim(t) else complex(self.char_table[t])

    def encode_element(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.r:
            raise DimensionMismatch(f"expected {self.r} coefficients, got {len(coeffs)}")
        return sum((int(c) % self.p) * self.p**t for t, c in enumerate(coeffs))

    def element_coeffs(self, x: int) -> tuple:
        return tuple((x // self.p**t) % self.p for t in range(self.r))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.r, self.poly) == (other.p, other.r, other.poly)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.r, self.poly))

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, r={self.r}, poly={self.poly})"


def build_field(p: int, r: int = 1, poly: Sequence[int] | None = None) -> FieldCtx:
    """Build a field context, selecting the default modulus when poly is omitted."""
    return FieldCtx(p, r, poly)


# ---- vectors ----


def check_space(n_indices: int, cap: int | None = None) -> None:
    cap = DEFAULT_INDEX_CAP if cap is None else cap
    if n_indices > cap:
        raise SizeCapExceeded(
            f"space of {n_indices} indices exceeds cap {cap}", required=n_indices, cap=cap
        )


def encode_vector(ctx: FieldCtx, coords: Sequence[int]) -> int:
    return sum(int(c) * ctx.q**i for i, c in enumerate(coords))


def decode_vector(ctx: FieldCtx, d: int, index: int) -> tuple:
    return tuple((index // ctx.q**i) % ctx.q for i in range(d))


def coord(ctx: FieldCtx, d: int, v, i: int):
    """Extract coordinate i from an encoded vector (int or array)."""
    return (v // ctx.q**i) % ctx.q


def vadd(ctx: FieldCtx, d: int, u, v):
    out = 0
    for i in range(d):
        out = out + ctx.add(coord(ctx, d, u, i), coord(ctx, d, v, i)) * ctx.q**i
    return out


def vneg(ctx: FieldCtx, d: int, u):
    out = 0
    for i in range(d):
        out = out + ctx.neg(coord(ctx, d, u, i)) * ctx.q**i
    return out


def vsub(ctx: FieldCtx, d: int, u, v):
    return vadd(ctx, d, u, vneg(ctx, d, v))


def vdot(ctx: FieldCtx, d: int, u, v):
    out = 0
    for i in range(d):
        out = ctx.add(out, ctx.mul(coord(ctx, d, u, i), coord(ctx, d, v, i)))
    return out


def vnorm(ctx: FieldCtx, d: int, u):
    out = 0
    for i in range(d):
        out = ctx.add(out, ctx.square(coord(ctx, d, u, i)))
    return out


@dataclass(frozen=True)
class Vector:
    """A vector in F_q^d with canonical little-endian base-q index encoding."""

    ctx: FieldCtx
    coords: tuple

    def __post_init__(self):
        for c in self.coords:
            if not 0 <= c < self.ctx.q:
                raise DimensionMismatch(f"coordinate {c} outside [0, {self.ctx.q})")

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def index(self) -> int:
        return encode_vector(self.ctx, self.coords)

    @classmethod
    def from_index(cls, ctx: FieldCtx, d: int, index: int) -> "Vector":
        return cls(ctx, decode_vector(ctx, d, index))

    def __add__(self, other: "Vector") -> "Vector":
        _check_compatible(self, other)
        return Vector(self.ctx, tuple(self.ctx.add(a, b) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Vector") -> "Vector":
        _check_compatible(self, other)
        return Vector(self.ctx, tuple(self.ctx.sub(a, b) for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Vector":
        return Vector(self.ctx, tuple(self.ctx.neg(a) for a in self.coords))


def _check_compatible(x: Vector, y: Vector) -> None:
    if x.ctx != y.ctx:
        raise DimensionMismatch("vectors live over different fields")
    if x.d != y.d:
        raise DimensionMismatch(f"dimension mismatch: {x.d} vs {y.d}")


def dot(x: Vector, y: Vector) -> int:
    """Bilinear dot product x_1*y_1 + ... + x_d*y_d as a field element."""
    _check_compatible(x, y)
    return int(vdot(x.ctx, x.d, x.index, y.index))


def norm(x: Vector) -> int:
    """The quadratic form x_1^2 + ... + x_d^2 (not a metric; isotropic vectors exist)."""
    return dot(x, x)


# ---- point sets ----


class PointSet:
    """A subset of F_q^d held as a sorted index list plus a membership bitmap."""

    def __init__(self, ctx: FieldCtx, d: int, indices: Iterable[int], cap: int | None = None):
        self.ctx = ctx
        self.d = d
        n = ctx.q**d
        check_space(n, cap)
        idx = np.unique(np.asarray(list(indices), dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= n):
            raise DimensionMismatch("point index outside [0, q^d)")
        self.indices = idx
        self.bitmap = np.zeros(n, dtype=bool)
        self.bitmap[idx] = True
        neg = vneg(ctx, d, idx) if idx.size else idx
        self.symmetric = bool(np.all(self.bitmap[neg])) if idx.size else True

    @property
    def space_size(self) -> int:
        return int(self.ctx.q**self.d)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __contains__(self, index: int) -> bool:
        return bool(self.bitmap[index])

    def __iter__(self):
        return iter(self.indices.tolist())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PointSet)
            and self.ctx == other.ctx
            and self.d == other.d
            and np.array_equal(self.indices, other.indices)
        )

    def vectors(self) -> list:
        return [Vector.from_index(self.ctx, self.d, int(i)) for i in self.indices]

    def translate(self, by: int) -> "PointSet":
        return PointSet(self.ctx, self.d, np.asarray(vadd(self.ctx, self.d, self.indices, by)))

    def save(self, path) -> None:
        write_pointset(path, self)

    def __repr__(self) -> str:
        return f"PointSet(q={self.ctx.q}, d={self.d}, size={len(self)}, symmetric={self.symmetric})"


def norm_table(ctx: FieldCtx, d: int, cap: int | None = None) -> np.ndarray:
    """Array of ||v|| over every encoded vector index in [0, q^d); cached per field."""
    cached = ctx._norm_cache.get(d)
    if cached is not None:
        return cached
    check_space(ctx.q**d, cap)
    sq = ctx.square_table
    arr = np.zeros(1, dtype=np.int64)
    for _ in range(d):
        # index layout c*q^i + w puts the new coordinate in the slow axis
        arr = np.asarray(ctx.add(sq[np.arange(ctx.q)][:, None], arr[None, :])).ravel()
    ctx._norm_cache[d] = arr
    return arr


def sphere(ctx: FieldCtx, d: int, j: int = 1, center: Vector | None = None,
           cap: int | None = None) -> PointSet:
    """The sphere {y : ||y - center|| = j}; may legitimately be empty."""
    norms = norm_table(ctx, d, cap)
    idx = np.nonzero(norms == j % ctx.q)[0]
    if center is not None and center.index != 0:
        idx = np.sort(np.asarray(vadd(ctx, d, idx, center.index)))
    return PointSet(ctx, d, idx, cap)


# ---- exact linear algebra over F_q ----


def matrix_rank(ctx: FieldCtx, rows: Sequence[Sequence[int]]) -> int:
    """Rank over F_q of a matrix given as rows of element encodings."""
    mat = [list(map(int, row)) for row in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = next((k for k in range(row, len(mat)) if mat[k][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        pv = int(ctx.inv(mat[row][col]))
        mat[row] = [int(ctx.mul(c, pv)) for c in mat[row]]
        for k in range(len(mat)):
            if k != row and mat[k][col] != 0:
                c = mat[k][col]
                mat[k] = [
                    int(ctx.sub(x, ctx.mul(c, y))) for x, y in zip(mat[k], mat[row])
                ]
        row += 1
        rank += 1
        if row == len(mat):
            break
    return rank


# ---- point set file format ----


def pointset_to_text(ps: PointSet) -> str:
    """Render the text format: header `p r d poly=<c0,...,cr>`, one vector per line."""
    ctx = ps.ctx
    lines = [f"{ctx.p} {ctx.r} {ps.d} poly={','.join(map(str, ctx.poly))}"]
    for v in ps.indices:
        lines.append(" ".join(str(c) for c in decode_vector(ctx, ps.d, int(v))))
    return "\n".join(lines) + "\n"


def pointset_from_text(text: str, cap: int | None = None) -> PointSet:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty point set text")
    header = lines[0].split()
    if len(header) != 4 or not header[3].startswith("poly="):
        raise ValueError("malformed point set header")
    p, r, d = int(header[0]), int(header[1]), int(header[2])
    poly = tuple(int(c) for c in header[3][len("poly="):].split(","))
    ctx = FieldCtx(p, r, poly)
    indices = []
    for line in lines[1:]:
        line = line.strip()
        if not line:
            continue
        coords = [int(c) for c in line.split()]
        if len(coords) != d:
            raise ValueError(f"expected {d} coordinates per line, got {len(coords)}")
        indices.append(encode_vector(ctx, coords))
    return PointSet(ctx, d, indices, cap)


def write_pointset(path, ps: PointSet) -> None:
    with open(path, "w") as fh:
        fh.write(pointset_to_text(ps))


def read_pointset(path, cap: int | None = None) -> PointSet:
    with open(path) as fh:
        return pointset_from_text(fh.read(), cap)
