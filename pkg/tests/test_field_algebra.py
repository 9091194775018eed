"""Tests for finite field contexts, vectors, spheres, and the point set format."""

import numpy as np
import pytest

from localcayley import field_algebra as fa
from localcayley.errors import (
    DegreeTooLarge,
    DimensionMismatch,
    NotPrime,
    ReduciblePolynomial,
    SizeCapExceeded,
)


@pytest.mark.parametrize(
    "p,r,poly",
    [
        (2, 2, (1, 1, 1)),
        (2, 3, (1, 0, 1, 1)),
        (3, 2, (1, 0, 1)),
        (2, 4, (1, 0, 0, 1, 1)),
    ],
)
def test_default_poly_is_lex_min_irreducible(p, r, poly):
    assert fa.default_irreducible_poly(p, r) == poly


def test_f9_modulus_is_x_squared_plus_one():
    ctx = fa.build_field(3, 2)
    assert ctx.poly == (1, 0, 1)
    # x^2 = -1 for the generator x (encoding 3)
    assert ctx.mul(3, 3) == ctx.neg(1)


def test_invalid_field_parameters():
    with pytest.raises(NotPrime):
        fa.build_field(6)
    with pytest.raises(DegreeTooLarge):
        fa.build_field(3, 9)
    with pytest.raises(DegreeTooLarge):
        fa.build_field(97, 2)  # 97^2 > 4096
    with pytest.raises(ReduciblePolynomial):
        fa.FieldCtx(3, 2, (0, 0, 1))  # x^2 is reducible
    with pytest.raises(ReduciblePolynomial):
        fa.FieldCtx(3, 2, (1, 0, 2))  # not monic


@pytest.mark.parametrize("p,r", [(5, 1), (3, 2), (2, 3), (3, 3)])
def test_field_axioms_exhaustive(p, r):
    ctx = fa.build_field(p, r)
    q = ctx.q
    a = np.arange(q, dtype=np.int64)
    # additive group: a + (-a) = 0, commutative
    assert np.all(ctx.add(a, ctx.neg(a)) == 0)
    aa, bb = np.meshgrid(a, a)
    assert np.all(ctx.add(aa, bb) == ctx.add(bb, aa))
    assert np.all(ctx.mul(aa, bb) == ctx.mul(bb, aa))
    # multiplicative inverses on nonzero elements
    nz = a[1:]
    assert np.all(ctx.mul(nz, ctx.inv(nz)) == 1)
    # distributivity on the full q^3 cube (small fields only)
    if q <= 9:
        for x in range(q):
            lhs = ctx.mul(x, ctx.add(aa, bb))
            rhs = ctx.add(ctx.mul(x, aa), ctx.mul(x, bb))
            assert np.all(lhs == rhs)
    # squares match mul
    assert np.all(ctx.square_table == ctx.mul(a, a))


def test_f9_trace_values():
    ctx = fa.build_field(3, 2)
    # Tr(c0 + c1 x) = 2*c0 over F_9 with modulus x^2 + 1
    for x in range(9):
        c0, _ = ctx.element_coeffs(x)
        assert ctx.trace(x) == (2 * c0) % 3
    assert ctx.trace_table.tolist()[:3] == [0, 2, 1]


@pytest.mark.parametrize("p,r", [(7, 1), (3, 2), (2, 3)])
def test_trace_is_additive_and_surjective(p, r):
    ctx = fa.build_field(p, r)
    a = np.arange(ctx.q, dtype=np.int64)
    aa, bb = np.meshgrid(a, a)
    assert np.all(ctx.trace(ctx.add(aa, bb)) == (ctx.trace(aa) + ctx.trace(bb)) % p)
    counts = np.bincount(ctx.trace_table, minlength=p)
    assert np.all(counts == ctx.q // p)


def test_char_values_are_roots_of_unity():
    ctx = fa.build_field(3, 2)
    vals = ctx.char_value(np.arange(9))
    assert np.allclose(np.abs(vals), 1.0)
    # character is additive: chi(a+b) = chi(a) chi(b)
    a = np.arange(9)
    aa, bb = np.meshgrid(a, a)
    assert np.allclose(ctx.char_value(ctx.add(aa, bb)), ctx.char_value(aa) * ctx.char_value(bb))
    # sum over the field vanishes
    assert abs(vals.sum()) < 1e-12


def test_encode_decode_roundtrip():
    ctx = fa.build_field(5)
    for d in (1, 2, 3):
        for idx in range(5**d):
            coords = fa.decode_vector(ctx, d, idx)
            assert fa.encode_vector(ctx, coords) == idx
    ctx9 = fa.build_field(3, 2)
    assert ctx9.encode_element((2, 1)) == 2 + 1 * 3
    assert ctx9.element_coeffs(5) == (2, 1)


def test_vector_arithmetic_and_dot():
    ctx = fa.build_field(5)
    x = fa.Vector(ctx, (1, 2, 3))
    y = fa.Vector(ctx, (4, 4, 0))
    assert (x + y).coords == (0, 1, 3)
    assert (x - y).coords == (2, 3, 3)
    assert (-x).coords == (4, 3, 2)
    assert fa.dot(x, y) == (1 * 4 + 2 * 4) % 5
    assert fa.norm(x) == (1 + 4 + 9) % 5
    with pytest.raises(DimensionMismatch):
        fa.dot(x, fa.Vector(ctx, (1, 2)))
    with pytest.raises(DimensionMismatch):
        fa.dot(x, fa.Vector(fa.build_field(7), (1, 2, 3)))


def test_isotropic_vector_exists_mod5():
    # (1, 2) has norm 1 + 4 = 0 in F_5: the form is not a metric
    ctx = fa.build_field(5)
    assert fa.norm(fa.Vector(ctx, (1, 2))) == 0


SPHERE_SIZES = {
    (3, 1, 2): 4,
    (5, 1, 2): 4,
    (7, 1, 2): 8,
    (11, 1, 2): 12,
    (13, 1, 2): 12,
    (3, 1, 3): 6,
    (5, 1, 3): 30,
    (7, 1, 3): 42,
    (11, 1, 3): 110,
    (13, 1, 3): 182,
    (3, 2, 2): 8,
    (3, 2, 3): 90,
    (2, 3, 2): 8,
}


@pytest.mark.parametrize("p,r,d", sorted(SPHERE_SIZES))
def test_sphere_sizes(p, r, d):
    ctx = fa.build_field(p, r)
    s = fa.sphere(ctx, d)
    assert len(s) == SPHERE_SIZES[(p, r, d)]
    # every listed point really has unit norm
    for v in s.vectors():
        assert fa.norm(v) == 1
    # unit spheres about the origin are symmetric
    assert s.symmetric


def test_sphere_brute_force_cross_check():
    ctx = fa.build_field(5)
    s = fa.sphere(ctx, 2)
    expected = {
        fa.encode_vector(ctx, (a, b))
        for a in range(5)
        for b in range(5)
        if (a * a + b * b) % 5 == 1
    }
    assert set(s.indices.tolist()) == expected


def test_sphere_translation_and_radius():
    ctx = fa.build_field(5)
    c = fa.Vector(ctx, (2, 3))
    s = fa.sphere(ctx, 2, j=2, center=c)
    for v in s.vectors():
        assert fa.norm(v - c) == 2
    s0 = fa.sphere(ctx, 2, j=2)
    assert len(s) == len(s0)
    # a translated sphere is generally not symmetric about the origin
    assert not s.symmetric


def test_zero_sphere_contains_isotropic_lines():
    ctx = fa.build_field(5)
    s = fa.sphere(ctx, 2, j=0)
    assert fa.encode_vector(ctx, (1, 2)) in s
    assert fa.encode_vector(ctx, (0, 0)) in s


def test_norm_table_matches_vectors():
    ctx = fa.build_field(3, 2)
    tbl = fa.norm_table(ctx, 2)
    for idx in range(0, 81, 7):
        v = fa.Vector.from_index(ctx, 2, idx)
        assert tbl[idx] == fa.norm(v)


def test_matrix_rank():
    ctx = fa.build_field(5)
    assert fa.matrix_rank(ctx, [(1, 2), (2, 4)]) == 1  # second row is 2x first
    assert fa.matrix_rank(ctx, [(1, 2), (2, 3)]) == 2
    assert fa.matrix_rank(ctx, [(0, 0), (0, 0)]) == 0
    assert fa.matrix_rank(ctx, []) == 0
    ctx9 = fa.build_field(3, 2)
    # rows x*(1, x) and (1, x): x has encoding 3 in F_9
    x = 3
    row = (1, x)
    scaled = tuple(int(ctx9.mul(x, c)) for c in row)
    assert fa.matrix_rank(ctx9, [row, scaled]) == 1


def test_pointset_membership_and_symmetry():
    ctx = fa.build_field(5)
    ps = fa.PointSet(ctx, 2, [fa.encode_vector(ctx, (1, 0)), fa.encode_vector(ctx, (4, 0))])
    assert ps.symmetric
    assert fa.encode_vector(ctx, (1, 0)) in ps
    assert fa.encode_vector(ctx, (2, 0)) not in ps
    asym = fa.PointSet(ctx, 2, [fa.encode_vector(ctx, (1, 0))])
    assert not asym.symmetric


def test_pointset_deduplicates_and_sorts():
    ctx = fa.build_field(3)
    ps = fa.PointSet(ctx, 2, [5, 1, 5, 3])
    assert ps.indices.tolist() == [1, 3, 5]
    assert len(ps) == 3


def test_size_cap_enforced():
    ctx = fa.build_field(13)
    with pytest.raises(SizeCapExceeded) as exc:
        fa.norm_table(ctx, 6, cap=10_000)
    assert exc.value.required == 13**6
    assert exc.value.cap == 10_000


def test_pointset_file_roundtrip(tmp_path):
    ctx = fa.build_field(3, 2)
    s = fa.sphere(ctx, 2)
    path = tmp_path / "sphere.txt"
    s.save(path)
    text = path.read_text().splitlines()
    assert text[0] == "3 2 2 poly=1,0,1"
    assert len(text) == 1 + len(s)
    loaded = fa.read_pointset(path)
    assert loaded == s
    assert loaded.ctx.poly == (1, 0, 1)


def test_pointset_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("5 1 2\n0 0\n")
    with pytest.raises(ValueError):
        fa.read_pointset(path)
    path.write_text("5 1 2 poly=0,1\n0 0 0\n")
    with pytest.raises(ValueError):
        fa.read_pointset(path)
