"""Tests for spherical configurations, fingerprints, classes, and span counting."""

import numpy as np
import pytest

from localcayley import configurations as cf
from localcayley import energy as en
from localcayley import field_algebra as fa
from localcayley.errors import NotOnSphere, PreconditionFailed, SizeCapExceeded


def _sphere(q, d):
    return fa.sphere(fa.build_field(q), d)


def _config_from_first_star(q, d):
    ps = _sphere(q, d)
    tup = next(en.star_tuples(ps, 2))
    return cf.tuple_config(ps, tup.a, tup.b), ps


def test_config_membership_validated():
    ctx = fa.build_field(5)
    s = fa.sphere(ctx, 3)
    pts = tuple(s.indices[:3].tolist())
    cfg = cf.SphericalConfig(ctx, 3, pts)
    assert cfg.n == 3
    with pytest.raises(NotOnSphere):
        cf.SphericalConfig(ctx, 3, (0,))  # origin is not on the unit sphere


def test_config_center_handling():
    ctx = fa.build_field(5)
    s = fa.sphere(ctx, 2)
    c = fa.encode_vector(ctx, (2, 3))
    shifted = [fa.vadd(ctx, 2, pt, c) for pt in s.indices[:2].tolist()]
    cfg = cf.SphericalConfig(ctx, 2, tuple(shifted), center=c)
    assert cfg.center == c


def test_span_dimension_examples():
    ctx = fa.build_field(7)
    s = fa.sphere(ctx, 3)
    two = cf.SphericalConfig(ctx, 3, tuple(s.indices[:2].tolist()))
    assert cf.span_dimension(two) == 1
    same = cf.SphericalConfig(ctx, 3, (int(s.indices[0]),) * 2)
    assert cf.span_dimension(same) == 0
    # three affinely independent points span 2 dimensions of differences
    e1 = fa.encode_vector(ctx, (1, 0, 0))
    e2 = fa.encode_vector(ctx, (0, 1, 0))
    e3 = fa.encode_vector(ctx, (0, 0, 1))
    three = cf.SphericalConfig(ctx, 3, (e1, e2, e3))
    assert cf.span_dimension(three) == 2
    with pytest.raises(PreconditionFailed):
        cf.span_dimension(cf.SphericalConfig(ctx, 3, (e1,)))


def test_gram_fingerprint_distinguishes_spaces():
    cfg5 = cf.SphericalConfig(fa.build_field(5), 2, (fa.encode_vector(fa.build_field(5), (1, 0)),))
    cfg7 = cf.SphericalConfig(fa.build_field(7), 2, (fa.encode_vector(fa.build_field(7), (1, 0)),))
    assert cf.gram_fingerprint(cfg5) != cf.gram_fingerprint(cfg7)


def test_fingerprint_invariant_under_signed_permutations():
    rng = np.random.default_rng(19)
    cfg, _ = _config_from_first_star(5, 3)
    fp = cf.gram_fingerprint(cfg)
    for _ in range(30):
        mat = cf.random_signed_permutation(cfg.ctx, 3, rng)
        moved = cf.transform_config(cfg, mat)
        assert cf.gram_fingerprint(moved) == fp
        assert cf.unordered_fingerprint(moved) == cf.unordered_fingerprint(cfg)


def test_fingerprint_changes_under_translation():
    cfg, ps = _config_from_first_star(5, 3)
    ctx = cfg.ctx
    # translate by a sphere point so the re-centered config is still spherical
    t = int(ps.indices[0])
    pts = tuple(fa.vadd(ctx, 3, pt, t) for pt in cfg.points)
    moved = cf.SphericalConfig(ctx, 3, pts, center=t)
    assert cf.gram_fingerprint(moved) != cf.gram_fingerprint(cfg)


def test_signed_permutation_is_orthogonal():
    ctx = fa.build_field(7)
    rng = np.random.default_rng(2)
    for _ in range(10):
        mat = cf.random_signed_permutation(ctx, 3, rng)
        for u in (fa.encode_vector(ctx, (1, 2, 3)), fa.encode_vector(ctx, (0, 5, 6))):
            for v in (fa.encode_vector(ctx, (4, 4, 1)),):
                gu = cf.apply_matrix(ctx, 3, mat, u)
                gv = cf.apply_matrix(ctx, 3, mat, v)
                assert fa.vdot(ctx, 3, gu, gv) == fa.vdot(ctx, 3, u, v)


CLASS_COUNTS = {5: 5, 7: 12, 11: 40}
STAR_TOTALS = {5: 1200, 7: 8064}


@pytest.mark.parametrize("q", sorted(CLASS_COUNTS))
def test_congruence_class_counts(q):
    table = cf.congruence_class_count(_sphere(q, 3), 2)
    assert table.count == CLASS_COUNTS[q]
    if q in STAR_TOTALS:
        assert table.total == STAR_TOTALS[q]
    assert table.unordered_count <= table.count
    rows = table.sorted_items()
    assert len(rows) == table.count
    assert all(mu >= 1 for _, mu, _ in rows)


def test_class_total_is_star_count():
    for q in (5, 7):
        ps = _sphere(q, 3)
        table = cf.congruence_class_count(ps, 2)
        assert table.total == en.classify_tuples(ps, 2).t_star


def test_class_growth_trend():
    ratios = [cf.congruence_class_count(_sphere(q, 3), 2).count / q**2 for q in (5, 7, 11)]
    assert ratios == sorted(ratios)


def test_no_classes_without_star_tuples():
    table = cf.congruence_class_count(_sphere(5, 2), 2)
    assert table.count == 0
    assert table.total == 0


def test_copy_counts_sum_to_star_total():
    ps = _sphere(5, 3)
    table = cf.congruence_class_count(ps, 2)
    total = 0
    for _, _, rep in table.sorted_items():
        cfg = cf.SphericalConfig(ps.ctx, 3, rep)
        n_x = cf.count_isometric_copies(cfg, ps)
        assert n_x >= 1  # contains itself
        total += n_x
    assert total == STAR_TOTALS[5]


def test_single_point_copy_count_is_set_size():
    ps = _sphere(5, 3)
    cfg = cf.SphericalConfig(ps.ctx, 3, (int(ps.indices[0]),))
    assert cf.count_isometric_copies(cfg, ps) == len(ps)


def test_pair_copy_count_matches_double_loop():
    ps = _sphere(5, 2)
    ctx = ps.ctx
    x = int(ps.indices[0])
    pair = cf.SphericalConfig(ctx, 2, (x, fa.vneg(ctx, 2, x)))
    t = fa.vdot(ctx, 2, x, fa.vneg(ctx, 2, x))
    brute = sum(
        1
        for u in ps.indices.tolist()
        for v in ps.indices.tolist()
        if fa.vdot(ctx, 2, u, u) == 1 and fa.vdot(ctx, 2, v, v) == 1
        and fa.vdot(ctx, 2, u, v) == t
    )
    assert cf.count_isometric_copies(pair, ps) == brute


def test_copy_count_caps():
    ps = _sphere(5, 3)
    pts = tuple(ps.indices[:5].tolist())
    with pytest.raises(PreconditionFailed):
        cf.count_isometric_copies(cf.SphericalConfig(ps.ctx, 3, pts), ps)


SPAN_COUNTS = {3: 36, 5: 1620, 7: 1764}


@pytest.mark.parametrize("q", sorted(SPAN_COUNTS))
def test_degenerate_span_counts(q):
    ctx = fa.build_field(q)
    L = cf.degenerate_span_count(ctx, 3, 2)
    assert L == SPAN_COUNTS[q]
    s = fa.sphere(ctx, 3)
    assert L * q**2 / len(s) ** 3 <= 4


def test_degenerate_span_brute_force_cross_check():
    ctx = fa.build_field(3)
    assert cf.degenerate_span_brute_force(ctx, 3, 2) == 36


def test_degenerate_span_preconditions():
    ctx = fa.build_field(3)
    with pytest.raises(PreconditionFailed):
        cf.degenerate_span_count(ctx, 3, 1)
    with pytest.raises(PreconditionFailed):
        cf.degenerate_span_count(ctx, 2, 2)
    with pytest.raises(SizeCapExceeded):
        cf.degenerate_span_count(ctx, 3, 2, cap=10)
