import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratcorr.errors import CapExceeded, UnreducedMapError
from ratcorr.rational import (
    RationalMap,
    compose_maps,
    conjugate,
    critical_values,
    evaluate,
    fixed_points,
    maps_close,
    preimages,
    spherical_multiplier,
)
from ratcorr.sphere import P1Point, chordal_distance, chordal_h, random_point, rotation_to

Z2 = RationalMap.power(2)
Z3 = RationalMap.power(3)
MOB = RationalMap.from_coeffs([1, 2], [-1, 1])  # (2z+1)/(z-1)
INV = RationalMap.from_coeffs([1], [0, 1])  # 1/z
INF = P1Point.infinity()


def pt(z):
    return P1Point.from_complex(z)


def near(p, z, tol=1e-9):
    return chordal_distance(p, pt(z)) <= tol


def test_evaluate_examples():
    assert evaluate(Z2, INF).is_infinity
    assert evaluate(MOB, pt(1)).is_infinity
    assert near(evaluate(MOB, INF), 2)


def test_compose_examples():
    assert maps_close(compose_maps(Z2, Z3), RationalMap.power(6))
    g = compose_maps(INV, INV)
    assert g.degree == 1
    assert maps_close(g, RationalMap.from_coeffs([0, 1]))
    f = compose_maps(Z2, RationalMap.from_coeffs([1, 0, 1]))
    assert f.degree == 4
    assert maps_close(f, RationalMap.from_coeffs([1, 0, 2, 0, 1]))


def test_compose_degree_cap():
    big = RationalMap.power(30)
    with pytest.raises(CapExceeded):
        compose_maps(big, big)


def test_reduction_on_construction():
    g = RationalMap.from_coeffs([-1, 0, 1], [-1, 1])
    assert g.degree == 1
    assert near(g(pt(3)), 4)
    assert RationalMap.from_coeffs([0, 0, 1], [0, 1]).degree == 1


def test_constant_rejected():
    with pytest.raises(ValueError):
        RationalMap.from_coeffs([2.0], [1.0])
    with pytest.raises(ValueError):
        RationalMap.from_coeffs([1, 1], [2, 2])


def test_unreduced_pair_detected():
    g = RationalMap.from_coeffs([-1, 0, 1], [-1, 1], reduce=False)
    with pytest.raises(UnreducedMapError):
        g(pt(1))


def test_preimage_examples():
    assert [(round(p.value.real, 9), m) for p, m in preimages(Z2, pt(0))] == [(0.0, 2)]
    pre = preimages(Z2, pt(1))
    assert sorted(round(p.value.real, 9) for p, _ in pre) == [-1.0, 1.0]
    assert all(m == 1 for _, m in pre)
    pre = preimages(Z3, pt(8))
    w = cmath.exp(2j * cmath.pi / 3)
    for z in (2, 2 * w, 2 * w * w):
        assert any(near(p, z, 1e-9) for p, _ in pre)


def test_fixed_point_examples():
    def table(g):
        return sorted((round(p.value.real, 9) if not p.is_infinity else np.inf, m, round(l, 9)) for p, m, l in fixed_points(g))

    assert table(Z2) == [(0.0, 1, 0.0), (1.0, 1, 2.0), (np.inf, 1, 0.0)]
    assert table(Z3) == [(-1.0, 1, 3.0), (0.0, 1, 0.0), (1.0, 1, 3.0), (np.inf, 1, 0.0)]
    assert table(INV) == [(-1.0, 1, 1.0), (1.0, 1, 1.0)]


def test_multiplier_examples():
    assert spherical_multiplier(Z2, pt(1)) == pytest.approx(2)
    assert spherical_multiplier(Z2, pt(1j)) == pytest.approx(2)
    assert spherical_multiplier(Z2, pt(0)) == 0
    assert spherical_multiplier(Z2, INF) == 0


def test_multiplier_at_fixed_point_matches_affine():
    g = RationalMap.from_coeffs([0.3, 0, 1])
    for p, _, lam in fixed_points(g):
        if not p.is_infinity:
            assert lam == pytest.approx(abs(g.affine_derivative(p.value)), rel=1e-9)


def test_critical_value_examples():
    cv = critical_values(Z2)
    assert len(cv) == 2 and any(p.is_infinity for p in cv) and any(near(p, 0) for p in cv)
    cv = critical_values(RationalMap.from_coeffs([1, 0, 1]))
    assert len(cv) == 2 and any(p.is_infinity for p in cv) and any(near(p, 1, 1e-8) for p in cv)
    assert len(critical_values(MOB)) == 0


def random_map(rng, deg):
    num = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    den = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    return RationalMap.from_coeffs(num, den)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_preimage_consistency_and_count(deg, seed):
    rng = np.random.default_rng(seed)
    g = random_map(rng, deg)
    q = random_point(seed)
    pre = preimages(g, q)
    assert sum(m for _, m in pre) == g.degree
    for p, _ in pre:
        assert chordal_distance(g(p), q) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_fixed_point_count(deg, seed):
    g = random_map(np.random.default_rng(seed), deg)
    assert sum(m for _, m, _ in fixed_points(g)) == g.degree + 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_chain_rule(df, dg, seed):
    rng = np.random.default_rng(seed)
    f, g = random_map(rng, df), random_map(rng, dg)
    p = random_point(seed)
    lhs = spherical_multiplier(compose_maps(f, g, reduce=False), p)
    rhs = spherical_multiplier(f, g(p)) * spherical_multiplier(g, p)
    assert lhs == pytest.approx(rhs, rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_chart_invariance_under_rotation(deg, seed):
    rng = np.random.default_rng(seed)
    g = random_map(rng, deg)
    p = random_point(seed)
    u = rotation_to(random_point(seed + 1).h)
    gc = conjugate(g, u)
    pc = P1Point(*(u @ p.h))
    assert spherical_multiplier(gc, pc) == pytest.approx(spherical_multiplier(g, p), rel=1e-8)
    assert chordal_h(gc.apply_h(pc.h), u @ g.apply_h(p.h)) < 1e-10
