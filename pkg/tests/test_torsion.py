from fractions import Fraction

import pytest

from selmer_companions.algebra import Poly, primes_up_to, roots_mod_prime
from selmer_companions.curves_finite import reduce_curve, torsion_basis, torsion_points
from selmer_companions.curves_rational import CurveQ, curve
from selmer_companions.torsion import (
    division_poly, exact_order_degree, exact_order_poly, two_torsion_poly,
)

LABELS = ["1242L1", "1242K1", "676B1", "676E1", "1026N1", "1026O1",
          "6555D1", "6555E1", "26A1", "598B1"]
PN = [(2, 2), (2, 3), (5, 1), (7, 1), (3, 2)]


def test_division_poly_one():
    assert division_poly(curve("26A1"), 1) == Poly([1])


def test_two_torsion_short_model():
    A, B = -7, 6            # (x - 1)(x - 2)(x + 3)
    E = CurveQ.from_ainvs((0, 0, 0, A, B))
    assert two_torsion_poly(E) == Poly([4 * B, 4 * A, 0, 4])
    assert sorted(roots_mod_prime(two_torsion_poly(E), 101)) == sorted([1, 2, 101 - 3])


def test_division_poly_rejects_zero():
    with pytest.raises(ValueError):
        division_poly(curve("26A1"), 0)


@pytest.mark.parametrize("label", LABELS)
def test_division_poly_8_degree(label):
    assert division_poly(curve(label), 8).degree == 30


@pytest.mark.parametrize("m", range(1, 13))
def test_division_poly_degrees(m):
    E = curve("1026N1")
    expected = (m * m - 1) // 2 if m % 2 else (m * m - 4) // 2
    assert division_poly(E, m).degree == expected


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_division_poly_vanishes_on_torsion(m):
    # x-coordinates of nonzero m-torsion points over F_l, excluding 2-torsion for even m
    E = curve("676B1")
    ell = 1009
    C = reduce_curve(E, ell)
    g = division_poly(E, m).mod(ell)
    for P in C.points():
        if P is None or C.mul(m, P) is not None:
            continue
        if m % 2 == 0 and C.mul(2, P) is None:
            continue
        assert g(C.x_to_model(P[0])) == 0


@pytest.mark.parametrize("label", LABELS)
@pytest.mark.parametrize("p, n", PN)
def test_exact_order_degree(label, p, n):
    f = exact_order_poly(curve(label), p, n)
    assert f.degree == (p ** (2 * n) - p ** (2 * n - 2)) // 2 == exact_order_degree(p, n)
    assert f.f.lc == 1


@pytest.mark.parametrize("label, p, n, d", [("1242L1", 2, 3, 24), ("1026N1", 7, 1, 24),
                                             ("676B1", 5, 1, 12)])
def test_exact_order_examples(label, p, n, d):
    assert exact_order_poly(curve(label), p, n).degree == d


def test_order_two_special_case():
    f = exact_order_poly(curve("26A1"), 2, 1)
    assert f.degree == 3
    assert f.f == two_torsion_poly(curve("26A1")).monic()


def _roots_mod(f, ell):
    g = f.mod(ell)
    return {x for x in range(ell) if g(x) == 0}


def _exact_order_x(C, p, n):
    m = p ** n
    return {C.x_to_model(P[0]) for P in torsion_points(C, p, n)
            if P is not None and C.mul(m // p, P) is not None}


@pytest.mark.parametrize("label", ["1242L1", "1242K1"])
def test_root_sets_at_split_primes(label):
    E = curve(label)
    f = exact_order_poly(E, 2, 3).f
    seen = 0
    for ell in primes_up_to(25000):
        if ell <= 3 or E.discriminant % ell == 0 or (ell - 1) % 8:
            continue
        C = reduce_curve(E, ell)
        if torsion_basis(C, 2, 3) is None:
            continue
        seen += 1
        roots = _roots_mod(f, ell)
        assert len(roots) == 24
        assert roots == _exact_order_x(C, 2, 3)
    assert seen >= 1


def test_19681_has_24_distinct_roots():
    for label in ("1242L1", "1242K1"):
        f = exact_order_poly(curve(label), 2, 3).f
        g = f.mod(19681)
        roots = {x for x in range(19681) if g(x) == 0}
        assert len(roots) == 24
        # distinct roots: no root of the derivative among them
        dg = f.derivative().mod(19681)
        assert all(dg(r) != 0 for r in roots)


@pytest.mark.parametrize("label, p, n", [("676B1", 5, 1), ("1026N1", 7, 1), ("6555D1", 3, 2)])
def test_root_sets_other_levels(label, p, n):
    E = curve(label)
    m = p ** n
    f = exact_order_poly(E, p, n).f
    for ell in primes_up_to(20000):
        if ell <= 3 or E.discriminant % ell == 0 or (ell - 1) % m:
            continue
        if any(Fraction(c).denominator % ell == 0 for c in f):
            continue
        C = reduce_curve(E, ell)
        if torsion_basis(C, p, n) is None:
            continue
        assert _roots_mod(f, ell) == _exact_order_x(C, p, n)
        return
    pytest.fail("no prime with full torsion found")
