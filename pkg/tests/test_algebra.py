from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from selmer_companions.algebra import (
    Poly, PolyMod, ResidueContext, hensel_lift_root, interpolate, is_prime,
    kronecker_symbol, poly_divrem, primes_up_to, rational_reconstruction,
    rational_roots, rational_roots_by_divisors, roots_mod_prime, sqrt_mod_prime,
    squarefree_part, valuation,
)

X = Poly.x()


def P(*coeffs):
    return Poly([Fraction(c) for c in coeffs])


# --- rational roots -------------------------------------------------------

@pytest.mark.parametrize("f, expected", [
    (X - 1, {1}),
    (X * X + 1, set()),
    ((22 * X + 9) * (X * X + 1), {Fraction(-9, 22)}),
    ((X - 2) ** 3 * (3 * X + 1), {2, Fraction(-1, 3)}),
    (P(0, 0, 1), {0}),
    (P(Fraction(1, 2), Fraction(-1, 3)), {Fraction(3, 2)}),
])
def test_rational_roots_examples(f, expected):
    assert rational_roots(f) == expected
    assert rational_roots_by_divisors(f) == expected


def test_rational_roots_zero_polynomial():
    with pytest.raises(ValueError, match="identically zero"):
        rational_roots(Poly([]))


@settings(max_examples=150, deadline=None)
@given(
    roots=st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=12), max_size=4),
    extra=st.lists(st.integers(-9, 9), min_size=1, max_size=4),
)
def test_rational_roots_matches_divisor_oracle(roots, extra):
    f = Poly([Fraction(c) for c in extra]) if any(extra) else Poly([1])
    for r in roots:
        f = f * (X - r)
    if f.is_zero():
        return
    found = rational_roots(f)
    assert found == rational_roots_by_divisors(f)
    assert set(roots) <= found
    assert all(f(r) == 0 for r in found)


def test_rational_roots_high_degree():
    # product of many linear factors plus an irreducible quadratic
    f = X * X + X + 1
    expected = set()
    for k in range(1, 16):
        r = Fraction((-1) ** k * k * 7, k + 3)
        f = f * (X - r)
        expected.add(r)
    assert rational_roots(f) == expected


# --- Hensel lifting -------------------------------------------------------

def test_hensel_sqrt2_mod_49():
    assert hensel_lift_root(X * X - 2, 7, 3, 2) == 10


@pytest.mark.parametrize("ell, B", [(5, 1), (7, 3), (19681, 4)])
def test_hensel_linear(ell, B):
    assert hensel_lift_root(X - 5, ell, 5 % ell, B) == 5 % ell ** B


def test_hensel_rejects_double_root():
    with pytest.raises(ValueError, match="root not liftable"):
        hensel_lift_root((X - 1) ** 2, 5, 1, 3)


def test_hensel_rejects_composite():
    with pytest.raises(ValueError):
        hensel_lift_root(X - 1, 15, 1, 2)


small_primes = [p for p in primes_up_to(400) if p > 2]


@settings(max_examples=1000, deadline=None)
@given(
    coeffs=st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=7),
    ell=st.sampled_from(small_primes),
    B=st.integers(1, 12),
)
def test_hensel_round_trip(coeffs, ell, B):
    f = Poly(coeffs)
    if f.degree < 1:
        return
    df = f.derivative()
    for r0 in roots_mod_prime(f, ell):
        if df.eval_mod(r0, ell) == 0:
            continue
        r = hensel_lift_root(f, ell, r0, B)
        assert r % ell == r0
        assert f.eval_mod(r, ell ** B) == 0


# --- rational reconstruction ----------------------------------------------

@pytest.mark.parametrize("a, M, bound, expected", [
    (65, 97, 6, Fraction(1, 3)),
    (4, 97, 6, Fraction(4)),
])
def test_rational_reconstruction_examples(a, M, bound, expected):
    assert rational_reconstruction(a, M, bound) == expected


def _exhaustive_reconstruction(a, M, bound):
    hits = {Fraction(n, d) for n in range(-bound, bound + 1) for d in range(1, bound + 1)
            if (n - a * d) % M == 0}
    assert len(hits) <= 1
    return hits.pop() if hits else None


def test_reconstruction_48_mod_97():
    # 2 * 48 = 96 = -1 mod 97, so -1/2 is the (unique) answer within the bound
    assert _exhaustive_reconstruction(48, 97, 6) == Fraction(-1, 2)
    assert rational_reconstruction(48, 97, 6) == Fraction(-1, 2)


@pytest.mark.parametrize("M, bound", [(97, 6), (101, 7), (1009, 22)])
def test_rational_reconstruction_exhaustive(M, bound):
    for a in range(M):
        assert rational_reconstruction(a, M, bound) == _exhaustive_reconstruction(a, M, bound)


def test_rational_reconstruction_precondition():
    with pytest.raises(ValueError, match="modulus too small"):
        rational_reconstruction(5, 97, 7)


@settings(max_examples=1000, deadline=None)
@given(
    n=st.integers(-10**30, 10**30),
    d=st.integers(1, 10**30),
    extra=st.integers(0, 40),
)
def test_rational_reconstruction_round_trip(n, d, extra):
    if d % 10007 == 0:
        return
    bound = max(abs(n), d) + extra
    M = 10007
    while M <= 2 * bound * bound:
        M *= 10007
    a = n * pow(d, -1, M) % M
    assert rational_reconstruction(a, M, bound) == Fraction(n, d)


# --- interpolation --------------------------------------------------------

def test_interpolate_constant():
    f = interpolate([(0, 5)], 101)
    assert [int(c) for c in f] == [5]


def test_interpolate_square():
    f = interpolate([(1, 1), (2, 4), (3, 9)], 101)
    assert f == PolyMod([0, 0, 1], 101)


def test_interpolate_collision():
    with pytest.raises(ValueError, match="nodes collide"):
        interpolate([(1, 2), (8, 3)], 49, prime=7)


@settings(max_examples=200, deadline=None)
@given(
    xs=st.lists(st.integers(0, 10**6), min_size=1, max_size=12, unique=True),
    seed=st.integers(0, 10**9),
    B=st.integers(1, 5),
)
def test_interpolate_reevaluates(xs, seed, B):
    ell = 1000003
    M = ell ** B
    pts = [(x, (seed * (i + 3) ** 5 + x) % M) for i, x in enumerate(xs)]
    f = interpolate(pts, M, prime=ell)
    assert f.degree < len(pts)
    for x, y in pts:
        assert f(x) % M == y


# --- polynomial division --------------------------------------------------

@pytest.mark.parametrize("f, g, q, r", [
    (X * X - 1, X - 1, X + 1, Poly([])),
    (X * X + 1, X, X, Poly([1])),
])
def test_divrem_examples(f, g, q, r):
    assert poly_divrem(f, g) == (q, r)


def test_divrem_by_zero():
    with pytest.raises(ZeroDivisionError):
        poly_divrem(X, Poly([]))


fracs = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@settings(max_examples=200, deadline=None)
@given(st.lists(fracs, max_size=8), st.lists(fracs, min_size=1, max_size=5))
def test_divrem_identity(fc, gc):
    f, g = Poly(fc), Poly(gc)
    if g.is_zero():
        return
    q, r = poly_divrem(f, g)
    assert (f - q * g - r).is_zero()
    assert r.is_zero() or r.degree < g.degree


@settings(max_examples=100, deadline=None)
@given(st.lists(fracs, min_size=1, max_size=5), st.lists(fracs, min_size=1, max_size=5),
       st.lists(fracs, min_size=1, max_size=4))
def test_gcd_contains_common_factor(ac, bc, cc):
    a, b, c = Poly(ac), Poly(bc), Poly(cc)
    if a.is_zero() or b.is_zero() or c.is_zero():
        return
    g = (a * c).gcd(b * c)
    assert (g % c.monic()).is_zero() if c.degree > 0 else True
    assert ((a * c) % g).is_zero() and ((b * c) % g).is_zero()


def test_compose_mod_agrees_with_compose():
    f = P(3, -1, 0, 2, 5)
    g = P(1, Fraction(1, 2), 7)
    h = P(-2, 0, 1, 1)
    assert f.compose_mod(g, h) == f.compose(g) % h


def test_poly_strings_round_trip():
    f = P(Fraction(-9, 22), 0, 10**40, Fraction(1, 3))
    assert Poly.from_strings(f.to_strings()) == f


# --- number theory --------------------------------------------------------

@pytest.mark.parametrize("d, q, expected", [(-1, 31, -1), (2, 349, -1), (-23, 241, -1)])
def test_kronecker_examples(d, q, expected):
    assert kronecker_symbol(d, q) == expected


def test_kronecker_vs_euler_exhaustive():
    for q in primes_up_to(199):
        if q == 2:
            continue
        for d in range(-2 * q, 2 * q + 1):
            if d % q == 0:
                assert kronecker_symbol(d, q) == 0
                continue
            euler = pow(d, (q - 1) // 2, q)
            assert kronecker_symbol(d, q) == (1 if euler == 1 else -1)


@pytest.mark.parametrize("d", [1, -1, 2, -2, 3, 5, -7, 17])
def test_kronecker_multiplicative_in_q(d):
    for a in range(1, 60):
        for b in range(1, 60):
            assert kronecker_symbol(d, a * b) == kronecker_symbol(d, a) * kronecker_symbol(d, b)


def test_kronecker_at_two():
    # (d/2) depends on d mod 8 for odd d
    for d in range(-40, 41):
        expected = 0 if d % 2 == 0 else (1 if d % 8 in (1, 7) else -1)
        assert kronecker_symbol(d, 2) == expected


def test_primality_against_sieve():
    sieve = set(primes_up_to(5000))
    assert all(is_prime(n) == (n in sieve) for n in range(5000))


@pytest.mark.parametrize("n", [2**61 - 1, 2**64 - 59, 19681])
def test_known_large_primes(n):
    assert is_prime(n)


@pytest.mark.parametrize("n", [3215031751, 2**64 - 1, 341550071728321])
def test_known_pseudoprimes_rejected(n):
    assert not is_prime(n)


def test_primality_range_limit():
    with pytest.raises(ValueError):
        is_prime(2**64 + 13)


def test_residue_context():
    ctx = ResidueContext(19681, True)
    assert ctx.inv(731) * 731 % 19681 == 1
    with pytest.raises(ValueError):
        ResidueContext(1)
    with pytest.raises(ValueError):
        ResidueContext(91, True)


@pytest.mark.parametrize("p", [3, 5, 13, 17, 97, 19681, 1000003])
def test_sqrt_mod_prime(p):
    for a in range(1, 200):
        if kronecker_symbol(a, p) == 1:
            r = sqrt_mod_prime(a, p)
            assert r * r % p == a % p


@pytest.mark.parametrize("n, expected", [(12, 3), (-1242, -138), (1, 1), (-26, -26), (72, 2)])
def test_squarefree_part(n, expected):
    assert squarefree_part(n) == expected


def test_valuation_of_rationals():
    assert valuation(Fraction(9261, 46), 2) == -1
    assert valuation(Fraction(9261, 46), 3) == 3
    assert valuation(-2**49 * 23, 2) == 49
