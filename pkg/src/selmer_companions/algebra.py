"""Exact arithmetic kernels.

Rationals are plain :class:`fractions.Fraction` values.  Polynomials over Q
live in :class:`Poly`; polynomials over a residue ring Z/N live in
:class:`PolyMod`.  Both are dense, immutable and store coefficients lowest
degree first.

Besides the usual ring operations this module has the number theory needed
elsewhere in the package: deterministic Miller-Rabin, the Kronecker symbol,
Hensel lifting of simple roots, interpolation over Z/N, rational
reconstruction and rational root finding.
"""

from fractions import Fraction
from math import gcd, isqrt

import flint
from sympy import factorint


__all__ = [
    "Fraction", "Poly", "PolyMod", "ResidueContext",
    "is_prime", "next_prime", "primes_up_to", "prime_factors", "valuation",
    "kronecker_symbol", "is_square", "squarefree_part",
    "poly_divrem", "hensel_lift_root", "hensel_lift_roots",
    "interpolate", "rational_reconstruction", "rational_roots",
    "roots_mod_prime",
]


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


# ---------------------------------------------------------------------------
# integers

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n):
    """Deterministic primality test for n < 2**64.

    The twelve prime bases up to 37 are a proven witness set below 3.3e24,
    which covers the supported range.  Larger inputs raise ValueError instead
    of being answered probabilistically.
    """
    n = int(n)
    if n < 2:
        return False
    if n >= 1 << 64:
        raise ValueError("primality test only supported below 2**64")
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n):
    """Smallest prime strictly greater than n."""
    n = int(n) + 1
    if n <= 2:
        return 2
    if n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 2
    return n


def primes_up_to(bound):
    """Sieve of Eratosthenes; primes p with p <= bound."""
    bound = int(bound)
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, bound + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def prime_factors(n):
    """Sorted list of the distinct primes dividing the nonzero integer n."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("zero has no finite factorization")
    return sorted(factorint(n))


def valuation(x, p):
    """p-adic valuation of a nonzero integer or Fraction."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def kronecker_symbol(d, q):
    """Kronecker symbol (d/q) for an integer d and an integer q >= 1.

    Completely multiplicative in q, with (d/2) given by d mod 8 and the
    Jacobi symbol on the odd part.
    """
    d, q = int(d), int(q)
    if q <= 0:
        raise ValueError("q must be positive")
    if q == 1:
        return 1
    result = 1
    while q % 2 == 0:
        q //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    # Jacobi symbol (d/q) for odd q
    a = d % q
    while a:
        while a % 2 == 0:
            a //= 2
            if q % 8 in (3, 5):
                result = -result
        a, q = q, a
        if a % 4 == 3 and q % 4 == 3:
            result = -result
        a %= q
    return result if q == 1 else 0


def is_square(x):
    """True when the rational x is the square of a rational."""
    x = as_fraction(x)
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


def squarefree_part(n):
    """The squarefree integer d with n = d * square (sign kept)."""
    n = int(n)
    if n == 0:
        raise ValueError("zero has no squarefree part")
    d = -1 if n < 0 else 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            d *= p
    return d


# ---------------------------------------------------------------------------
# polynomials over Q

def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Dense univariate polynomial over Q, coefficients lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, Poly):
            coeffs = coeffs.coeffs
        object.__setattr__(self, "coeffs", _strip(as_fraction(c) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def x(cls):
        return cls((0, 1))

    @classmethod
    def constant(cls, c):
        return cls((c,))

    @property
    def degree(self):
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _strip((as_fraction(other),))
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            elif mono:
                terms.append(f"({c})*{mono}" if c.denominator != 1 else f"{c}*{mono}")
            else:
                terms.append(str(c))
        return " + ".join(terms).replace("+ -", "- ")

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(c * other for c in self.coeffs)
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power")
        result, base = Poly((1,)), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other):
        return poly_divrem(self, other)

    def __floordiv__(self, other):
        return poly_divrem(self, other)[0]

    def __mod__(self, other):
        return poly_divrem(self, other)[1]

    def __call__(self, x):
        """Evaluate by Horner's rule (works for any ring element x)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mod(self, x, modulus):
        """Evaluate at x in Z/modulus; denominators must be units."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c.numerator * pow(c.denominator, -1, modulus)) % modulus
        return acc

    def derivative(self):
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self):
        if not self.coeffs:
            raise ZeroDivisionError("zero polynomial has no monic associate")
        lc = self.coeffs[-1]
        return Poly(c / lc for c in self.coeffs)

    def compose(self, g):
        """self(g(x)) by Horner's rule."""
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def compose_mod(self, g, h):
        """self(g(x)) mod h, reducing after every Horner step."""
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = poly_divrem(acc * g + c, h)[1]
        return acc

    def gcd(self, other):
        """Monic gcd.  Done on the primitive integer parts with FLINT, since
        Euclid over Q blows up in coefficient size at the degrees used here."""
        if self.is_zero():
            return other.monic() if not other.is_zero() else other
        if other.is_zero():
            return self.monic()
        a, _ = self.content_free()
        b, _ = other.content_free()
        g = flint.fmpz_poly(a).gcd(flint.fmpz_poly(b))
        return Poly(int(c) for c in g.coeffs()).monic()

    def squarefree(self):
        """Product of the distinct irreducible factors (characteristic 0)."""
        g = self.gcd(self.derivative())
        return poly_divrem(self, g)[0].monic()

    def content_free(self):
        """(primitive integer polynomial as a list of ints, scale) with
        self = scale * primitive and the primitive leading coefficient > 0."""
        if not self.coeffs:
            raise ValueError("zero polynomial")
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return [v // g for v in ints], Fraction(g, den)

    def mod(self, modulus):
        """Reduce into Z/modulus (denominators must be invertible)."""
        out = []
        for c in self.coeffs:
            out.append(c.numerator * pow(c.denominator, -1, modulus) % modulus)
        return PolyMod(out, modulus)

    def to_strings(self):
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items):
        return cls(Fraction(s) for s in items)


def poly_divrem(f, g):
    """Division with remainder over Q: f = q*g + r with deg r < deg g."""
    f, g = Poly(f), Poly(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(f.coeffs)
    dg = g.degree
    if len(r) <= dg:
        return Poly(), f
    inv = 1 / g.lc
    gc = g.coeffs
    q = [Fraction(0)] * (len(r) - dg)
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k]
        if c == 0:
            continue
        c = c * inv
        q[k - dg] = c
        for i in range(dg):
            if gc[i]:
                r[k - dg + i] -= c * gc[i]
        r[k] = Fraction(0)
    return Poly(q), Poly(r[:dg])


# ---------------------------------------------------------------------------
# residue rings

class ResidueContext:
    """Z/N with a flag recording whether N is a (verified) prime."""

    __slots__ = ("modulus", "is_prime")

    def __init__(self, modulus, is_prime_flag=False):
        modulus = int(modulus)
        if modulus < 2:
            raise ValueError("modulus must be at least 2")
        if is_prime_flag and not is_prime(modulus):
            raise ValueError(f"{modulus} is not prime")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "is_prime", bool(is_prime_flag))

    def __setattr__(self, name, value):
        raise AttributeError("ResidueContext is immutable")

    def __repr__(self):
        return f"ResidueContext({self.modulus}, prime={self.is_prime})"

    def inv(self, a):
        return pow(a, -1, self.modulus)

    def sqrt(self, a):
        """A square root of a mod a prime modulus, or None."""
        if not self.is_prime:
            raise ValueError("square roots only over prime fields")
        return sqrt_mod_prime(a, self.modulus)


def sqrt_mod_prime(a, p):
    """Tonelli-Shanks.  Returns some r with r*r = a mod p, or None."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


class PolyMod:
    """Dense polynomial over Z/N."""

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs, modulus):
        modulus = int(modulus)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "coeffs", _strip(int(c) % modulus for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("PolyMod is immutable")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return (isinstance(other, PolyMod) and self.modulus == other.modulus
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.coeffs, self.modulus))

    def __repr__(self):
        return f"PolyMod({list(self.coeffs)}, {self.modulus})"

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __call__(self, x):
        acc, N = 0, self.modulus
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % N
        return acc

    def derivative(self):
        return PolyMod([i * c for i, c in enumerate(self.coeffs) if i], self.modulus)


# ---------------------------------------------------------------------------
# lifting, interpolation, reconstruction

def _int_coeffs(f):
    """Integer coefficient list from a Poly, PolyMod or sequence."""
    if isinstance(f, (Poly, PolyMod)):
        f = f.coeffs
    out = []
    for c in f:
        c = as_fraction(c) if not isinstance(c, int) else c
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise ValueError("integer coefficients required")
            c = c.numerator
        out.append(int(c))
    return out


def _horner(coeffs, x, N):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % N
    return acc


def hensel_lift_root(f, ell, r0, B):
    """Lift a simple root r0 of f mod ell to a root mod ell**B.

    f has integer coefficients.  Uses Newton's iteration, doubling the
    precision at each step.
    """
    ell, B = int(ell), int(B)
    if B < 1:
        raise ValueError("target exponent must be positive")
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    coeffs = _int_coeffs(f)
    dcoeffs = [i * c for i, c in enumerate(coeffs) if i]
    r = int(r0) % ell
    if _horner(coeffs, r, ell) != 0:
        raise ValueError("r0 is not a root mod ell")
    if _horner(dcoeffs, r, ell) == 0:
        raise ValueError("root not liftable (f'(r0) = 0 mod ell)")
    k = 1
    while k < B:
        k = min(2 * k, B)
        N = ell ** k
        r = (r - _horner(coeffs, r, N) * pow(_horner(dcoeffs, r, N), -1, N)) % N
    return r


def hensel_lift_roots(f, ell, roots, B):
    """Lift several simple roots at once (shares the derivative)."""
    return [hensel_lift_root(f, ell, r, B) for r in roots]


def interpolate(points, modulus, prime=None):
    """Polynomial of degree < len(points) through points over Z/modulus.

    Newton divided differences.  When `prime` is given, nodes must be
    distinct modulo that prime (so all differences are units when the
    modulus is a power of it).
    """
    N = int(modulus)
    xs = [int(x) % N for x, _ in points]
    ys = [int(y) % N for _, y in points]
    n = len(xs)
    if n == 0:
        return PolyMod([], N)
    check = int(prime) if prime else N
    for i in range(n):
        for j in range(i):
            if (xs[i] - xs[j]) % check == 0:
                raise ValueError("nodes collide mod ell")
    # divided differences
    dd = list(ys)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) * pow(xs[i] - xs[i - level], -1, N) % N
    # expand the Newton form
    poly = [0] * n
    poly[0] = dd[n - 1]
    size = 1
    for i in range(n - 2, -1, -1):
        # poly = poly * (x - xs[i]) + dd[i]
        new = [0] * (size + 1)
        for k in range(size):
            new[k + 1] = (new[k + 1] + poly[k]) % N
            new[k] = (new[k] - poly[k] * xs[i]) % N
        new[0] = (new[0] + dd[i]) % N
        poly[:size + 1] = new
        size += 1
    return PolyMod(poly[:n], N)


def rational_reconstruction(a, M, bound=None):
    """Find n/d with |n|, d <= bound and n = a*d mod M, or None.

    Half-extended Euclid.  With no bound, floor(sqrt(M/2)) is used, the
    largest value for which the answer is unique.
    """
    M = int(M)
    if bound is None:
        bound = isqrt(M // 2)
    bound = int(bound)
    if bound < 1:
        raise ValueError("bound must be positive")
    if 2 * bound * bound >= M:
        raise ValueError("modulus too small for bound")
    a = int(a) % M
    r0, r1 = M, a
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    n, d = r1, t1
    if d == 0 or abs(d) > bound:
        return None
    if d < 0:
        n, d = -n, -d
    if gcd(d, M) != 1 or (n - a * d) % M:
        return None
    return Fraction(n, d)


def _rat_recon_two_bounds(a, M, nbound, dbound):
    """Variant with separate numerator and denominator bounds
    (needs 2*nbound*dbound < M)."""
    a %= M
    r0, r1 = M, a
    t0, t1 = 0, 1
    while r1 > nbound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    n, d = r1, t1
    if d == 0 or abs(d) > dbound:
        return None
    if d < 0:
        n, d = -n, -d
    if gcd(d, M) != 1:
        return None
    return Fraction(n, d)


# ---------------------------------------------------------------------------
# roots

def roots_mod_prime(f, p):
    """Sorted roots in F_p of an integer polynomial (brute force, small p)."""
    coeffs = [c % p for c in _int_coeffs(f)]
    return [x for x in range(p) if _horner(coeffs, x, p) == 0]


def _divisors(n):
    out = [1]
    for q, e in factorint(abs(n)).items():
        out = [d * q ** k for d in out for k in range(e + 1)]
    return out


def rational_roots_by_divisors(f):
    """Rational roots by the textbook candidate test n/d with n | a_0,
    d | a_n.  Only practical for coefficients that factor easily; kept as
    an independent check of :func:`rational_roots`."""
    f = Poly(f)
    if f.is_zero():
        raise ValueError("identically zero")
    roots = set()
    ints, _ = f.content_free()
    k = 0
    while ints[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    ints = ints[k:]
    for n in _divisors(ints[0]):
        for d in _divisors(ints[-1]):
            for cand in (Fraction(n, d), Fraction(-n, d)):
                if _horner_q(ints, cand) == 0:
                    roots.add(cand)
    return roots


def _horner_q(ints, x):
    acc = Fraction(0)
    for c in reversed(ints):
        acc = acc * x + c
    return acc


def rational_roots(f):
    """All roots of f in Q.

    The polynomial is made squarefree and primitive.  Any rational root n/d
    in lowest terms has n | a_0 and d | a_n, so it is recovered from a p-adic
    root modulo p**k > 2*|a_0|*|a_n| by rational reconstruction with those
    two bounds.  Candidates are confirmed by exact evaluation.  This avoids
    factoring the end coefficients, which can have hundreds of digits.
    """
    f = Poly(f)
    if f.is_zero():
        raise ValueError("identically zero")
    roots = set()
    ints, _ = f.content_free()
    k = 0
    while ints[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    g = Poly(ints[k:])
    if g.degree <= 0:
        return roots
    g = g.squarefree()
    ints, _ = g.content_free()
    if len(ints) == 2:
        roots.add(Fraction(-ints[0], ints[1]))
        return roots
    lead, tail = abs(ints[-1]), abs(ints[0])
    dints = [i * c for i, c in enumerate(ints) if i]
    # pick a prime where g stays squarefree of full degree
    p = 101
    while True:
        p = next_prime(p)
        if lead % p == 0:
            continue
        gp = Poly(ints).mod(p)
        if _is_squarefree_mod(gp, p):
            break
    target = 2 * lead * tail + 1
    B = 1
    while p ** B <= target:
        B += 1
    M = p ** B
    for r in roots_mod_prime(ints, p):
        if _horner(dints, r, p) == 0:
            continue
        lifted = hensel_lift_root(ints, p, r, B)
        cand = _rat_recon_two_bounds(lifted, M, tail, lead)
        if cand is not None and _horner_q(ints, cand) == 0:
            roots.add(cand)
    return roots


def _is_squarefree_mod(fp, p):
    """gcd(f, f') = 1 over F_p, with f of the same degree as over Q."""
    a = list(fp.coeffs)
    b = list(fp.derivative().coeffs)
    if not b:
        return False
    while b:
        a = _rem_mod(a, b, p)
        a, b = b, a
    return len(a) == 1


def _rem_mod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv % p
        if c:
            for i in range(db + 1):
                a[k - db + i] = (a[k - db + i] - c * b[i]) % p
    a = a[:db]
    while a and a[-1] == 0:
        a.pop()
    return a
