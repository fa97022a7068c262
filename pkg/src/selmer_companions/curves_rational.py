"""Elliptic curves over Q.

A :class:`CurveQ` is an integral Weierstrass model

    y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6

together with its b-, c-invariants, discriminant and j-invariant.  Local data
at a prime comes from Tate's algorithm (:func:`reduction_type`), which also
handles 2 and 3.
"""

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from math import gcd, isqrt

from .algebra import (
    is_square, kronecker_symbol, prime_factors, squarefree_part, valuation,
)


class SingularCurveError(ValueError):
    pass


def _icbrt_exact(n):
    """Integer cube root of n if n is a perfect cube, else None."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    r = round(n ** (1 / 3)) if n < 1 << 60 else _iroot(n, 3)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** 3 == n:
            return sign * c
    return None


def _iroot(n, k):
    """floor(n ** (1/k)) for n >= 0 by Newton's method."""
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _exact_root(q, k):
    """Rational k-th root of q if it exists (q > 0 for even k)."""
    q = Fraction(q)
    if q < 0 and k % 2 == 0:
        return None
    sign = -1 if q < 0 else 1
    n, d = abs(q.numerator), q.denominator
    rn, rd = _iroot(n, k), _iroot(d, k)
    if rn ** k == n and rd ** k == d:
        return sign * Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class CurveQ:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: str = None

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            v = getattr(self, name)
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ValueError("model must be integral; use CurveQ.from_rational")
                v = v.numerator
            object.__setattr__(self, name, int(v))
        if self.discriminant == 0:
            raise SingularCurveError("singular model")

    # constructors -------------------------------------------------------
    @classmethod
    def from_ainvs(cls, ainvs, label=None):
        if len(ainvs) == 2:
            ainvs = (0, 0, 0, ainvs[0], ainvs[1])
        if len(ainvs) != 5:
            raise ValueError("expected 5 (or 2) coefficients")
        fr = [Fraction(a) for a in ainvs]
        if all(a.denominator == 1 for a in fr):
            return cls(*fr, label=label)
        return cls.from_rational(fr, label=label)

    @classmethod
    def from_rational(cls, ainvs, label=None):
        """Clear denominators with x -> x/u^2, y -> y/u^3 (a_i -> u^i a_i)."""
        fr = [Fraction(a) for a in ainvs]
        u = 1
        for i, a in zip((1, 2, 3, 4, 6), fr):
            # smallest u with u^i * a integral, built prime by prime
            d = a.denominator
            for p in (prime_factors(d) if d > 1 else []):
                e = valuation(d, p)
                need = -(-e // i)
                have = valuation(u, p) if u % p == 0 else 0
                if need > have:
                    u *= p ** (need - have)
        return cls(*(a * u ** i for i, a in zip((1, 2, 3, 4, 6), fr)), label=label)

    @classmethod
    def short(cls, A, B, label=None):
        """y^2 = x^3 + A x + B."""
        return cls.from_ainvs((0, 0, 0, A, B), label=label)

    @property
    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    # invariants ---------------------------------------------------------
    @cached_property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def b2(self):
        return self.b_invariants[0]

    @property
    def b4(self):
        return self.b_invariants[1]

    @property
    def b6(self):
        return self.b_invariants[2]

    @property
    def b8(self):
        return self.b_invariants[3]

    @property
    def c4(self):
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @property
    def c6(self):
        b2, b4, b6, _ = self.b_invariants
        return -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    @cached_property
    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j(self):
        return Fraction(self.c4 ** 3, self.discriminant)

    def short_coefficients(self):
        """(A, B) of the integral short model y^2 = x^3 - 27 c4 x - 54 c6."""
        return -27 * self.c4, -54 * self.c6

    def short_model(self):
        A, B = self.short_coefficients()
        return CurveQ(0, 0, 0, A, B)

    def name(self):
        return self.label or str(list(self.ainvs))

    def __str__(self):
        return f"{self.label or 'E'} {list(self.ainvs)}"

    def to_json(self):
        out = {"ainvs": [str(a) for a in self.ainvs]}
        if self.label:
            out["label"] = self.label
        return out


def invariants(E):
    """(c4, c6, discriminant, j) of E."""
    return E.c4, E.c6, E.discriminant, E.j


# ---------------------------------------------------------------------------
# Tate's algorithm

KODAIRA_SYMBOLS = ("I0", "II", "III", "IV", "I0*", "IV*", "III*", "II*")


@dataclass(frozen=True)
class ReductionData:
    prime: int
    reduction: str          # "good", "multiplicative" or "additive"
    split: bool             # meaningful for multiplicative reduction only
    kodaira: str
    conductor_exponent: int
    j_valuation: int        # ord_p(j); 0 is used when j = 0
    minimal_discriminant_valuation: int

    @property
    def nu(self):
        """The index in I_nu or I_nu*, else 0."""
        k = self.kodaira
        if k.startswith("I") and k not in ("II", "III", "II*", "III*"):
            core = k[1:].rstrip("*")
            return int(core)
        return 0

    def is_good(self):
        return self.reduction == "good"

    def is_multiplicative(self):
        return self.reduction == "multiplicative"

    def is_additive(self):
        return self.reduction == "additive"

    def to_json(self):
        return {
            "prime": str(self.prime),
            "reduction": self.reduction,
            "split": self.split if self.reduction == "multiplicative" else None,
            "kodaira": self.kodaira,
            "conductor_exponent": str(self.conductor_exponent),
            "j_valuation": str(self.j_valuation),
        }


def _rst(ainvs, r, s, t):
    """Substitute x = x' + r, y = y' + s x' + t."""
    a1, a2, a3, a4, a6 = ainvs
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1,
    )


def _binv(ainvs):
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _val(n, p):
    """Valuation of an integer, with a large sentinel for zero."""
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _has_root_mod(a, b, c, p):
    """Does a T^2 + b T + c (a a unit) have a root in F_p?"""
    if p == 2:
        return any((a * x * x + b * x + c) % 2 == 0 for x in (0, 1))
    disc = (b * b - 4 * a * c) % p
    return kronecker_symbol(disc, p) >= 0


def _pref(x, p):
    """Balanced residue of x mod p."""
    x %= p
    return x - p if x > p // 2 else x


def reduction_type(E, p):
    """Run Tate's algorithm for E at the prime p."""
    p = int(p)
    j = E.j
    jval = valuation(j, p) if j != 0 else 0
    ainvs = E.ainvs
    inv2 = pow(2, -1, p) if p != 2 else None

    while True:
        a1, a2, a3, a4, a6 = ainvs
        b2, b4, b6, b8 = _binv(ainvs)
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
        disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        vD = _val(disc, p)
        if vD == 0:
            return ReductionData(p, "good", False, "I0", 0, jval, 0)

        # move the singular point to (0, 0) modulo p
        if p == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (a6 + r * (a4 + r * (a2 + r))) % 2
            else:
                r = a3 % 2
                t = (a4 + r * r) % 2
        elif p == 3:
            if b2 % 3 == 0:
                r = -b6 % 3
            else:
                r = -b2 * b4 % 3
            t = (a1 * r + a3) % 3
        else:
            if c4 % p == 0:
                r = -pow(12, -1, p) * b2
            else:
                r = -pow(12 * c4, -1, p) * (c6 + b2 * c4)
            t = -inv2 * (a1 * r + a3)
        r, t = _pref(r, p), _pref(t, p)
        ainvs = _rst(ainvs, r, 0, t)
        a1, a2, a3, a4, a6 = ainvs
        b2, b4, b6, b8 = _binv(ainvs)

        if c4 % p:
            # node: split iff the tangent slopes T^2 + a1 T - a2 are rational
            split = _has_root_mod(1, a1, -a2, p)
            return ReductionData(p, "multiplicative", split, f"I{vD}", 1, jval, vD)

        if _val(a6, p) < 2:
            return ReductionData(p, "additive", False, "II", vD, jval, vD)
        if _val(b8, p) < 3:
            return ReductionData(p, "additive", False, "III", vD - 1, jval, vD)
        if _val(b6, p) < 3:
            return ReductionData(p, "additive", False, "IV", vD - 2, jval, vD)

        # now p | a1, a2 ; p^2 | a3, a4 ; p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        elif p == 3:
            s = a1
            t = a3
        else:
            s = -a1 * inv2
            t = -a3 * inv2
        if p > 3:
            s, t = _pref(s, p), _pref(t, p)
        ainvs = _rst(ainvs, 0, s, t)
        a1, a2, a3, a4, a6 = ainvs

        # the cubic T^3 + b T^2 + c T + d
        b, c, d = a2 // p, a4 // p ** 2, a6 // p ** 3
        w = 27 * d * d - b * b * c * c + 4 * b ** 3 * d - 18 * b * c * d + 4 * c ** 3
        x = 3 * c - b * b
        if w % p:
            return ReductionData(p, "additive", False, "I0*", vD - 4, jval, vD)

        if x % p:
            # double root: move it to T = 0 and run the I_nu* subprocedure
            if p == 2:
                r = c % 2
            elif p == 3:
                r = b * c
            else:
                r = (b * c - 9 * d) * pow(2 * x, -1, p)
            ainvs = _rst(ainvs, p * _pref(r, p), 0, 0)
            ix = iy = 3
            mx = my = p * p
            while True:
                a1, a2, a3, a4, a6 = ainvs
                a2t = a2 // p
                a3t = a3 // my
                a6t = a6 // (mx * my)
                if (a3t * a3t + 4 * a6t) % p:
                    break
                if p == 2:
                    t = my * (a6t % 2)
                else:
                    t = my * _pref(-a3t * inv2, p)
                ainvs = _rst(ainvs, 0, 0, t)
                my *= p
                iy += 1
                a1, a2, a3, a4, a6 = ainvs
                a2t = a2 // p
                a4t = a4 // (p * mx)
                a6t = a6 // (mx * my)
                if (a4t * a4t - 4 * a6t * a2t) % p:
                    break
                if p == 2:
                    r = mx * ((a6t * a2t) % 2)
                else:
                    r = mx * _pref(-a4t * pow(2 * a2t, -1, p), p)
                ainvs = _rst(ainvs, r, 0, 0)
                mx *= p
                ix += 1
            nu = ix + iy - 5
            return ReductionData(p, "additive", False, f"I{nu}*", vD - 4 - nu, jval, vD)

        # triple root: move it to T = 0
        if p == 2:
            r = b
        elif p == 3:
            r = _icbrt_mod3(-d)
        else:
            r = -b * pow(3, -1, p)
        ainvs = _rst(ainvs, p * _pref(r, p), 0, 0)
        a1, a2, a3, a4, a6 = ainvs
        a3t = a3 // p ** 2
        a6t = a6 // p ** 4
        if (a3t * a3t + 4 * a6t) % p:
            return ReductionData(p, "additive", False, "IV*", vD - 6, jval, vD)
        if p == 2:
            t = -4 * (a6t % 2)
        else:
            t = p * p * _pref(-a3t * inv2, p)
        ainvs = _rst(ainvs, 0, 0, t)
        a1, a2, a3, a4, a6 = ainvs
        if _val(a4, p) < 4:
            return ReductionData(p, "additive", False, "III*", vD - 7, jval, vD)
        if _val(a6, p) < 6:
            return ReductionData(p, "additive", False, "II*", vD - 8, jval, vD)
        # the model was not minimal at p: scale down and start again
        ainvs = (a1 // p, a2 // p ** 2, a3 // p ** 3, a4 // p ** 4, a6 // p ** 6)


def _icbrt_mod3(x):
    # every residue mod 3 is its own cube
    return x % 3


def bad_primes(E):
    return prime_factors(E.discriminant)


def local_data(E):
    """ReductionData at every prime dividing the discriminant of the model."""
    return {p: reduction_type(E, p) for p in bad_primes(E)}


def conductor(E):
    N = 1
    for p, data in local_data(E).items():
        N *= p ** data.conductor_exponent
    return N


def pot_mult_primes(E):
    """Primes in the denominator of j(E)."""
    den = E.j.denominator
    return set(prime_factors(den)) if den > 1 else set()


def additive_primes(E):
    return {p for p, data in local_data(E).items() if data.is_additive()}


def is_semistable(E):
    return not additive_primes(E)


# ---------------------------------------------------------------------------
# twists and isomorphism

def quadratic_twist(E, d):
    """Integral model of the quadratic twist E^d, d squarefree and nonzero.

    Completing the square and scaling by 4 gives
    Y^2 = X^3 + d b2 X^2 + 8 d^2 b4 X + 16 d^3 b6, whose discriminant is
    2^12 d^6 disc(E); so the model has good reduction at every odd prime
    not dividing d disc(E), including 3.
    """
    d = int(d)
    if d == 0:
        raise ValueError("twist parameter must be nonzero")
    if squarefree_part(d) != d:
        raise ValueError(f"{d} is not squarefree")
    label = f"{E.label}^({d})" if E.label else None
    if d == 1:
        return E if label is None else CurveQ(*E.ainvs, label=E.label)
    b2, b4, b6, _ = E.b_invariants
    return CurveQ(0, d * b2, 0, 8 * d * d * b4, 16 * d ** 3 * b6, label=label)


def is_isomorphic_q(E1, E2):
    """(True, u) when E1 and E2 are isomorphic over Q, else (False, None).

    u is the scaling of the isomorphism: c4(E2) = c4(E1)/u^4 and
    c6(E2) = c6(E1)/u^6.
    """
    if E1.j != E2.j:
        return False, None
    c4a, c6a, c4b, c6b = E1.c4, E1.c6, E2.c4, E2.c6
    if c4a == 0:
        # j = 0: only c6 matters, need a sixth power
        u = _exact_root(Fraction(c6a, c6b), 6)
        return (True, abs(u)) if u is not None else (False, None)
    if c6a == 0:
        u = _exact_root(Fraction(c4a, c4b), 4)
        return (True, abs(u)) if u is not None else (False, None)
    # u^2 = (c4b c6a)/(c6b c4a) must be a square
    ratio = Fraction(c6a * c4b, c4a * c6b)
    if not is_square(ratio):
        return False, None
    u = Fraction(isqrt(ratio.numerator), isqrt(ratio.denominator))
    return True, u


def twist_parameter(E1, E2):
    """For j(E1) = j(E2) not 0 or 1728: the squarefree d with E2 = E1^d."""
    if E1.j != E2.j:
        raise ValueError("different j-invariants")
    if E1.c4 == 0 or E1.c6 == 0:
        raise ValueError("twist parameter is not quadratic when j is 0 or 1728")
    ratio = Fraction(E1.c4 * E2.c6, E1.c6 * E2.c4)
    num = ratio.numerator * ratio.denominator
    return squarefree_part(num)


# ---------------------------------------------------------------------------
# registry

DATA_ENV = "SELMER_COMPANIONS_DATA"


def data_path(*parts):
    """Locate a bundled data file (or one under $SELMER_COMPANIONS_DATA)."""
    root = os.environ.get(DATA_ENV)
    if root:
        return os.path.join(root, *parts)
    return str(resources.files("selmer_companions").joinpath("data", *parts))


def load_registry(path=None):
    path = path or data_path("curves.json")
    with open(path) as fh:
        raw = json.load(fh)
    out = {}
    for entry in raw["curves"]:
        E = CurveQ.from_ainvs([int(a) for a in entry["ainvs"]], label=entry["label"])
        check = entry.get("j")
        if check is not None and E.j != Fraction(check):
            raise ValueError(f"registry entry {entry['label']}: j mismatch")
        out[entry["label"]] = E
    return out


_REGISTRIES = {}


def registry():
    """The curve registry for the current data directory, loaded once per path."""
    path = data_path("curves.json")
    if path not in _REGISTRIES:
        _REGISTRIES[path] = load_registry(path)
    return _REGISTRIES[path]


def curve(text):
    """A curve from a registry label or from 'a1,a2,a3,a4,a6' (or 'A,B')."""
    if isinstance(text, CurveQ):
        return text
    text = str(text).strip()
    reg = registry()
    if text in reg:
        return reg[text]
    parts = [s for s in text.strip("[]").replace(" ", "").split(",") if s]
    try:
        coeffs = [Fraction(s) for s in parts]
    except ValueError:
        raise ValueError(f"unknown curve {text!r}") from None
    if len(coeffs) not in (2, 5):
        raise ValueError(f"unknown curve {text!r}")
    return CurveQ.from_ainvs(coeffs)


def content_gcd(*vals):
    g = 0
    for v in vals:
        g = gcd(g, int(v))
    return g
