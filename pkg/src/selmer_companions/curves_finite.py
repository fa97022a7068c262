"""Elliptic curves over prime fields F_l, l > 3.

Curves are kept in short form y^2 = x^3 + A x + B.  A curve reduced from a
rational model remembers the change of variables

    x_s = x + b2/12,        y_s = y + (a1 x + a3)/2

so points written on the original (long) model can be moved onto the short
model and back (:meth:`CurveFp.from_model`, :meth:`CurveFp.to_model`).

Points are plain tuples (x, y); the point at infinity is ``None``.
"""

import random
from dataclasses import dataclass

from .algebra import is_prime, kronecker_symbol, sqrt_mod_prime
from .curves_rational import reduction_type

INFINITY = None
NAIVE_COUNT_BOUND = 1 << 22


class BadReductionError(ValueError):
    pass


@dataclass(frozen=True)
class CurveFp:
    ell: int
    A: int
    B: int
    # (a1, a2, a3, a4, a6) mod ell of the model this curve was reduced from
    model: tuple = None

    def __post_init__(self):
        ell = self.ell
        if ell <= 3 or not is_prime(ell):
            raise ValueError("small prime unsupported" if ell <= 3 else f"{ell} is not prime")
        object.__setattr__(self, "A", self.A % ell)
        object.__setattr__(self, "B", self.B % ell)
        if (4 * self.A ** 3 + 27 * self.B ** 2) % ell == 0:
            raise ValueError("singular curve")

    def rhs(self, x):
        return (x * x * x + self.A * x + self.B) % self.ell

    def contains(self, P):
        if P is None:
            return True
        x, y = P
        return (y * y - self.rhs(x)) % self.ell == 0

    # coordinate changes between the short model and the original model
    def _shift(self):
        ell = self.ell
        a1, a2, a3, _, _ = self.model if self.model else (0, 0, 0, 0, 0)
        b2 = a1 * a1 + 4 * a2
        return b2 * pow(12, -1, ell) % ell, a1, a3

    def from_model(self, P):
        """A point given on the original model, moved onto the short model."""
        if P is None:
            return None
        ell = self.ell
        x, y = P[0] % ell, P[1] % ell
        r, a1, a3 = self._shift()
        Q = ((x + r) % ell, (y + (a1 * x + a3) * pow(2, -1, ell)) % ell)
        if not self.contains(Q):
            raise ValueError(f"{P} is not on the model")
        return Q

    def to_model(self, P):
        if P is None:
            return None
        ell = self.ell
        xs, ys = P
        r, a1, a3 = self._shift()
        x = (xs - r) % ell
        return x, (ys - (a1 * x + a3) * pow(2, -1, ell)) % ell

    def x_to_model(self, xs):
        return (xs - self._shift()[0]) % self.ell

    def x_from_model(self, x):
        return (x + self._shift()[0]) % self.ell

    # group law
    def neg(self, P):
        if P is None:
            return None
        return P[0], (-P[1]) % self.ell

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        ell = self.ell
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if (y1 + y2) % ell == 0:
                return None
            lam = (3 * x1 * x1 + self.A) * pow(2 * y1, -1, ell) % ell
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, ell) % ell
        x3 = (lam * lam - x1 - x2) % ell
        return x3, (lam * (x1 - x3) - y1) % ell

    def mul(self, k, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        R = None
        while k:
            if k & 1:
                R = self.add(R, P)
            k >>= 1
            if k:
                P = self.add(P, P)
        return R

    def checked_add(self, P, Q):
        if not (self.contains(P) and self.contains(Q)):
            raise ValueError("point not on curve")
        return self.add(P, Q)

    def checked_mul(self, k, P):
        if not self.contains(P):
            raise ValueError("point not on curve")
        return self.mul(k, P)

    def points(self):
        """All points, infinity first (small l only)."""
        ell = self.ell
        out = [None]
        for x in range(ell):
            r = sqrt_mod_prime(self.rhs(x), ell)
            if r is None:
                continue
            out.append((x, r))
            if r:
                out.append((x, ell - r))
        return out

    def random_point(self, rng):
        ell = self.ell
        while True:
            x = rng.randrange(ell)
            r = sqrt_mod_prime(self.rhs(x), ell)
            if r is not None:
                return (x, r if rng.random() < 0.5 else (-r) % ell)

    def order(self, P):
        """Order of P by brute force (repeated addition)."""
        k, Q = 1, P
        while Q is not None:
            Q = self.add(Q, P)
            k += 1
        return k

    def count_points(self):
        return count_points(self)

    def trace(self):
        return self.ell + 1 - count_points(self)


def reduce_curve(E, ell):
    """Short Weierstrass model of E mod ell, recording the shift from E's model."""
    ell = int(ell)
    if ell <= 3:
        raise ValueError("small prime unsupported")
    if E.discriminant % ell == 0:
        if reduction_type(E, ell).is_good():
            raise BadReductionError("model is not minimal at this prime")
        raise BadReductionError("bad reduction")
    A = -E.c4 * pow(48, -1, ell)
    B = -E.c6 * pow(864, -1, ell)
    return CurveFp(ell, A, B, tuple(a % ell for a in E.ainvs))


_QR_CACHE = {}


def _residue_table(ell):
    table = _QR_CACHE.get(ell)
    if table is None:
        table = bytearray(ell)
        for y in range(1, (ell + 1) // 2):
            table[y * y % ell] = 1
        if len(_QR_CACHE) > 64:
            _QR_CACHE.clear()
        _QR_CACHE[ell] = table
    return table


def count_points(C, bound=NAIVE_COUNT_BOUND):
    """#C(F_l) by summing Legendre symbols of x^3 + A x + B."""
    ell = C.ell
    if ell > bound:
        raise ValueError("prime too large")
    qr = _residue_table(ell)
    A, B = C.A, C.B
    n = 1
    for x in range(ell):
        v = (x * x * x + A * x + B) % ell
        if v == 0:
            n += 1
        elif qr[v]:
            n += 2
    return n


def trace_of_frobenius(E, q):
    """a_q(E) for a prime q > 3 of good reduction."""
    return reduce_curve(E, q).trace()


def trace_small(E, q):
    """a_q for any prime q of good reduction, q = 2, 3 included, by direct
    count on the long model."""
    if q > 3:
        return trace_of_frobenius(E, q)
    a1, a2, a3, a4, a6 = (a % q for a in E.ainvs)
    n = 1
    for x in range(q):
        for y in range(q):
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % q == 0:
                n += 1
    return q + 1 - n


# ---------------------------------------------------------------------------
# torsion bases

@dataclass(frozen=True)
class TorsionBasis:
    ell: int
    p: int
    n: int
    P1: tuple
    P2: tuple

    @property
    def m(self):
        return self.p ** self.n

    def to_json(self):
        return {"ell": str(self.ell), "p": str(self.p), "n": str(self.n),
                "P1": [str(c) for c in self.P1], "P2": [str(c) for c in self.P2]}


class BasisSearchExhausted(RuntimeError):
    pass


def _pval(N, p):
    e = 0
    while N % p == 0:
        N //= p
        e += 1
    return e


def has_exact_order(C, P, m, p):
    """m = p^n: P has order exactly m."""
    return C.mul(m, P) is None and C.mul(m // p, P) is not None


def combinations(C, P1, P2, m):
    """Grid G[a][b] = a*P1 + b*P2 for 0 <= a, b < m."""
    rows = []
    A = None
    for _ in range(m):
        row = []
        R = A
        for _ in range(m):
            row.append(R)
            R = C.add(R, P2)
        rows.append(row)
        A = C.add(A, P1)
    return rows


def validate_basis(C, P1, P2, p, n):
    """Both points of exact order p^n and all a*P1 + b*P2 pairwise distinct."""
    m = p ** n
    if not (C.contains(P1) and C.contains(P2)):
        return False
    if not (has_exact_order(C, P1, m, p) and has_exact_order(C, P2, m, p)):
        return False
    seen = set()
    for row in combinations(C, P1, P2, m):
        for R in row:
            if R in seen:
                return False
            seen.add(R)
    return len(seen) == m * m


def sylow_subgroup(C, p, N=None, seed=0, max_samples=10000):
    """The p-Sylow subgroup of C(F_l) as an explicit set of points.

    Random points are pushed into the Sylow subgroup by the cofactor and the
    generated subgroup is grown until it reaches the order p^e dictated by
    the point count.
    """
    N = N or count_points(C)
    e = _pval(N, p)
    target = p ** e
    cof = N // target
    H = {None}
    rng = random.Random(seed)
    samples = 0
    while len(H) < target:
        if samples >= max_samples:
            raise BasisSearchExhausted("basis search exhausted")
        samples += 1
        S = C.mul(cof, C.random_point(rng))
        if S in H:
            continue
        # H <- H + <S>, adding cosets until a multiple of S falls into H
        new = set(H)
        layer = set(H)
        T = S
        while T not in H:
            layer = {C.add(h, S) for h in layer}
            new |= layer
            T = C.add(T, S)
        H = new
    return H


def torsion_points(C, p, n, seed=0):
    """All points of C(F_l)[p^n] (as a set), via the Sylow subgroup."""
    m = p ** n
    return {P for P in sylow_subgroup(C, p, seed=seed) if C.mul(m, P) is None}


def torsion_basis(C, p, n, seed=0):
    """A basis of C(F_l)[p^n] = (Z/p^n)^2, or None when it is not full."""
    m = p ** n
    N = count_points(C)
    if N % (m * m) or (C.ell - 1) % m:
        return None
    pts = torsion_points(C, p, n, seed=seed)
    if len(pts) < m * m:
        return None
    exact = sorted(P for P in pts if P is not None and C.mul(m // p, P) is not None)
    rng = random.Random(seed)
    rng.shuffle(exact)
    P1 = exact[0]
    low1 = C.mul(m // p, P1)
    line = {C.mul(k, low1) for k in range(p)}
    for P2 in exact[1:]:
        if C.mul(m // p, P2) not in line:
            break
    else:
        raise BasisSearchExhausted("basis search exhausted")
    if not validate_basis(C, P1, P2, p, n):
        raise AssertionError("basis failed validation")
    return TorsionBasis(C.ell, p, n, P1, P2)


def all_bases(C, P1, P2, p, n):
    """All ordered bases (Q1, Q2) of the group spanned by P1, P2, up to the
    global sign (Q1, Q2) ~ (-Q1, -Q2); returned as coefficient pairs
    ((a, b), (c, d)) with Q1 = aP1 + bP2, Q2 = cP1 + dP2."""
    m = p ** n
    out = []
    seen = set()
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    if (a * d - b * c) % p == 0:
                        continue
                    key = ((a, b, c, d))
                    neg = ((-a) % m, (-b) % m, (-c) % m, (-d) % m)
                    if neg in seen:
                        continue
                    seen.add(key)
                    out.append(((a, b), (c, d)))
    return out
