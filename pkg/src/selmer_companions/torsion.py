"""Division polynomials and exact-order polynomials.

Everything is computed on the curve's own (long) Weierstrass model from its
b-invariants.  With F(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 = psi_2^2 we use the
univariate polynomials

    g_m = psi_m            (m odd),    deg (m^2 - 1)/2
    g_m = psi_m / psi_2    (m even),   deg (m^2 - 4)/2

so g_1 = g_2 = 1.  They satisfy

    g_{2k+1} = F^2 g_{k+2} g_k^3 - g_{k-1} g_{k+1}^3     (k even)
    g_{2k+1} = g_{k+2} g_k^3 - F^2 g_{k-1} g_{k+1}^3     (k odd)
    g_{2k}   = g_k (g_{k+2} g_{k-1}^2 - g_{k-2} g_{k+1}^2)
"""

from dataclasses import dataclass

from .algebra import Poly, poly_divrem


class ConventionMismatch(ArithmeticError):
    pass


def two_torsion_poly(E):
    """psi_2^2 = 4x^3 + b2 x^2 + 2 b4 x + b6; its roots are the x-coordinates
    of the points of order 2."""
    b2, b4, b6, _ = E.b_invariants
    return Poly([b6, 2 * b4, b2, 4])


def _division_table(E, m):
    b2, b4, b6, b8 = E.b_invariants
    F = two_torsion_poly(E)
    F2 = F * F
    g = {
        0: Poly(),
        1: Poly([1]),
        2: Poly([1]),
        3: Poly([b8, 3 * b6, 3 * b4, b2, 3]),
        4: Poly([b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6, 5 * b4, b2, 2]),
    }

    def get(k):
        if k in g:
            return g[k]
        h = k // 2
        if k % 2:
            if h % 2 == 0:
                val = F2 * get(h + 2) * get(h) ** 3 - get(h - 1) * get(h + 1) ** 3
            else:
                val = get(h + 2) * get(h) ** 3 - F2 * get(h - 1) * get(h + 1) ** 3
        else:
            val = get(h) * (get(h + 2) * get(h - 1) ** 2 - get(h - 2) * get(h + 1) ** 2)
        g[k] = val
        return val

    get(m)
    return g


def division_poly(E, m):
    """g_m as above: psi_m for odd m, psi_m/psi_2 for even m."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be positive")
    return _division_table(E, m)[m]


def exact_order_degree(p, n):
    if p == 2 and n == 1:
        return 3
    return (p ** (2 * n) - p ** (2 * n - 2)) // 2


@dataclass(frozen=True)
class ExactOrderPoly:
    curve: object
    p: int
    n: int
    f: Poly

    @property
    def degree(self):
        return self.f.degree


def exact_order_poly(E, p, n):
    """Monic polynomial whose roots are the x-coordinates of the points of
    exact order p^n.

    For p^n = 2 the answer is the cubic psi_2^2 (a point of order 2 equals its
    own negative, so the usual count (p^{2n} - p^{2n-2})/2 does not apply).
    """
    p, n = int(p), int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if p == 2 and n == 1:
        return ExactOrderPoly(E, p, n, two_torsion_poly(E).monic())
    top = division_poly(E, p ** n)
    low = division_poly(E, p ** (n - 1))
    q, r = poly_divrem(top, low)
    if not r.is_zero():
        raise ConventionMismatch("convention mismatch")
    f = q.monic()
    if f.degree != exact_order_degree(p, n):
        raise ConventionMismatch("convention mismatch")
    return ExactOrderPoly(E, p, n, f)
