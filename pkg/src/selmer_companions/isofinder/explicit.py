"""Explicit isomorphisms E1[p^n] = E2[p^n] through a polynomial map on
x-coordinates.

Let f_i be the exact-order polynomial of E_i (degree d).  An isomorphism of
Galois modules induces a map on the roots of f1, and since x(-P) = x(P) this
map is given by a polynomial phi over Q of degree < d.  We find phi at a prime
l where both curves have full p^n-torsion over F_l:

1. fix a basis (P1, P2) on E1 mod l and try every basis (Q1, Q2) of E2 mod l
   (up to a global sign);
2. for each, pair x(aP1 + bP2) with x(aQ1 + bQ2), Hensel-lift both sides to
   l^B, interpolate and rationally reconstruct the coefficients;
3. keep the first phi with f1 | f2(phi) over Q.

A surviving phi is then checked on the whole torsion grid mod l and the
possible quadratic twist left over is eliminated with Frobenius traces.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from ..algebra import (
    Poly, hensel_lift_root, interpolate, kronecker_symbol, next_prime,
    prime_factors, rational_reconstruction,
)
from ..curves_finite import (
    all_bases, combinations, count_points, reduce_curve, torsion_basis,
    trace_small, validate_basis,
)
from ..torsion import exact_order_poly

INITIAL_DIGITS = 40
MAX_DIGITS = 320


class NoSplitPrime(LookupError):
    pass


# ---------------------------------------------------------------------------
# split primes

def _good_at(E, ell):
    return E.discriminant % ell != 0


def find_split_prime(E1, E2, p, n, bound=50000, pin=None, seed=0):
    """Smallest l <= bound (or the pinned l) with good reduction for both
    curves, p^n | l - 1 and full p^n-torsion on both reductions.

    Returns (l, basis1, basis2).
    """
    m = p ** n
    candidates = [pin] if pin else _primes_one_mod(m, bound)
    for ell in candidates:
        if ell <= 3 or not (_good_at(E1, ell) and _good_at(E2, ell)):
            continue
        if (ell - 1) % m:
            continue
        C1, C2 = reduce_curve(E1, ell), reduce_curve(E2, ell)
        if count_points(C1) % (m * m) or count_points(C2) % (m * m):
            continue
        B1 = torsion_basis(C1, p, n, seed=seed)
        if B1 is None:
            continue
        B2 = torsion_basis(C2, p, n, seed=seed)
        if B2 is None:
            continue
        return ell, B1, B2
    raise NoSplitPrime("no split prime found")


def _primes_one_mod(m, bound):
    ell = 1 + m
    while ell <= bound:
        if ell > 3 and _is_probable(ell):
            yield ell
        ell += m


def _is_probable(n):
    from ..algebra import is_prime
    return is_prime(n)


# ---------------------------------------------------------------------------
# phi

def precision_schedule(ell, initial_digits=INITIAL_DIGITS, max_digits=MAX_DIGITS):
    """Exponents B: start with l^B > 10^initial, double until l^B > 10^max."""
    B = 1
    while ell ** B <= 10 ** initial_digits:
        B += 1
    out = [B]
    while ell ** out[-1] <= 10 ** max_digits:
        out.append(2 * out[-1])
    return out


def _exact_pairs(m, p):
    return [(a, b) for a in range(m) for b in range(m) if a % p or b % p]


class PhiContext:
    """Data shared by every candidate at a fixed split prime l.

    Holds f1, f2, the torsion grids on both reductions, Hensel lifts of the
    roots and the Lagrange basis on the f1 roots, per precision.
    """

    def __init__(self, E1, E2, p, n, ell, basis1, basis2=None):
        self.E1, self.E2, self.p, self.n, self.ell = E1, E2, p, n, ell
        self.m = p ** n
        self.f1 = exact_order_poly(E1, p, n).f
        self.f2 = exact_order_poly(E2, p, n).f
        self.C1 = reduce_curve(E1, ell)
        self.C2 = reduce_curve(E2, ell)
        self.basis1 = basis1
        self.basis2 = basis2
        self.grid1 = combinations(self.C1, basis1.P1, basis1.P2, self.m)
        self.grid2 = (combinations(self.C2, basis2.P1, basis2.P2, self.m)
                      if basis2 else None)
        self.exact = _exact_pairs(self.m, p)
        # one representative (a, b) per root of f1
        self.nodes = {}
        for a, b in self.exact:
            x = self.C1.x_to_model(self.grid1[a][b][0])
            self.nodes.setdefault(x, (a, b))
        self.node_list = sorted(self.nodes)
        self._int1 = self.f1.content_free()[0]
        self._int2 = self.f2.content_free()[0]
        self._lifts = {}
        self._lagrange = {}

    def lift1(self, x, B):
        key = (1, x, B)
        if key not in self._lifts:
            self._lifts[key] = hensel_lift_root(self._int1, self.ell, x, B)
        return self._lifts[key]

    def lift2(self, x, B):
        key = (2, x, B)
        if key not in self._lifts:
            self._lifts[key] = hensel_lift_root(self._int2, self.ell, x, B)
        return self._lifts[key]

    def lagrange(self, B):
        """Coefficient rows L_i of the Lagrange basis polynomials mod l^B."""
        if B not in self._lagrange:
            M = self.ell ** B
            xs = [self.lift1(x, B) for x in self.node_list]
            rows = []
            for i in range(len(xs)):
                pts = [(x, 1 if j == i else 0) for j, x in enumerate(xs)]
                L = interpolate(pts, M, self.ell)
                rows.append(list(L.coeffs) + [0] * (len(xs) - len(L.coeffs)))
            self._lagrange[B] = rows
        return self._lagrange[B]

    def image_x(self, coeffs, a, b):
        """x-coordinate (model) of a*Q1 + b*Q2 with Q1 = c11 P1' + c12 P2',
        Q2 = c21 P1' + c22 P2' in terms of the E2 grid."""
        (c11, c12), (c21, c22) = coeffs
        m = self.m
        A = (a * c11 + b * c21) % m
        B = (a * c12 + b * c22) % m
        return self.C2.x_to_model(self.grid2[A][B][0])

    def correspondence(self, image_x):
        """Pairs (x1, x2) mod l for each root x1 of f1; image_x maps the grid
        index (a, b) of E1 to the model x-coordinate on E2."""
        return [(x, image_x(*self.nodes[x])) for x in self.node_list]

    def phi_from_pairs(self, pairs, B, fast=True):
        """Interpolate the lifted correspondence and reconstruct over Q."""
        M = self.ell ** B
        ys = [self.lift2(y, B) for _, y in pairs]
        if fast:
            rows = self.lagrange(B)
            d = len(ys)
            coeffs = []
            for k in range(d):
                c = 0
                for i in range(d):
                    c += ys[i] * rows[i][k]
                r = rational_reconstruction(c % M, M)
                if r is None:
                    return None
                coeffs.append(r)
            return Poly(coeffs)
        xs = [self.lift1(x, B) for x, _ in pairs]
        poly = interpolate(list(zip(xs, ys)), M, self.ell)
        coeffs = []
        for c in poly.coeffs:
            r = rational_reconstruction(c, M)
            if r is None:
                return None
            coeffs.append(r)
        return Poly(coeffs)


def compute_phi(E1, E2, p, n, ell, basis, images, B, context=None):
    """phi over Q with phi(x(aP1 + bP2)) = x(aQ1 + bQ2), or None.

    `basis` is a TorsionBasis on E1 mod l (short-model points) and `images`
    the pair (Q1, Q2) of short-model points on E2 mod l.
    """
    ctx = context or PhiContext(E1, E2, p, n, ell, basis)
    C2, m = ctx.C2, ctx.m
    Q1, Q2 = images
    grid = combinations(C2, Q1, Q2, m)

    def image_x(a, b):
        R = grid[a][b]
        if R is None:
            raise ValueError("images are not a basis")
        return C2.x_to_model(R[0])

    pairs = ctx.correspondence(image_x)
    seen = set()
    for _, y in pairs:
        if y in seen:
            return None
        seen.add(y)
    return ctx.phi_from_pairs(pairs, B, fast=False)


def divides_after_composition(f1, f2, phi):
    """f1 | f2(phi) over Q, via Horner's rule reduced modulo f1."""
    return f2.compose_mod(phi, f1).is_zero()


def search_phi(E1, E2, p, n, ell, basis1=None, basis2=None, seed=0,
               max_digits=MAX_DIGITS, progress=None):
    """Try every basis of E2 mod l (modulo sign); first phi passing the
    divisibility check wins.  Returns (phi, (Q1, Q2), context) or None."""
    m = p ** n
    if basis1 is None or basis2 is None:
        C1, C2 = reduce_curve(E1, ell), reduce_curve(E2, ell)
        basis1 = basis1 or torsion_basis(C1, p, n, seed=seed)
        basis2 = basis2 or torsion_basis(C2, p, n, seed=seed)
        if basis1 is None or basis2 is None:
            return None
    ctx = PhiContext(E1, E2, p, n, ell, basis1, basis2)
    candidates = all_bases(ctx.C2, None, None, p, n)
    for B in precision_schedule(ell, max_digits=max_digits):
        for idx, coeffs in enumerate(candidates):
            if progress:
                progress(B, idx, len(candidates))
            pairs = ctx.correspondence(lambda a, b: ctx.image_x(coeffs, a, b))
            phi = ctx.phi_from_pairs(pairs, B)
            if phi is None:
                continue
            if divides_after_composition(ctx.f1, ctx.f2, phi):
                grid = ctx.grid2
                (c11, c12), (c21, c22) = coeffs
                return phi, (grid[c11][c12], grid[c21][c22]), ctx
    return None


# ---------------------------------------------------------------------------
# certificates

@dataclass
class TwistWitness:
    character: int          # d with chi = chi_d
    q: int
    signs: tuple            # chi_i(q) over the character basis
    trace1: int             # a_q(E1) mod p^n
    trace2: int

    def to_json(self):
        return {"character": str(self.character), "q": str(self.q),
                "signs": [str(s) for s in self.signs], "trace1_mod_m": str(self.trace1),
                "trace2_mod_m": str(self.trace2)}


@dataclass
class IsoCertificate:
    m: int
    p: int
    n: int
    phi: Poly
    ell: int
    basis: object
    images: tuple
    divisibility: bool
    center_square: bool
    bijective: bool
    character_basis: list = field(default_factory=list)
    twist_elimination: list = field(default_factory=list)
    twist_failure: str = None

    @property
    def checks_pass(self):
        return self.divisibility and self.center_square and self.bijective

    @property
    def valid(self):
        return (self.checks_pass and self.twist_failure is None
                and len(self.twist_elimination) == len(self.character_basis)
                and len(self.character_basis) > 0)

    def to_json(self):
        return {
            "m": str(self.m),
            "p": str(self.p),
            "n": str(self.n),
            "ell": str(self.ell),
            "phi": self.phi.to_strings(),
            "basis": self.basis.to_json(),
            "images": [[str(c) for c in Q] for Q in self.images],
            "checks": {"divisibility": self.divisibility,
                       "center_square": self.center_square,
                       "bijective": self.bijective},
            "character_basis": [str(d) for d in self.character_basis],
            "twist_elimination": [w.to_json() for w in self.twist_elimination],
            "twist_failure": self.twist_failure,
            "valid": self.valid,
        }


def center_square(E1, E2, p, n, phi, ell, basis, images):
    """phi(x(aP1 + bP2)) = x(aQ1 + bQ2) in F_l for every exact-order (a, b)."""
    C1, C2 = reduce_curve(E1, ell), reduce_curve(E2, ell)
    m = p ** n
    g1 = combinations(C1, basis.P1, basis.P2, m)
    g2 = combinations(C2, images[0], images[1], m)
    for a, b in _exact_pairs(m, p):
        R1, R2 = g1[a][b], g2[a][b]
        if R2 is None:
            return False
        x1 = C1.x_to_model(R1[0])
        x2 = C2.x_to_model(R2[0])
        if phi.eval_mod(x1, ell) != x2:
            return False
    return True


def certify_iso(E1, E2, p, n, phi, ell, basis, images, f1=None, f2=None):
    """Run the three checks.  Failures are recorded, never raised."""
    m = p ** n
    f1 = f1 or exact_order_poly(E1, p, n).f
    f2 = f2 or exact_order_poly(E2, p, n).f
    d = f1.degree
    div = phi.degree < d and divides_after_composition(f1, f2, phi)
    C2 = reduce_curve(E2, ell)
    try:
        bij = validate_basis(C2, images[0], images[1], p, n)
    except (ValueError, ZeroDivisionError):
        bij = False
    try:
        square = bij and center_square(E1, E2, p, n, phi, ell, basis, images)
    except (ValueError, ZeroDivisionError):
        square = False
    return IsoCertificate(m, p, n, phi, ell, basis, tuple(images), div, square, bij)


# ---------------------------------------------------------------------------
# quadratic twists

def character_basis(E1, E2, p, n):
    """Basis of the quadratic characters unramified outside S, where S holds
    infinity, 2 and the odd primes dividing m * disc(E1) * disc(E2).

    Characters are given by their discriminant-like integer d (chi_d), in the
    order -1, 2, then l* = +-l = 1 mod 4 for increasing odd l.
    """
    m = p ** n
    primes = set(prime_factors(m * E1.discriminant * E2.discriminant)) - {2}
    out = [-1, 2]
    for ell in sorted(primes):
        out.append(ell if ell % 4 == 1 else -ell)
    return out


def _bad_set(E1, E2, p):
    return set(prime_factors(p * E1.discriminant * E2.discriminant)) | {2}


def eliminate_twist(E1, E2, p, n, bound=20000, basis=None):
    """One witness prime per basis character.

    For chi_i we need a good odd prime q outside S with chi_i(q) = -1,
    chi_j(q) = 1 (j != i), a_q(E1) = a_q(E2) and a_q(E1) != -a_q(E2) mod p^n.
    Returns (witnesses, failure) where failure names the first character
    without a witness below `bound` (or None).
    """
    m = p ** n
    basis = basis or character_basis(E1, E2, p, n)
    bad = _bad_set(E1, E2, p)
    want = {i: None for i in range(len(basis))}
    q = 2
    traces = {}
    while q <= bound and any(w is None for w in want.values()):
        q = next_prime(q)
        if q in bad:
            continue
        signs = tuple(kronecker_symbol(d, q) for d in basis)
        if signs.count(-1) != 1:
            continue
        i = signs.index(-1)
        if want[i] is not None:
            continue
        if q not in traces:
            traces[q] = (trace_small(E1, q) % m, trace_small(E2, q) % m)
        t1, t2 = traces[q]
        if t1 == t2 and (t1 + t2) % m:
            want[i] = TwistWitness(basis[i], q, signs, t1, t2)
    witnesses = [want[i] for i in range(len(basis)) if want[i] is not None]
    failure = None
    for i, d in enumerate(basis):
        if want[i] is None:
            failure = f"no witness for chi_{d} below {bound}"
            break
    return witnesses, failure


def check_witness(E1, E2, m, basis, w):
    """Recompute a witness from scratch: signs and traces."""
    signs = tuple(kronecker_symbol(d, w.q) for d in basis)
    t1 = trace_small(E1, w.q) % m
    t2 = trace_small(E2, w.q) % m
    expected = tuple(-1 if d == w.character else 1 for d in basis)
    return (signs == tuple(w.signs) == expected and t1 == w.trace1
            and t2 == w.trace2 and t1 == t2 and (t1 + t2) % m != 0)


def load_phi_file(path):
    import json
    with open(path) as fh:
        items = json.load(fh)
    return Poly(Fraction(s) for s in items)


def run_a2(E1, E2, p, n, ell=None, bound=50000, phi=None, seed=0,
           twist_bound=20000, progress=None):
    """The whole explicit route.  Returns an IsoCertificate or None."""
    ell, B1, B2 = find_split_prime(E1, E2, p, n, bound=bound, pin=ell, seed=seed)
    if phi is not None:
        ctx = PhiContext(E1, E2, p, n, ell, B1, B2)
        images = _images_for_phi(ctx, phi)
        if images is None:
            cert = IsoCertificate(p ** n, p, n, phi, ell, B1, (None, None),
                                  divides_after_composition(ctx.f1, ctx.f2, phi)
                                  if phi.degree < ctx.f1.degree else False,
                                  False, False)
            return cert
    else:
        found = search_phi(E1, E2, p, n, ell, B1, B2, seed=seed, progress=progress)
        if found is None:
            return None
        phi, images, ctx = found
    cert = certify_iso(E1, E2, p, n, phi, ell, B1, images, ctx.f1, ctx.f2)
    cert.character_basis = character_basis(E1, E2, p, n)
    if cert.checks_pass:
        w, fail = eliminate_twist(E1, E2, p, n, bound=twist_bound,
                                  basis=cert.character_basis)
        cert.twist_elimination = w
        cert.twist_failure = fail
    return cert


def _images_for_phi(ctx, phi):
    """Given phi, find a basis (Q1, Q2) of E2 mod l with
    x(aQ1 + bQ2) = phi(x(aP1 + bP2)); None if there is none."""
    ell, C2, m, p = ctx.ell, ctx.C2, ctx.m, ctx.p
    for coeffs in all_bases(C2, None, None, p, ctx.n):
        ok = True
        for x, (a, b) in ctx.nodes.items():
            if phi.eval_mod(x, ell) != ctx.image_x(coeffs, a, b):
                ok = False
                break
        if ok:
            (c11, c12), (c21, c22) = coeffs
            return ctx.grid2[c11][c12], ctx.grid2[c21][c22]
    return None
