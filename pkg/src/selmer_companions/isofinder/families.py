"""Universal families for m = 3, 4, 5.

For a curve E: y^2 = x^3 + a x + b the family E_s: y^2 = x^3 + a(s) x + b(s)
parametrizes the curves whose m-torsion is symplectically isomorphic to
E[m].  The coefficients of a(s), b(s) are weight-homogeneous polynomials in
a and b; they are stored once, for all E, in ``universal_families.json``:

    a(t) = sum_i  sum_{(i1, i2)} c * a^i1 * b^i2 * t^i       (same for b)

in a parameter t of weight -2, normalised by E_0 = E and by
a(t) = a + b t + O(t^2) for m = 4, 5 (a(t) = a + 6 b t + O(t^2) for m = 3).

The family is stored in the weight-zero parameter s = t a^2 / (k b) with
k = 30 for m = 5 and k = 1 otherwise, so the values of s do not depend on
the chosen short model of E.  When a b = 0 the parameter t is used as is.

How the tables were obtained: for m = 4, 5 the twisted Klein model of the
modular curve X(m) (from the octahedral and icosahedral invariants) was
specialised numerically at many (a, b) and the rational coefficients were
recognised; for m = 3 the family is exact, built from the covariants
of the 3-division quartic and rescaled by 1/3 so that E itself (not its twist
by 3) sits at t = 0.  Every table passes the checks in
tests/test_families.py: J(0) = j(E), the family discriminant is a constant
times an m-th power, and members have a_q congruent to a_q(E) mod m.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..algebra import Poly, rational_roots, squarefree_part
from ..curves_rational import CurveQ, SingularCurveError, data_path, is_isomorphic_q, quadratic_twist

PARAMETER_SCALE = {3: 1, 4: 1, 5: 30}


class DegenerateFamily(ValueError):
    pass


@lru_cache(maxsize=None)
def universal_table():
    with open(data_path("universal_families.json")) as fh:
        raw = json.load(fh)
    out = {}
    for m, tab in raw.items():
        out[int(m)] = {
            key: [[(i1, i2, Fraction(c)) for i1, i2, c in row] for row in tab[key]]
            for key in ("a", "b")
        }
    return out


@dataclass(frozen=True)
class FamilyData:
    m: int
    a: Poly
    b: Poly
    seed_label: str = None
    seed_ainvs: tuple = None
    parameter: str = "s"
    source: str = ""

    def member(self, s):
        """The specialisation E_s as an integral CurveQ (or raises if singular)."""
        A, B = self.a(Fraction(s)), self.b(Fraction(s))
        return CurveQ.from_rational((0, 0, 0, A, B))

    def discriminant_poly(self):
        return 4 * self.a ** 3 + 27 * self.b ** 2

    def to_json(self):
        return {
            "m": str(self.m),
            "seed_label": self.seed_label,
            "seed_ainvs": [str(c) for c in self.seed_ainvs] if self.seed_ainvs else None,
            "parameter": self.parameter,
            "a_coeffs": self.a.to_strings(),
            "b_coeffs": self.b.to_strings(),
            "source": self.source,
        }

    @classmethod
    def from_json(cls, raw, validate=True):
        fam = cls(
            m=int(raw["m"]),
            a=Poly.from_strings(raw["a_coeffs"]),
            b=Poly.from_strings(raw["b_coeffs"]),
            seed_label=raw.get("seed_label"),
            seed_ainvs=tuple(int(c) for c in raw["seed_ainvs"]) if raw.get("seed_ainvs") else None,
            parameter=raw.get("parameter", "s"),
            source=raw.get("source", ""),
        )
        if validate:
            validate_family(fam)
        return fam


def validate_family(fam):
    """J(0) must equal j of the seed curve; also the family must not be
    degenerate."""
    num, den = family_j(fam)
    if fam.seed_ainvs:
        seed = CurveQ.from_ainvs(fam.seed_ainvs)
        if den(0) == 0 or num(0) / den(0) != seed.j:
            raise ValueError("family file failed the J(0) = j(seed) check")
    return True


def load_family(path, validate=True):
    with open(path) as fh:
        return FamilyData.from_json(json.load(fh), validate=validate)


def _eval_table(rows, a, b):
    return [sum((c * a ** i1 * b ** i2 for i1, i2, c in row), Fraction(0)) for row in rows]


def build_family(E, m, label=None):
    """FamilyData of level m seeded by E (through its short model)."""
    m = int(m)
    tab = universal_table().get(m)
    if tab is None:
        raise ValueError(f"no universal family stored for m = {m}")
    a, b = (Fraction(v) for v in E.short_coefficients())
    ca = _eval_table(tab["a"], a, b)
    cb = _eval_table(tab["b"], a, b)
    if a != 0 and b != 0:
        lam = PARAMETER_SCALE[m] * b / (a * a)     # t = lam * s
        ca = [c * lam ** i for i, c in enumerate(ca)]
        cb = [c * lam ** i for i, c in enumerate(cb)]
        parameter = "s"
    else:
        parameter = "t"
    label = label or E.label
    return FamilyData(
        m=m, a=Poly(ca), b=Poly(cb), seed_label=label, seed_ainvs=E.ainvs,
        parameter=parameter,
        source=f"universal level-{m} family (universal_families.json) seeded by "
               f"{label or list(E.ainvs)}",
    )


def family_j(fam):
    """J(s) = 6912 a^3 / (4 a^3 + 27 b^2) as a reduced (numerator, denominator)."""
    if fam.a.is_zero() and fam.b.is_zero():
        raise DegenerateFamily("degenerate family")
    num = fam.a ** 3 * 6912
    den = fam.discriminant_poly()
    if den.is_zero():
        raise DegenerateFamily("degenerate family")
    g = num.gcd(den) if not num.is_zero() else den.monic()
    if g.degree > 0:
        num, den = num // g, den // g
    # make the denominator monic so the pair is canonical
    lc = den.lc
    return num * (1 / lc), den * (1 / lc)


class IdenticallyEqual(ValueError):
    pass


def find_specializations(fam, target_j):
    """Rational s with J(s) = target_j and a smooth fibre."""
    target_j = Fraction(target_j)
    num, den = family_j(fam)
    diff = num - den * target_j
    if diff.is_zero():
        raise IdenticallyEqual("identically equal; every smooth specialization matches")
    disc = fam.discriminant_poly()
    return {s for s in rational_roots(diff) if disc(s) != 0}


@dataclass
class FamilyMatch:
    found: bool
    s: Fraction = None
    symplectic: bool = None
    family_seed: str = None
    twist: int = None           # set when the match came from the twisted seed
    candidates: tuple = ()

    def to_json(self):
        return {
            "found": self.found,
            "s": str(self.s) if self.s is not None else None,
            "symplectic": self.symplectic,
            "family_seed": self.family_seed,
            "twist": str(self.twist) if self.twist is not None else None,
            "candidates": [str(c) for c in self.candidates],
        }


def a1_test_member(fam, E2):
    """Look for s with E_s isomorphic to E2 over Q."""
    roots = sorted(find_specializations(fam, E2.j))
    for s in roots:
        try:
            Es = fam.member(s)
        except SingularCurveError:
            continue
        ok, _ = is_isomorphic_q(Es, E2)
        if ok:
            return FamilyMatch(True, s, True, fam.seed_label, None, tuple(roots))
    return FamilyMatch(False, None, None, fam.seed_label, None, tuple(roots))


def a1_search(E1, E2, m, family=None):
    """Search the level-m family of E1 for E2.  For m = 4 the family of the discriminant twist of E1 is
    tried as well; a match there is an isomorphism that is not symplectic."""
    fam = family or build_family(E1, m)
    match = a1_test_member(fam, E2)
    if match.found or m != 4:
        return match
    d = squarefree_part(E1.discriminant)
    if d == 1:
        return match
    twisted = quadratic_twist(E1, d)
    fam_t = build_family(twisted, 4, label=f"{E1.name()}^({d})")
    match_t = a1_test_member(fam_t, E2)
    if match_t.found:
        match_t.symplectic = False
        match_t.twist = d
        return match_t
    match.candidates = match.candidates + match_t.candidates
    return match


def bundled_family(name):
    """Load data/families/<name>.json."""
    return load_family(data_path("families", f"{name}.json"))
