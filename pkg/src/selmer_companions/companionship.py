"""Checker for the four hypotheses of the companion criterion over Q.

For curves E1, E2 and a prime power p^k:

  (i)   E1[m] = E2[m] as Galois modules, for m chosen by :func:`select_m`;
  (ii)  both curves have the same potentially multiplicative primes;
  (iii) at those primes the isomorphism respects the canonical subgroups,
        certified here through the sufficient condition on ord_l(j);
  (iv)  either p is potentially multiplicative, or k = 1 and both curves
        have good reduction at an odd p.

A report is ``proven`` when all four hold, ``refuted`` when a necessary
condition for (i) or (ii) fails, and ``inconclusive`` otherwise.
"""

import json
from dataclasses import dataclass, field

from .algebra import primes_up_to, valuation
from .curves_finite import trace_small
from .curves_rational import pot_mult_primes, reduction_type, bad_primes
from .isofinder import explicit, families

PROVEN, REFUTED, INCONCLUSIVE = "proven", "refuted", "inconclusive"
EXIT_CODES = {PROVEN: 0, REFUTED: 2, INCONCLUSIVE: 3}
DEFAULT_TRACE_BOUND = 1000
EXCEPTIONAL_KODAIRA = {"II", "IV", "II*", "IV*"}


def select_m(E1, E2, p, k):
    """(m, reason).  p^k for p > 3, p^{k+1} for p = 2; for p = 3 the level
    stays 3^k unless some bad prime of either curve has Kodaira type II, IV,
    II* or IV*."""
    p, k = int(p), int(k)
    if p > 3:
        return p ** k, "p > 3"
    if p == 2:
        return 2 ** (k + 1), "p = 2"
    hits = []
    for E in (E1, E2):
        for ell in bad_primes(E):
            sym = reduction_type(E, ell).kodaira
            if sym in EXCEPTIONAL_KODAIRA:
                hits.append(f"{E.name()} has type {sym} at {ell}")
    if hits:
        return 3 ** (k + 1), "p = 3; " + "; ".join(hits)
    return 3 ** k, "p = 3 and no Kodaira type II, IV, II*, IV* at any bad prime"


def check_hyp_ii(E1, E2):
    """(S1 == S2, S1, S2) with S_i the primes in the denominator of j(E_i)."""
    S1, S2 = pot_mult_primes(E1), pot_mult_primes(E2)
    return S1 == S2, S1, S2


def check_hyp_iii(E1, E2, p, m):
    """Per-prime check of the ord_l(j) condition at each l in S1."""
    rows = []
    status = PROVEN
    for ell in sorted(pot_mult_primes(E1)):
        v = valuation(E1.j, ell)
        r1, r2 = reduction_type(E1, ell), reduction_type(E2, ell)
        both_mult = r1.is_multiplicative() and r2.is_multiplicative()
        ok = v % p != 0 and (p != 2 or both_mult)
        rows.append({
            "prime": str(ell),
            "ord_j_E1": str(v),
            "p_divides_ord": v % p == 0,
            "both_multiplicative": both_mult,
            "status": PROVEN if ok else INCONCLUSIVE,
        })
        if not ok:
            status = INCONCLUSIVE
    return {"status": status, "ledger": rows}


def check_hyp_iv(E1, E2, p, k, S=None):
    S = pot_mult_primes(E1) if S is None else set(S)
    if p in S:
        return {"status": PROVEN, "route": "p is potentially multiplicative",
                "prime": str(p)}
    good = reduction_type(E1, p).is_good() and reduction_type(E2, p).is_good()
    if k == 1 and good and p > 2:
        return {"status": PROVEN, "route": "k = 1, good reduction at p, p > 2",
                "prime": str(p)}
    return {
        "status": INCONCLUSIVE,
        "route": None,
        "prime": str(p),
        "note": "hypothesis (iv) fails at p; the group-scheme alternative is not implemented",
    }


def trace_scan(E1, E2, m, bound=DEFAULT_TRACE_BOUND):
    """Compare a_q mod m at good primes q <= bound with q not dividing m.

    Returns (rows, verdict, first_mismatch)."""
    rows = []
    mismatch = None
    for q in primes_up_to(bound):
        if m % q == 0 or E1.discriminant % q == 0 or E2.discriminant % q == 0:
            continue
        t1, t2 = trace_small(E1, q) % m, trace_small(E2, q) % m
        rows.append((q, t1, t2))
        if t1 != t2:
            mismatch = (q, t1, t2)
            break
    return rows, ("refutes hyp (i)" if mismatch else "consistent"), mismatch


@dataclass
class CompanionReport:
    curves: list
    p: int
    k: int
    m: int
    m_reason: str
    S1: list
    S2: list
    hyp_i: dict
    hyp_ii: dict
    hyp_iii: dict
    hyp_iv: dict
    trace_scan: dict
    certificate: dict = None
    verdict: str = INCONCLUSIVE
    errors: list = field(default_factory=list)

    def to_json(self):
        return {
            "curves": self.curves,
            "p": str(self.p),
            "k": str(self.k),
            "m": str(self.m),
            "m_reason": self.m_reason,
            "S1": [str(s) for s in self.S1],
            "S2": [str(s) for s in self.S2],
            "hypotheses": {"i": self.hyp_i, "ii": self.hyp_ii,
                           "iii": self.hyp_iii, "iv": self.hyp_iv},
            "trace_scan": self.trace_scan,
            "certificate": self.certificate,
            "verdict": self.verdict,
            "errors": self.errors,
        }

    @classmethod
    def from_json(cls, raw):
        h = raw["hypotheses"]
        return cls(
            curves=raw["curves"], p=int(raw["p"]), k=int(raw["k"]), m=int(raw["m"]),
            m_reason=raw["m_reason"],
            S1=[int(s) for s in raw["S1"]], S2=[int(s) for s in raw["S2"]],
            hyp_i=h["i"], hyp_ii=h["ii"], hyp_iii=h["iii"], hyp_iv=h["iv"],
            trace_scan=raw["trace_scan"], certificate=raw["certificate"],
            verdict=raw["verdict"], errors=raw["errors"],
        )

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @property
    def exit_code(self):
        return EXIT_CODES[self.verdict]


def _scan_json(rows, verdict, mismatch, bound):
    return {
        "bound": str(bound),
        "verdict": verdict,
        "rows": [[str(q), str(a), str(b)] for q, a, b in rows],
        "mismatch": [str(v) for v in mismatch] if mismatch else None,
    }


def prove_isomorphism(E1, E2, m, method="auto", phi=None, ell=None, seed=0,
                      split_bound=200000, twist_bound=20000, family=None):
    """Hypothesis (i) by the family route or the explicit-phi route.  Returns (status dict, certificate JSON or None)."""
    factors = [q for q in primes_up_to(m) if m % q == 0]
    p = factors[0]
    n = 0
    mm = m
    while mm % p == 0:
        mm //= p
        n += 1
    use_a1 = method == "a1" or (method == "auto" and m in (3, 4, 5) and phi is None)
    if use_a1:
        match = families.a1_search(E1, E2, m, family=family)
        if match.found:
            kind = "symplectic" if match.symplectic else "not symplectic"
            return ({"status": PROVEN, "route": "universal family", "kind": kind,
                     **match.to_json()}, None)
        if method == "a1":
            return ({"status": INCONCLUSIVE, "route": "universal family",
                     "note": "no symplectic isomorphism found in the family",
                     **match.to_json()}, None)
    cert = explicit.run_a2(E1, E2, p, n, ell=ell, bound=split_bound, phi=phi,
                           seed=seed, twist_bound=twist_bound)
    if cert is None:
        return ({"status": INCONCLUSIVE, "route": "explicit phi",
                 "note": "no candidate phi survived the divisibility check"}, None)
    data = cert.to_json()
    if cert.valid:
        return {"status": PROVEN, "route": "explicit phi"}, data
    note = cert.twist_failure or "certificate checks failed"
    return {"status": INCONCLUSIVE, "route": "explicit phi", "note": note}, data


def check_pair(E1, E2, p, k, trace_bound=DEFAULT_TRACE_BOUND, method="auto",
               phi=None, ell=None, seed=0, split_bound=200000, twist_bound=20000,
               family=None):
    """Run the whole pipeline and return a CompanionReport.  Errors inside
    sub-checks are recorded in the report, never raised."""
    p, k = int(p), int(k)
    errors = []
    m, reason = select_m(E1, E2, p, k)
    rows, verdict_scan, mismatch = trace_scan(E1, E2, m, trace_bound)
    scan = _scan_json(rows, verdict_scan, mismatch, trace_bound)
    ii, S1, S2 = check_hyp_ii(E1, E2)
    hyp_ii = {"status": PROVEN if ii else REFUTED, "equal": ii}
    hyp_iii = check_hyp_iii(E1, E2, p, m) if ii else {
        "status": INCONCLUSIVE, "ledger": [], "note": "skipped: S1 != S2"}
    hyp_iv = check_hyp_iv(E1, E2, p, k, S1)
    cert = None
    if mismatch:
        hyp_i = {"status": REFUTED, "route": "trace scan",
                 "witness": [str(v) for v in mismatch]}
    else:
        try:
            hyp_i, cert = prove_isomorphism(
                E1, E2, m, method=method, phi=phi, ell=ell, seed=seed,
                split_bound=split_bound, twist_bound=twist_bound, family=family)
        except Exception as exc:       # recorded, not propagated
            errors.append(f"hypothesis (i): {type(exc).__name__}: {exc}")
            hyp_i = {"status": INCONCLUSIVE, "route": None, "note": "error"}
    statuses = [hyp_i["status"], hyp_ii["status"], hyp_iii["status"], hyp_iv["status"]]
    if hyp_i["status"] == REFUTED or hyp_ii["status"] == REFUTED:
        verdict = REFUTED
    elif all(s == PROVEN for s in statuses):
        verdict = PROVEN
    else:
        verdict = INCONCLUSIVE
    return CompanionReport(
        curves=[E1.to_json(), E2.to_json()], p=p, k=k, m=m, m_reason=reason,
        S1=sorted(S1), S2=sorted(S2), hyp_i=hyp_i, hyp_ii=hyp_ii,
        hyp_iii=hyp_iii, hyp_iv=hyp_iv, trace_scan=scan, certificate=cert,
        verdict=verdict, errors=errors,
    )
