import json
from fractions import Fraction

import pytest

from selmer_companions.algebra import Poly, kronecker_symbol
from selmer_companions.curves_finite import (
    TorsionBasis, count_points, reduce_curve, validate_basis,
)
from selmer_companions.curves_rational import curve, quadratic_twist
from selmer_companions.isofinder.explicit import (
    NoSplitPrime, certify_iso, character_basis, check_witness, compute_phi,
    divides_after_composition, eliminate_twist, find_split_prime, load_phi_file,
    precision_schedule, run_a2, search_phi,
)
from selmer_companions.torsion import exact_order_poly

ELL = 19681
X = Poly.x()


@pytest.fixture(scope="module")
def pair():
    return curve("1242L1"), curve("1242K1")


@pytest.fixture(scope="module")
def reference_data(pair):
    E1, E2 = pair
    C1, C2 = reduce_curve(E1, ELL), reduce_curve(E2, ELL)
    basis = TorsionBasis(ELL, 2, 3, C1.from_model((731, 4673)), C1.from_model((3074, 1044)))
    images = (C2.from_model((10530, 9277)), C2.from_model((17962, 16270)))
    return basis, images


@pytest.fixture(scope="module")
def phi(pair, reference_data):
    E1, E2 = pair
    basis, images = reference_data
    for B in precision_schedule(ELL):
        found = compute_phi(E1, E2, 2, 3, ELL, basis, images, B)
        if found is not None:
            return found
    pytest.fail("no phi reconstructed")


def test_split_prime_pinned(pair):
    ell, B1, B2 = find_split_prime(*pair, 2, 3, bound=20000, pin=ELL)
    assert ell == ELL
    for E in pair:
        assert count_points(reduce_curve(E, ell)) % 64 == 0


def test_split_prime_search(pair):
    ell, _, _ = find_split_prime(*pair, 2, 3, bound=20000)
    assert ell == ELL


def test_split_prime_same_curve_level_two():
    E = curve("676B1")
    ell, B1, B2 = find_split_prime(E, E, 2, 1, bound=500)
    assert (ell - 1) % 2 == 0
    assert count_points(reduce_curve(E, ell)) % 4 == 0


def test_no_split_prime(pair):
    with pytest.raises(NoSplitPrime, match="no split prime found"):
        find_split_prime(*pair, 2, 3, bound=5000)


def test_phi_values(phi):
    assert phi.degree < 24
    assert phi.eval_mod(731, ELL) == 10530
    assert phi.eval_mod(3074, ELL) == 17962


def test_phi_divisibility(pair, phi):
    E1, E2 = pair
    f1 = exact_order_poly(E1, 2, 3).f
    f2 = exact_order_poly(E2, 2, 3).f
    assert divides_after_composition(f1, f2, phi)
    # the same statement through plain long division of f2(phi) by f1
    assert (f2.compose(phi) % f1).is_zero()


def test_certificate_checks(pair, reference_data, phi):
    basis, images = reference_data
    cert = certify_iso(*pair, 2, 3, phi, ELL, basis, images)
    assert cert.divisibility and cert.center_square and cert.bijective


def test_center_square_by_enumeration(pair, reference_data, phi):
    # 48 exact-order points, checked one by one without the library helper
    E1, E2 = pair
    basis, (Q1, Q2) = reference_data
    C1, C2 = reduce_curve(E1, ELL), reduce_curve(E2, ELL)
    count = 0
    for a in range(8):
        for b in range(8):
            if a % 2 == 0 and b % 2 == 0:
                continue
            R1 = C1.add(C1.mul(a, basis.P1), C1.mul(b, basis.P2))
            R2 = C2.add(C2.mul(a, Q1), C2.mul(b, Q2))
            assert phi.eval_mod(C1.x_to_model(R1[0]), ELL) == C2.x_to_model(R2[0])
            count += 1
    assert count == 48


def test_divisibility_at_second_split_prime(pair, phi):
    E1, E2 = pair
    ell = 29537
    find_split_prime(E1, E2, 2, 3, pin=ell)
    f1 = exact_order_poly(E1, 2, 3).f.mod(ell)
    f2 = exact_order_poly(E2, 2, 3).f.mod(ell)
    ph = phi.mod(ell)
    roots1 = [x for x in range(ell) if f1(x) == 0]
    assert len(roots1) == 24
    assert all(f2(ph(r)) == 0 for r in roots1)


def test_perturbed_phi_fails(pair, reference_data, phi):
    basis, images = reference_data
    cert = certify_iso(*pair, 2, 3, phi + 1, ELL, basis, images)
    assert not cert.divisibility
    assert not cert.center_square


@pytest.mark.parametrize("swap", ["swap", "negate_one", "shear"])
def test_wrong_images_fail_reconstruction(pair, reference_data, swap):
    E1, E2 = pair
    basis, (Q1, Q2) = reference_data
    C2 = reduce_curve(E2, ELL)
    images = {"swap": (Q2, Q1), "negate_one": (C2.neg(Q1), Q2),
              "shear": (C2.add(Q1, Q2), Q2)}[swap]
    assert validate_basis(C2, *images, 2, 3)
    for B in precision_schedule(ELL):
        assert compute_phi(E1, E2, 2, 3, ELL, basis, images, B) is None


def test_search_recovers_phi(pair, phi):
    found = search_phi(*pair, 2, 3, ELL)
    assert found is not None
    phi2, images, _ = found
    # the search may pick (-Q1, -Q2); x-coordinates, hence phi, are unchanged
    assert phi2 == phi


def test_identity_phi():
    E = curve("676B1")
    ell, B1, _ = find_split_prime(E, E, 5, 1, bound=5000)
    basis = B1
    phi = compute_phi(E, E, 5, 1, ell, basis, (basis.P1, basis.P2), 10)
    assert phi == X
    cert = certify_iso(E, E, 5, 1, X, ell, basis, (basis.P1, basis.P2))
    assert cert.checks_pass
    found = search_phi(E, E, 5, 1, ell, basis1=basis, basis2=basis)
    assert found[0] == X


def test_twist_elimination_table(pair):
    basis = character_basis(*pair, 2, 3)
    assert basis == [-1, 2, -3, -23]
    witnesses, failure = eliminate_twist(*pair, 2, 3)
    assert failure is None
    table = [(w.q, w.signs, w.trace1, w.trace2) for w in witnesses]
    assert table == [
        (31, (-1, 1, 1, 1), 2, 2),
        (349, (1, -1, 1, 1), 2, 2),
        (233, (1, 1, -1, 1), 2, 2),
        (241, (1, 1, 1, -1), 6, 6),
    ]
    for w in witnesses:
        assert check_witness(*pair, 8, basis, w)


def test_witnesses_recompute_independently(pair):
    E1, E2 = pair
    basis = [-1, 2, -3, -23]
    for q, t in [(31, 2), (349, 2), (233, 2), (241, 6)]:
        signs = [kronecker_symbol(d, q) for d in basis]
        assert signs.count(-1) == 1
        C1, C2 = reduce_curve(E1, q), reduce_curve(E2, q)
        assert (q + 1 - count_points(C1)) % 8 == (q + 1 - count_points(C2)) % 8 == t
        assert (2 * t) % 8 != 0


@pytest.mark.parametrize("d", [-1, 5, 13])
def test_twisted_companion_is_caught(d):
    E1 = curve("676B1")
    E2 = quadratic_twist(curve("676E1"), d)
    cert = run_a2(E1, E2, 5, 1)
    assert cert is not None and cert.checks_pass
    assert cert.character_basis == [-1, 2, 5, 13]
    assert not cert.valid
    assert cert.twist_failure == f"no witness for chi_{d} below 20000"
    assert sorted(w.character for w in cert.twist_elimination) == sorted(
        c for c in cert.character_basis if c != d)


def test_run_with_phi_file(tmp_path, pair, phi):
    path = tmp_path / "phi.json"
    path.write_text(json.dumps(phi.to_strings()))
    loaded = load_phi_file(str(path))
    assert loaded == phi
    cert = run_a2(*pair, 2, 3, ell=ELL, phi=loaded)
    assert cert.valid
    data = cert.to_json()
    assert data["valid"] is True
    assert [Fraction(c) for c in data["phi"]] == list(phi)


def test_run_with_wrong_phi_file(pair):
    cert = run_a2(*pair, 2, 3, ell=ELL, phi=X)
    assert not cert.valid and not cert.divisibility


def test_certificate_json_encodes_numbers_as_strings(pair, phi):
    cert = run_a2(*pair, 2, 3, ell=ELL, phi=phi)

    def walk(x):
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            assert x is None or isinstance(x, (str, bool))

    walk(cert.to_json())
