import math
import random
from fractions import Fraction
from itertools import permutations, product

import pytest

from oracles import (all_systems, poly_eval, poly_exp, poly_log1p, random_system, truncate,
                     z_by_sets, z_polynomial)
from polymergas.errors import EnumerationCapError, PolymerGasError, PositivityError
from polymergas.mayer import (abs_theta, mayer_log_z, mayer_partial_sums, mayer_polynomial,
                              telescope_correlation, telescope_log_z, theta_exact, theta_series,
                              ursell, ursell_by_subgraphs)
from polymergas.model import make_family
from polymergas.partition import correlation

F = Fraction
SINGLE = make_family("edgeless", 1)
P3 = make_family("path", 3)


def test_ursell_examples():
    edgeless = make_family("edgeless", 2)
    k2 = make_family("complete", 2)
    assert ursell(edgeless, [0]) == 1
    assert ursell(edgeless, [1, 1]) == -1
    assert ursell(edgeless, [0, 1]) == 0
    assert ursell(k2, [0, 1]) == -1


def test_ursell_repeated_polymer_closed_form():
    for n in range(1, 7):
        assert ursell(SINGLE, [0] * n) == (-1) ** (n - 1) * math.factorial(n - 1)


def test_ursell_cap():
    with pytest.raises(EnumerationCapError):
        ursell(SINGLE, [0] * 8)
    assert ursell(SINGLE, [0] * 8, cap=8) == -5040
    with pytest.raises(PolymerGasError):
        ursell(SINGLE, [])


def test_ursell_matches_subgraph_enumeration():
    for system in all_systems(3):
        for n in range(1, 6):
            for t in product(range(3), repeat=n):
                assert ursell(system, t) == ursell_by_subgraphs(system, t)


def test_ursell_permutation_symmetry():
    system = make_family("path", 4)
    for n in range(1, 5):
        for t in product(range(4), repeat=n):
            values = {ursell(system, p) for p in permutations(t)}
            assert len(values) == 1


def test_ursell_zero_on_disconnected_tuple():
    system = make_family("path", 4)
    assert ursell(system, [0, 2]) == 0
    assert ursell(system, [0, 0, 3]) == 0
    assert ursell(system, [0, 1, 2]) == ursell_by_subgraphs(system, [0, 1, 2]) == 1


@pytest.mark.parametrize("system", [make_family("path", 3), make_family("complete", 3),
                                    make_family("cycle", 4), make_family("edgeless", 2)])
def test_mayer_polynomial_matches_log_z(system):
    k, degree = system.n, 4
    z = z_polynomial(system, range(k))
    u = {e: c for e, c in z.items() if any(e)}
    assert mayer_polynomial(system, None, degree) == poly_log1p(u, k, degree)
    assert truncate(poly_exp(mayer_polynomial(system, None, degree), k, degree), degree) == truncate(z, degree)


def test_mayer_log_z_examples():
    sums = mayer_partial_sums(SINGLE, None, [F(1, 5)], 3)
    assert sums[-1] == F(1, 5) - F(1, 50) + F(1, 375)
    assert mayer_log_z(P3, [], [1, 1, 1], 3) == 0.0
    k2 = make_family("complete", 2)
    z = z_polynomial(k2, range(2))
    oracle = poly_log1p({e: c for e, c in z.items() if any(e)}, 2, 2)
    expected = poly_eval(oracle, [F(1, 10), F(1, 10)])
    assert expected == F(9, 50)
    assert mayer_log_z(k2, None, [F(1, 10)] * 2, 2) == float(expected)


def test_mayer_guards():
    with pytest.raises(EnumerationCapError):
        mayer_log_z(SINGLE, None, [F(1, 5)], 7)
    with pytest.raises(EnumerationCapError):
        mayer_log_z(make_family("edgeless", 9), None, [F(1, 5)] * 9, 2)
    with pytest.raises(PolymerGasError):
        mayer_log_z(SINGLE, None, [F(1, 5)], 0)


def test_mayer_series_converges_single_polymer():
    sums = mayer_partial_sums(SINGLE, None, [F(1, 5)], 20, order_cap=20)
    assert abs(float(sums[-1]) - math.log(F(6, 5))) < 1e-9


def test_theta_examples():
    assert theta_exact(SINGLE, None, 0, [F(1, 2)]) == pytest.approx(math.log(1.5), rel=1e-15)
    assert theta_exact(P3, None, 1, [0, 0, 0]) == 0
    # Z_P3 = 5 and Z over the edgeless pair {0, 2} is 4
    assert z_by_sets(P3, [0, 2], [1, 1, 1]) == 4
    assert theta_exact(P3, None, 1, [1, 1, 1]) == pytest.approx(math.log(5 / 4), rel=1e-15)


def test_theta_errors():
    with pytest.raises(PositivityError):
        theta_exact(SINGLE, None, 0, [-1])
    with pytest.raises(PolymerGasError):
        theta_exact(P3, [0, 1], 2, [1, 1, 1])


def test_abs_theta_examples():
    assert abs_theta(SINGLE, None, 0, [F(1, 2)]) == pytest.approx(math.log(2), abs=1e-15)
    assert abs_theta(P3, None, 1, [0, 0, 0]) == 0
    with pytest.raises(PositivityError):
        abs_theta(SINGLE, None, 0, [1])
    with pytest.raises(PolymerGasError):
        abs_theta(SINGLE, None, 0, [F(-1, 2)])


def test_abs_theta_is_negated_theta_at_minus_p():
    rng = random.Random(5)
    for _ in range(30):
        system = random_system(rng, rng.randint(1, 6))
        p = [F(rng.randint(0, 3), 40) for _ in range(system.n)]
        x = rng.randrange(system.n)
        a = abs_theta(system, None, x, p)
        b = -theta_exact(system, None, x, [-v for v in p])
        assert a == pytest.approx(b, rel=1e-12, abs=1e-15)


def test_theta_series_converges_to_exact():
    system = make_family("path", 3)
    w = [F(1, 20)] * 3
    sums = theta_series(system, None, 1, w, 6)
    gaps = [abs(float(v) - theta_exact(system, None, 1, w)) for v in sums]
    assert gaps[-1] < 1e-6
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_positive_series_partial_sums_nondecreasing():
    system = make_family("cycle", 4)
    p = [F(1, 30)] * 4
    neg = [-v for v in p]
    positive = [-s for s in mayer_partial_sums(system, None, neg, 6)]
    assert all(b >= a for a, b in zip(positive, positive[1:]))
    q = z_by_sets(system, range(4), neg)
    assert all(s <= -math.log(q) + 1e-15 for s in map(float, positive))
    assert float(positive[-1]) == pytest.approx(-math.log(q), abs=1e-6)
    x_series = [-s for s in theta_series(system, None, 0, neg, 6)]
    assert all(b >= a for a, b in zip(x_series, x_series[1:]))


def test_telescope_log_z_examples():
    assert telescope_log_z(SINGLE, None, [F(1, 2)], [0]) == pytest.approx(math.log(1.5), rel=1e-15)
    assert telescope_log_z(P3, [], [1, 1, 1], []) == 0
    for order in permutations(range(3)):
        assert telescope_log_z(P3, None, [1, 1, 1], order) == pytest.approx(math.log(5), rel=1e-12)
    with pytest.raises(PolymerGasError):
        telescope_log_z(P3, None, [1, 1, 1], [0, 1])


def test_telescope_correlation_examples():
    assert telescope_correlation(P3, None, [], [1, 1, 1]) == 1
    assert telescope_correlation(SINGLE, None, [0], [F(1, 2)]) == pytest.approx(1 / 3, rel=1e-12)
    expected = float(correlation(P3, None, [0, 2], [1, 1, 1]))
    assert telescope_correlation(P3, None, [0, 2], [1, 1, 1]) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(PolymerGasError):
        telescope_correlation(P3, None, [0, 1], [1, 1, 1])


def test_alternating_sign_small():
    for system in all_systems(3):
        for n in range(1, 6):
            for t in product(range(3), repeat=n):
                assert (-1) ** (n - 1) * ursell(system, t) >= 0
