from fractions import Fraction

import pytest

from prpoint.archlfun import gross_zagier_constant
from prpoint.crystalline import (
    BadPrime,
    eigen_data,
    kedlaya_frobenius,
    pair,
    pairing_matrix,
)
from prpoint.elliptic import CurveData, ap, point
from prpoint.padic import PadicElement

E11 = CurveData(0, -1, 1, -10, -20, conductor=11)
E37 = CurveData(0, 0, 1, -1, 0, conductor=37)
E43 = CurveData(0, 1, 1, 0, 0, conductor=43)
E53 = CurveData(1, -1, 1, 0, 0, conductor=53)

CURVES = (E11, E37, E43, E53)


def test_trace_and_det_across_curves():
    # acceptance criterion shape: p in {5,7,11,13}, m >= 6, >= 4 curves
    m = 6
    for E in CURVES:
        for p in (5, 7, 11, 13):
            if E.conductor % p == 0:
                continue
            F = kedlaya_frobenius(E, p, m)
            a = ap(E, p)
            assert (F.trace() - a).is_zero(), (E.label(), p)
            assert (F.det() - p).is_zero(), (E.label(), p)


def test_pairing_compatibility():
    # [F x, F y] = p [x, y] via bilinear expansion over the basis
    for E, p in ((E53, 5), (E43, 7), (E11, 13)):
        F = kedlaya_frobenius(E, p, 6)
        lhs = F.entry(0, 0) * F.entry(1, 1) - F.entry(1, 0) * F.entry(0, 1)
        assert (lhs - p).is_zero()


def test_pairing_matrix_shape():
    F = kedlaya_frobenius(E53, 5, 4)
    M = pairing_matrix(F)
    assert M[0][0] == 0 and M[1][1] == 0
    assert M[0][1] == 1 and M[1][0] == -1
    # bilinearity on a random combination
    x = (Fraction(2), Fraction(3))
    y = (Fraction(-1), Fraction(5))
    assert pair(x, y) == 2 * 5 - 3 * (-1)


def test_truncation_stability():
    # doubling the internal series truncation leaves the first m digits alone
    for E, p in ((E53, 5), (E43, 7)):
        m = 8
        F1 = kedlaya_frobenius(E, p, m)
        F2 = kedlaya_frobenius(E, p, m, truncation=2 * F1.truncation)
        for i in (0, 1):
            for j in (0, 1):
                assert (F1.entry(i, j) - F2.entry(i, j)).is_zero()


def test_bad_prime_rejected():
    with pytest.raises(BadPrime):
        kedlaya_frobenius(E11, 11, 6)
    with pytest.raises(BadPrime):
        kedlaya_frobenius(E11, 3, 6)


def _eigen_fixture(E, p, m=8):
    C = gross_zagier_constant(E, point(E, 0, 0))
    F = kedlaya_frobenius(E, p, m)
    return F, eigen_data(F, C)


def test_eigen_decomposition_53a():
    p = 5
    F, ed = _eigen_fixture(E53, p)
    # eigencomponent sum reconstructs the Neron class u * omega
    O0 = ed.omega_alpha[0] + ed.omega_beta[0]
    O1 = ed.omega_alpha[1] + ed.omega_beta[1]
    assert (O0 - F.u).is_zero()
    assert O1.is_zero()
    # phi = F/p acts by alpha^-1 on omega_alpha
    Fx = [F.entry(i, 0).to_extension() for i in (0, 1)]
    Fy = [F.entry(i, 1).to_extension() for i in (0, 1)]
    applied = (Fx[0] * ed.omega_alpha[0] + Fy[0] * ed.omega_alpha[1],
               Fx[1] * ed.omega_alpha[0] + Fy[1] * ed.omega_alpha[1])
    inv_alpha = ed.alpha.inverse()
    for got, want in zip(applied, ed.omega_alpha):
        assert (got * Fraction(1, p) - inv_alpha * want).is_zero()


def test_conjugation_swaps_eigencomponents():
    _, ed = _eigen_fixture(E43, 7)
    for a, b in zip(ed.omega_alpha, ed.omega_beta):
        assert (a.galois_conjugate() - b).is_zero()


def test_pairing_value_pi_odd_and_antisymmetric():
    F, ed = _eigen_fixture(E53, 5)
    v = ed.pairing_value
    # [omega_beta, omega_alpha] = -[omega_alpha, omega_beta]
    from prpoint.crystalline import pair as _pair
    assert (_pair(ed.omega_alpha, ed.omega_beta) + v).is_zero()
    # conjugation swaps the eigencomponents, so the even part vanishes
    assert (v.galois_conjugate() + v).is_zero()
    assert v.component(0).is_zero()
    # closed form: [omega_beta, omega_alpha] = -u^2 F10 / (2 pi)
    p = F.p
    pi = PadicElement.pi(p, 2 * F.precision)
    closed = -F.u ** 2 * F.entry(1, 0).to_extension() / (2 * pi)
    assert (closed - v).is_zero()


def test_dual_class_normalization():
    F, ed = _eigen_fixture(E53, 5)
    # [omega_cris, omega*] = 1 with omega_cris = u e1, omega* in eta direction
    assert pair((F.u, Fraction(0)), ed.omega_star) == 1
    # representative shift by Fil^0 (the omega_cris line) leaves the pairing
    shifted = (ed.omega_star[0] + 7 * F.u, ed.omega_star[1])
    assert pair((F.u, Fraction(0)), shifted) == 1


def test_delta_pi_odd():
    _, ed = _eigen_fixture(E53, 5)
    assert (ed.delta_E.galois_conjugate() + ed.delta_E).is_zero()
    assert not ed.delta_E.is_zero()


def test_frobenius_json():
    F = kedlaya_frobenius(E53, 5, 5)
    obj = F.to_json()
    assert obj["p"] == 5
    back = PadicElement.from_json(obj["matrix"][0][0])
    assert (back - F.entry(0, 0)).is_zero()
