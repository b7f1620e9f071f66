"""Acceptance suite: one test per criterion, each printing a PASS line with
the measured quantities (run with -s to see them).

Desk scale: conductors <= 200, p <= 50, depth <= 6.  The conductor-37 curve
runs at its smallest supersingular prime p = 17 and needs the compiled
kernel; it is skipped on the pure-Python fallback.
"""

from fractions import Fraction

import pytest

from prpoint._kernels import backend_name
from prpoint.archlfun import gross_zagier_constant
from prpoint.elliptic import (
    CurveData,
    ap,
    formal_exp,
    formal_log,
    group_law,
    negate,
    padic_log_point,
    point,
    scalar_mul,
    smallest_supersingular,
)
from prpoint.crystalline import kedlaya_frobenius
from prpoint.modsym import eigen_plus_symbol
from prpoint.padic import PadicElement
from prpoint.padiclfun import (
    mazur_tate,
    nu_lift,
    order_of_vanishing,
    project,
)
from prpoint.recover import recover

E11 = CurveData(0, -1, 1, -10, -20, conductor=11)
E37 = CurveData(0, 0, 1, -1, 0, conductor=37)
E43 = CurveData(0, 1, 1, 0, 0, conductor=43)
E53 = CurveData(1, -1, 1, 0, 0, conductor=53)
E65 = CurveData(1, 0, 0, -1, 0, conductor=65)
E197 = CurveData(0, 0, 1, -5, 4, conductor=197)   # positive discriminant
E58 = CurveData(1, -1, 0, -1, 1, conductor=58)    # composite level, C(E) = 2

DEPTH = 5

_runs = {}


def recovery_fixtures():
    """Rank-1 fixtures at their smallest supersingular prime, depth 5.

    37a (p = 17) and 58a (p = 23) need the compiled kernel to stay inside the
    runtime budget; they are skipped on the pure-Python fallback.
    """
    if not _runs:
        for E, gen in ((E43, (0, 0)), (E53, (0, 0)), (E197, (1, 0))):
            p = smallest_supersingular(E)
            _runs[E.label()] = recover(E, point(E, *gen), p, DEPTH)
        if backend_name() == "cython":
            for E, gen in ((E37, (0, 0)), (E58, (0, 1))):
                p = smallest_supersingular(E)
                _runs[E.label()] = recover(E, point(E, *gen), p, DEPTH)
    return _runs


def test_criterion_1_end_to_end_recovery():
    runs = recovery_fixtures()
    assert len(runs) >= 2
    for label, res in runs.items():
        r = res.report
        assert r.depth == DEPTH
        assert r.lam is not None, label
        assert abs(r.lam.numerator) < 1000 and r.lam.denominator < 1000, label
        assert r.lam_residual_valuation >= DEPTH - 1, (label, r.lam_residual_valuation)
        assert r.lam != 0   # infinite order: the recovered multiple is nonzero
        # frozen regression fixtures: (curve, p, lambda)
        assert abs(r.lam) == Fraction(1, 2), label
        print(f"[criterion 1] PASS {label} @ p={r.p}: lambda = {r.lam}, "
              f"exact check to >= {r.lam_residual_valuation} pi-units "
              f"(threshold {DEPTH - 1})")


def test_criterion_2_euler_factor_identity():
    for p in (5, 7, 11, 13):
        alpha = PadicElement.pi(p, 24)
        beta = -alpha
        one = PadicElement.one(p, 24, e=2)
        lhs = (one - alpha.inverse()) * (one - beta.inverse())
        assert lhs == Fraction(p + 1, p)
        # exact equality: difference indistinguishable at full precision
        assert (lhs - Fraction(p + 1, p)).is_zero()
    print("[criterion 2] PASS (1-1/alpha)(1-1/beta) = 1 + 1/p for p in {5,7,11,13}")


def test_criterion_3_interpolation():
    from prpoint.padiclfun import padic_l_series
    phi = eigen_plus_symbol(E11)
    p = smallest_supersingular(E11)
    assert p == 19
    phi0 = phi.eval(0)
    vals = {}
    for label in ("alpha", "beta"):
        series = padic_l_series(phi, p, depth=2, root_label=label, prec=8)
        lhs = series.value_at_zero()
        one = PadicElement.one(p, lhs.prec, e=2)
        rhs = (one - series.root.inverse()) ** 2 * phi0
        assert (lhs - rhs).is_zero(), label
        vals[label] = lhs
    assert (vals["alpha"].galois_conjugate() - vals["beta"]).is_zero()
    print(f"[criterion 3] PASS 11a @ p=19: L_p(0) = (1-1/root)^2 * {phi0} "
          "for both roots; values Galois conjugate")


def test_criterion_4_vanishing_order():
    for label, res in recovery_fixtures().items():
        for series in (res.series_alpha, res.series_beta):
            assert series.value_at_zero().is_zero(), label
        orders = (order_of_vanishing(res.series_alpha),
                  order_of_vanishing(res.series_beta))
        assert any(o.order == 1 and o.exact for o in orders), label
        print(f"[criterion 4] PASS {label}: both series vanish at T=0, "
              f"orders {[str(o) for o in orders]}")


def test_criterion_5_kedlaya():
    m = 6
    count = 0
    curves = (E11, E37, E43, E53, E65)
    for E in curves:
        for p in (5, 7, 11, 13):
            if E.conductor % p == 0:
                continue
            F = kedlaya_frobenius(E, p, m)
            a = ap(E, p)
            assert (F.trace() - a).is_zero(), (E.label(), p)
            assert (F.det() - p).is_zero(), (E.label(), p)
            # cup-product compatibility [Fx, Fy] = p [x, y]
            lhs = (F.entry(0, 0) * F.entry(1, 1)
                   - F.entry(1, 0) * F.entry(0, 1))
            assert (lhs - p).is_zero(), (E.label(), p)
            count += 1
    assert count >= 16
    print(f"[criterion 5] PASS trace/det/pairing checks at m={m} on {count} "
          f"(curve, p) pairs across {len(curves)} curves")


def test_criterion_6_galois_rationality():
    for label, res in recovery_fixtures().items():
        r = res.report
        achieved = 2 * r.A.prec      # pi-units of the e=2 argument
        assert r.pi_part_valuation >= achieved - 1, label
        print(f"[criterion 6] PASS {label}: v(pi-part of A) = "
              f"{r.pi_part_valuation} >= {achieved} - 1")


def test_criterion_7_norm_relation():
    for E, p in ((E53, 5), (E43, 7)):
        assert ap(E, p) == 0
        phi = eigen_plus_symbol(E)
        thetas = {n: mazur_tate(phi, p, n) for n in range(4)}
        for n in (2, 3):
            lhs = project(thetas[n])
            rhs = nu_lift(thetas[n - 2])
            assert lhs.coeffs == {a: -c for a, c in rhs.coeffs.items()}, (E.label(), n)
    print("[criterion 7] PASS proj(theta_n) = -nu(theta_(n-2)) exactly over Q "
          "for n <= 3 at (53a, p=5), (43a, p=7)")


def test_criterion_8_gross_zagier():
    for E, g in ((E37, (0, 0)), (E43, (0, 0)), (E53, (0, 0)), (E197, (1, 0))):
        gen = point(E, *g)
        C = gross_zagier_constant(E, gen)
        assert C.value.denominator <= 100
        assert C.float_residual < 1e-6
        Cneg = gross_zagier_constant(E, negate(E, gen))
        assert Cneg.value == C.value
        print(f"[criterion 8] PASS {E.label()}: C(E) = {C.value} "
              f"(residual {C.float_residual:.2e}), invariant under gen -> -gen")
    # invariance under gen -> gen + torsion on the rank-1 curve 65a
    gen = point(E65, 1, 0)
    T = point(E65, 0, 0)
    C = gross_zagier_constant(E65, gen)
    Ct = gross_zagier_constant(E65, group_law(E65, gen, T))
    assert C.value == Ct.value
    print(f"[criterion 8] PASS 65a: C(E) = {C.value} invariant under "
          "gen -> gen + 2-torsion")


def test_criterion_9_formal_group():
    from prpoint.elliptic import _series_compose
    for E in (E37, E43, E53):
        K = 20
        lam = formal_log(E, K)
        ex = formal_exp(lam)
        comp = _series_compose([Fraction(0)] + list(lam.coeffs),
                               [Fraction(0)] + list(ex.coeffs), K)
        assert comp[1] == 1 and all(comp[k] == 0 for k in range(2, K + 1)), E.label()
    # homomorphism and multiplier independence at the fixture primes
    for E, p in ((E53, 5), (E43, 7)):
        P = point(E, 0, 0)
        base = padic_log_point(E, P, p, 9)
        for n in range(2, 6):
            ln = padic_log_point(E, scalar_mul(E, n, P), p, 9)
            assert (ln - n * base).is_zero(), (E.label(), n)
        alt = padic_log_point(E, P, p, 9, multiplier_power=1)
        assert (alt - base).is_zero(), E.label()
    print("[criterion 9] PASS exp(log(t)) = t + O(t^21); log is a "
          "homomorphism (n = 2..5) and multiplier-independent")


def test_criterion_10_identity_constant_cross_curve():
    constants = {}
    for label, res in recovery_fixtures().items():
        assert res.verdict.status in ("PASS", "PASS-EXACT"), label
        constants[label] = res.verdict.constant
    values = set(constants.values())
    assert len(values) == 1, constants
    const = values.pop()
    assert const == 1
    signs = {label: res.report.flags["sign_used"]
             for label, res in recovery_fixtures().items()}
    assert len(set(signs.values())) == 1, signs
    print(f"[criterion 10] PASS identity constant kappa = {const} and "
          f"convention sign {set(signs.values()).pop()} identical across "
          f"{len(constants)} fixtures: {sorted(constants)}")
