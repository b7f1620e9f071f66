"""Point recovery from the two supersingular p-adic L-functions.

Assembles the square-root argument

    A = delta_E ((1 - 1/alpha)^-2 L'_{p,alpha}(E,1) - (1 - 1/beta)^-2 L'_{p,beta}(E,1)),

checks its Galois rationality and squareness, takes l = sqrt(A) (both signs),
and identifies the recovered point through lambda = l / log_E(gen) in Q,
rationally reconstructed and verified by the exact check
v*l = u*log_E(gen).  All normalization uncertainty surfaces as the reported
identity constant kappa = A / (lambda * log_E(gen))^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import isqrt

from .archlfun import GZConstant, gross_zagier_constant
from .crystalline import eigen_data, kedlaya_frobenius
from .elliptic import CurveData, CurvePoint, ap, is_torsion, on_curve, padic_log_point
from .exact import NoReconstruction, rational_reconstruct
from .modsym import eigen_plus_symbol
from .padic import NonResidue, OddValuation, PadicElement, PadicError
from .padiclfun import (
    derivative_at_triv,
    order_of_vanishing,
    padic_l_series_pair,
)


class NotRational(ArithmeticError):
    pass


class NotASquare(ArithmeticError):
    pass


class ReconstructionFailed(ArithmeticError):
    pass


def sqrt_argument(delta_E: PadicElement, L_alpha: PadicElement,
                  L_beta: PadicElement, alpha: PadicElement,
                  rationality_tol: int = 1) -> PadicElement:
    """A = delta_E ((1-1/alpha)^-2 L_alpha - (1-1/beta)^-2 L_beta), coerced
    into Q_p.

    Preconditions asserted: beta = conj(alpha) and L_beta = conj(L_alpha)
    (the two stabilized series are conjugate when a_p = 0).  Raises
    NotRational when the pi-coordinate of A is distinguishable from 0 beyond
    `rationality_tol` pi-units below its precision.
    """
    beta = alpha.galois_conjugate()
    if not (L_beta - L_alpha.galois_conjugate()).is_zero():
        raise ValueError("L_beta is not the Galois conjugate of L_alpha")
    one = PadicElement.one(alpha.p, alpha.prec, e=2)
    fa = (one - alpha.inverse()).inverse() ** 2
    fb = (one - beta.inverse()).inverse() ** 2
    bracket = fa * L_alpha.to_extension() - fb * L_beta.to_extension()
    A2 = delta_E.to_extension() * bracket
    try:
        return A2.to_base(tol=rationality_tol)
    except PadicError as exc:
        raise NotRational(str(exc)) from exc


def _reconstruct_padic(x: PadicElement, bound: int) -> Fraction:
    """Rational u/v from a Q_p element at its own precision."""
    if x.e != 1:
        raise ValueError("reconstruction requires e = 1")
    if x.is_zero():
        return Fraction(0)
    v = x.v_pi()
    p = x.p
    shift = max(0, -v)
    scaled = x._mul_exact(Fraction(p) ** shift)
    rel = scaled.prec
    residue = int(scaled.exact_representative()) % p ** rel
    out = rational_reconstruct(residue, p ** rel, bound)
    return out / p ** shift


@dataclass(frozen=True)
class RecoveryReport:
    curve: str
    p: int
    depth: int
    precision_pi: int            # absolute precision of A (pi-units of Q_p(pi))
    A: PadicElement
    ell_plus: PadicElement
    ell_minus: PadicElement
    log_gen: PadicElement
    lam: Fraction                # None when reconstruction failed
    lam_residual_valuation: int  # pi-valuation of v*l - u*log(gen)
    kappa: Fraction              # observed identity constant, None if unknown
    flags: dict = field(default_factory=dict)
    pi_part_valuation: int = 0   # of the square-root argument, before coercion

    @property
    def lambda_reconstructed(self):
        return self.lam is not None

    def to_json(self):
        return {"curve": self.curve, "p": self.p, "depth": self.depth,
                "precision_pi": self.precision_pi,
                "A": self.A.to_json(),
                "ell_plus": self.ell_plus.to_json(),
                "ell_minus": self.ell_minus.to_json(),
                "log_gen": self.log_gen.to_json(),
                "lambda": None if self.lam is None else str(self.lam),
                "lambda_residual_valuation": self.lam_residual_valuation,
                "kappa": None if self.kappa is None else str(self.kappa),
                "pi_part_valuation": self.pi_part_valuation,
                "flags": self.flags}


def recover_lambda(A: PadicElement, curve: CurveData, gen: CurvePoint, p: int,
                   prec: int, try_negated: bool = True,
                   log_gen: PadicElement = None, depth: int = 0,
                   pi_part_valuation: int = None) -> RecoveryReport:
    """sqrt(A) = +-log_E(P); lambda = sqrt(A)/log_E(gen) reconstructed in Q.

    Both signs of A are attempted when squareness fails (the pairing and
    eigen-labeling conventions leave a global sign open); the sign actually
    used is recorded.  Raises NotASquare / ReconstructionFailed.
    """
    if gen.infinity or not on_curve(curve, gen) or is_torsion(curve, gen):
        raise ValueError("gen must be a non-torsion point on the curve")
    if log_gen is None:
        log_gen = padic_log_point(curve, gen, p, prec)
    if A.is_zero():
        raise NotASquare("argument indistinguishable from zero")
    # The pairing and eigen-labeling conventions leave a global sign open.
    # When -1 is a square mod p, squareness alone cannot pick it (the wrong
    # sign yields sqrt(-1) * rational), so both signs run through the full
    # reconstruction; among successes the certified one wins: the true
    # rational has fixed height, while a wrong-sign accident's minimal height
    # grows with precision, so the larger margin avail - log_p(2 h^2) decides.
    square_errors = []
    rec_errors = []
    candidates = []
    for sign in ((1, -1) if try_negated else (1,)):
        As = A if sign == 1 else -A
        flags = {"sign_used": sign, "reduced_guard": False, "sign_ambiguous": False}
        try:
            ell, ell_minus = As.sqrt()
        except (OddValuation, NonResidue) as exc:
            square_errors.append(f"sign {sign:+d}: {exc}")
            continue
        lam_padic = ell / log_gen
        avail = lam_padic.relative_precision()
        guard = 2 + _ceil_log(100, p)
        bound = p ** max(0, avail // 2 - guard)
        if bound < 2:
            bound = max(1, isqrt(p ** max(1, avail) // 2))
            flags["reduced_guard"] = True
        try:
            lam = _reconstruct_padic(lam_padic, bound)
        except NoReconstruction:
            rec_errors.append(
                f"sign {sign:+d}: no rational within bound {bound} "
                f"(digits {lam_padic!r})")
            continue
        check = ell * lam.denominator - log_gen * lam.numerator
        if not check.is_zero():
            check2 = ell_minus * lam.denominator - log_gen * lam.numerator
            if check2.is_zero():
                ell, ell_minus = ell_minus, ell
            else:
                rec_errors.append(f"sign {sign:+d}: {lam} fails the exact check")
                continue
        height = max(abs(lam.numerator), lam.denominator)
        margin = avail - _ceil_log(2 * height * height, p)
        candidates.append((margin, -height, sign == 1, As, ell, ell_minus,
                           lam, avail, flags))
    if not candidates:
        if rec_errors:
            raise ReconstructionFailed(
                "lambda not recognizably rational (precision too low or the "
                "normalization scalar is irrational): "
                + "; ".join(rec_errors + square_errors))
        raise NotASquare("; ".join(square_errors))
    candidates.sort(reverse=True)
    margin, _, _, As, ell, ell_minus, lam, avail, flags = candidates[0]
    if len(candidates) > 1:
        flags["sign_ambiguous"] = True
    check = ell * lam.denominator - log_gen * lam.numerator
    residual_val = check.prec * (2 // check.e)  # pi-units
    return RecoveryReport(
        curve=curve.label(), p=p, depth=depth,
        precision_pi=As.prec, A=As, ell_plus=ell, ell_minus=ell_minus,
        log_gen=log_gen, lam=lam, lam_residual_valuation=residual_val,
        kappa=None, flags=flags,
        pi_part_valuation=pi_part_valuation if pi_part_valuation is not None
        else As.prec)


def _ceil_log(n, p):
    k = 0
    while p ** k < n:
        k += 1
    return k


def exp_coordinate_check(curve: CurveData, gen: CurvePoint,
                         report: RecoveryReport) -> bool:
    """Optional direct-coordinate cross-check of the identification, through
    the formal-group exponential instead of the logarithm.

    With lambda = u/v and m = #E(F_p): the point m*u*gen lies in the formal
    group, and its parameter must equal exp(m*u*log_E(gen)) = exp(m*v*ell).
    Low precision suffices; returns True when the two parameters agree.
    """
    from .elliptic import count_points, formal_exp, formal_log, scalar_mul, t_parameter
    if not report.lambda_reconstructed:
        return False
    p = report.p
    u, v = report.lam.numerator, report.lam.denominator
    m = count_points(curve, p)
    # v * ell_plus = u * log(gen) exactly, so m*v*ell_plus = log(m*u*gen)
    Q = scalar_mul(curve, m * u, gen)
    t_actual = t_parameter(Q)
    arg = report.ell_plus * Fraction(m * v)
    prec = min(arg.prec, 12)
    exp_series = formal_exp(formal_log(curve, max(20, 2 * prec + 8)))
    t_rec = exp_series.eval_padic(arg.cap(prec))
    t_embedded = PadicElement.from_rational(p, t_actual, t_rec.prec)
    return (t_rec - t_embedded).is_zero()


@dataclass(frozen=True)
class IdentityVerdict:
    status: str              # PASS-EXACT | PASS | FAIL | SKIPPED
    constant: Fraction       # observed kappa (None when SKIPPED)
    predicted_bk_log: PadicElement  # -(1+1/p) C(E) A

    def to_json(self):
        return {"status": self.status,
                "constant": None if self.constant is None else str(self.constant),
                "predicted_bk_log": None if self.predicted_bk_log is None
                else self.predicted_bk_log.to_json()}


def verify_supersingular_identity(report: RecoveryReport,
                                  C_E: GZConstant) -> IdentityVerdict:
    """Observed proportionality constant between A and log_E(lambda*gen)^2.

    PASS-EXACT when the constant is exactly 1; PASS when it reconstructs as a
    rational of height < 10^3; the predicted logarithm of the recovered class
    -(1+1/p) C(E) A is reported alongside.
    """
    p = report.p
    predicted = report.A * Fraction(-(p + 1), p) * C_E.value
    if not report.lambda_reconstructed:
        return IdentityVerdict("SKIPPED", None, predicted)
    target = report.log_gen * report.lam
    kappa_p = report.A / (target * target)
    try:
        kappa = _reconstruct_padic(kappa_p, 1000)
    except NoReconstruction:
        return IdentityVerdict("FAIL", None, predicted)
    if kappa == 1:
        return IdentityVerdict("PASS-EXACT", kappa, predicted)
    if abs(kappa.numerator) < 1000 and kappa.denominator < 1000:
        return IdentityVerdict("PASS", kappa, predicted)
    return IdentityVerdict("FAIL", kappa, predicted)


@dataclass(frozen=True)
class RecoveryResult:
    report: RecoveryReport
    verdict: IdentityVerdict
    C_E: GZConstant
    series_alpha: object
    series_beta: object
    delta_E: PadicElement

    def to_json(self):
        return {"report": self.report.to_json(),
                "verdict": self.verdict.to_json(),
                "gross_zagier": self.C_E.to_json(),
                "series_alpha": self.series_alpha.to_json(),
                "series_beta": self.series_beta.to_json(),
                "delta_E": self.delta_E.to_json()}


def recover(curve: CurveData, gen: CurvePoint, p: int, depth: int,
            prec: int = None, threads: int = 1, backend=None,
            phi_scale: Fraction = None, hecke_bound: int = 50,
            frobenius_prec: int = None) -> RecoveryResult:
    """Full pipeline: plus symbol, both stabilized L-series, Kedlaya
    eigen-data, Gross-Zagier constant, square-root argument, lambda.

    Restricted to good supersingular p >= 5 (a_p = 0); ordinary primes are
    refused with an explanatory message.
    """
    a_p = ap(curve, p)
    if a_p % p != 0:
        raise ValueError(
            f"p = {p} is good ordinary for this curve (a_p = {a_p}); point "
            "recovery needs the supersingular pair of L-functions (a_p = 0), "
            "and the critical-slope series is not computable here")
    if a_p != 0:
        raise ValueError("supersingular with a_p != 0 cannot occur for p >= 5")
    if prec is None:
        prec = max(2 * depth, depth + 6)
    phi = eigen_plus_symbol(curve, hecke_bound=hecke_bound)
    if phi_scale is not None:
        phi = phi.scaled(phi_scale)
    series_a, series_b = padic_l_series_pair(phi, p, depth, prec=prec,
                                             threads=threads, backend=backend)
    if not series_a.value_at_zero().is_zero():
        raise ValueError(
            "L_p does not vanish at the central point: rank-0 regime, "
            "no point to recover (order_of_vanishing gate)")
    La = derivative_at_triv(series_a)
    Lb = derivative_at_triv(series_b)
    C_E = gross_zagier_constant(curve, gen)
    m_frob = frobenius_prec if frobenius_prec is not None else max(8, depth + 4)
    F = kedlaya_frobenius(curve, p, m_frob)
    ed = eigen_data(F, C_E)
    A2 = ed.delta_E.to_extension() * (
        (PadicElement.one(p, ed.alpha.prec, e=2) - ed.alpha.inverse()).inverse() ** 2
        * La.to_extension()
        - (PadicElement.one(p, ed.beta.prec, e=2) - ed.beta.inverse()).inverse() ** 2
        * Lb.to_extension())
    pi_part_val = A2.pi_part_valuation()
    A = sqrt_argument(ed.delta_E, La, Lb, ed.alpha)
    log_gen = padic_log_point(curve, gen, p, max(prec, A.prec + 2))
    report = recover_lambda(A, curve, gen, p, prec, log_gen=log_gen,
                            depth=depth, pi_part_valuation=pi_part_val)
    verdict = verify_supersingular_identity(report, C_E)
    report = replace(report, kappa=verdict.constant)
    return RecoveryResult(report, verdict, C_E, series_a, series_b, ed.delta_E)
