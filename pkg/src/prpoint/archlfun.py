"""Archimedean analytic data: a_n lists, L(E,1) and L'(E,1), the real period
by AGM, the Neron-Tate height, and the Gross-Zagier constant

    L'(E,1) / Omega_E^+ = C(E) * <P, P>_infty,   C(E) in Q*.

All floating work runs in mpmath at >= 30 significant digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .elliptic import (
    CurveData,
    CurvePoint,
    TorsionPoint,
    count_points,
    group_law,
    is_torsion,
    on_curve,
    scalar_mul,
    _prime_factors,
    _primes_up_to,
)

DPS = 40


class InsufficientTerms(ValueError):
    pass


class ReconstructionFailed(ValueError):
    pass


class CoordinateOverflow(OverflowError):
    pass


@dataclass(frozen=True)
class AnList:
    bound: int
    coeffs: tuple  # coeffs[n] = a_n for 1 <= n <= bound; coeffs[0] unused

    def __getitem__(self, n):
        return self.coeffs[n]


def split_multiplicative(curve: CurveData, q: int) -> bool:
    """Split vs non-split multiplicative reduction at q || N."""
    a1, a2, a3, a4, a6 = curve.ainvs()
    if q <= 3:
        # count the nonsingular locus: q-1 points means split (G_m)
        smooth = 1  # point at infinity
        for x in range(q):
            for y in range(q):
                if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % q:
                    continue
                fy = (2 * y + a1 * x + a3) % q
                fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % q
                if fx or fy:
                    smooth += 1
        return smooth == q - 1
    x0 = y0 = None
    for x in range(q):
        for y in range(q):
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % q:
                continue
            if (2 * y + a1 * x + a3) % q == 0 and (a1 * y - 3 * x * x - 2 * a2 * x - a4) % q == 0:
                x0, y0 = x, y
                break
        if x0 is not None:
            break
    if x0 is None:
        raise ValueError(f"no singular point mod {q}: reduction not multiplicative")
    disc = (a1 * a1 + 4 * (3 * x0 + a2)) % q
    return disc != 0 and pow(disc, (q - 1) // 2, q) == 1


def anlist(curve: CurveData, B: int) -> AnList:
    """Hecke coefficients a_1..a_B: point counts at good primes, +-1 at
    multiplicative primes (split/non-split), 0 at additive primes."""
    if B < 1:
        raise ValueError("bound must be >= 1")
    N = curve.conductor
    spf = list(range(B + 1))
    for i in range(2, int(B ** 0.5) + 1):
        if spf[i] == i:
            for j in range(i * i, B + 1, i):
                if spf[j] == j:
                    spf[j] = i
    ap_table = {}
    for p in _primes_up_to(B):
        if N % p:
            ap_table[p] = p + 1 - count_points(curve, p)
        else:
            v = 0
            M = N
            while M % p == 0:
                M //= p
                v += 1
            ap_table[p] = 0 if v >= 2 else (1 if split_multiplicative(curve, p) else -1)
    a = [0] * (B + 1)
    a[1] = 1
    for n in range(2, B + 1):
        p = spf[n]
        m = n // p
        if m == 1:
            a[n] = ap_table[p]
        elif m % p:
            a[n] = a[p] * a[m]
        elif N % p == 0:
            a[n] = ap_table[p] * a[m]
        else:
            a[n] = ap_table[p] * a[m] - p * a[m // p]
    return AnList(B, tuple(a))


def l_series_half(curve: CurveData, an: AnList, t) -> mp.mpf:
    """G(t) = sum_n (a_n / n) exp(-2 pi n t)."""
    with mp.workdps(DPS):
        t = mp.mpf(t)
        s = mp.mpf(0)
        for n in range(1, an.bound + 1):
            if an[n]:
                s += mp.mpf(an[n]) / n * mp.exp(-2 * mp.pi * n * t)
        return s


def l_value(curve: CurveData, an: AnList, w: int, t=None):
    """L(E,1) = G(t) + w G(1/(N t)) for any split point t > 0.

    w is the functional-equation sign (+1 rank-even regime).  Returns
    (value, tail_bound).
    """
    with mp.workdps(DPS):
        N = curve.conductor
        if t is None:
            t = 1 / mp.sqrt(N)
        val = l_series_half(curve, an, t) + w * l_series_half(curve, an, 1 / (N * mp.mpf(t)))
        tmin = min(mp.mpf(t), 1 / (N * mp.mpf(t)))
        tail = 2 * mp.exp(-2 * mp.pi * (an.bound + 1) * tmin) / (1 - mp.exp(-2 * mp.pi * tmin))
        return val, tail


def l_derivative(curve: CurveData, an: AnList, w: int = -1, tol: float = 1e-9):
    """L'(E,1) = 2 sum (a_n/n) E_1(2 pi n / sqrt N), valid in the w = -1
    (odd, rank-one) regime.  Returns (value, tail_bound)."""
    if w != -1:
        raise ValueError("derivative series requires functional-equation sign -1")
    with mp.workdps(DPS):
        N = curve.conductor
        x0 = 2 * mp.pi / mp.sqrt(N)
        s = mp.mpf(0)
        for n in range(1, an.bound + 1):
            if an[n]:
                s += mp.mpf(an[n]) / n * mp.e1(x0 * n)
        # |a_n| <= n, E1(x) <= exp(-x)/x: geometric tail
        q = mp.exp(-x0)
        tail = 2 * q ** (an.bound + 1) / (1 - q)
        if tail > tol:
            raise InsufficientTerms(
                f"tail bound {float(tail):.3g} above tolerance {tol}; raise the term bound")
        return 2 * s, 2 * tail


def real_period(curve: CurveData):
    """Omega_E^+ = integral of the Neron differential over E(R), by AGM.

    Two components (positive discriminant) double the least real period.
    Returns (value, components)."""
    with mp.workdps(DPS):
        c3, c2, c1, c0 = curve.rhs_quartic_coeffs()
        roots = mp.polyroots([c3, c2, c1, c0], maxsteps=200, extraprec=120)
        reals = sorted((r.real for r in roots if abs(r.imag) < mp.mpf(10) ** (-DPS + 8)),
                       reverse=True)
        if curve.discriminant > 0:
            e1, e2, e3 = reals
            omega1 = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
            return 2 * omega1, 2
        # one real root: write 4x^3+b2x^2+2b4x+b6 = 4(x-e1)(t^2 + ct*t + dt)
        # in t = x - e1, with dt = |e1 - e2|^2 > 0
        e1 = reals[0]
        ct = 3 * e1 + mp.mpf(c2) / 4
        dt = 3 * e1 ** 2 + mp.mpf(c2) / 2 * e1 + mp.mpf(c1) / 4
        omega1 = 2 * mp.pi / mp.agm(2 * dt ** mp.mpf(0.25), mp.sqrt(2 * mp.sqrt(dt) + ct))
        return omega1, 1


def _dup_polys(curve: CurveData):
    b2, b4, b6, b8 = curve.b2, curve.b4, curve.b6, curve.b8

    def phi(x):
        return x ** 4 - b4 * x * x - 2 * b6 * x - b8

    def psi2(x):
        return 4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6

    return phi, psi2


def _nonsingular_multiple(curve: CurveData, P: CurvePoint):
    """Smallest M >= 1 with M*P reducing to a nonsingular point mod every bad
    prime; returns (M, M*P)."""
    bad = _prime_factors(curve.conductor)
    a1, a2, a3, a4, a6 = curve.ainvs()
    for M in range(1, 25):
        Q = scalar_mul(curve, M, P)
        if Q.infinity:
            continue
        ok = True
        for q in bad:
            xd, yd = Q.x.denominator, Q.y.denominator
            if xd % q == 0:
                continue  # pole reduction = O, nonsingular
            xq = Q.x.numerator * pow(xd, -1, q) % q
            yq = Q.y.numerator * pow(yd, -1, q) % q
            fy = (2 * yq + a1 * xq + a3) % q
            fx = (a1 * yq - 3 * xq * xq - 2 * a2 * xq - a4) % q
            if fx == 0 and fy == 0:
                ok = False
                break
        if ok:
            return M, Q
    raise ValueError("no small multiple avoids the singular loci")


def neron_tate_height(curve: CurveData, P: CurvePoint, K: int = 8,
                      digit_budget: int = 10 ** 6):
    """Canonical height via Tate's telescoping series on x-coordinates:

        h(P) = log den(x) + log max(1,|x|)
             + sum_{n>=0} 4^-(n+1) log( max(|phi(x_n)|, |psi2(x_n)|)
                                        / max(1,|x_n|)^4 )

    with x_{n+1} = phi(x_n)/psi2(x_n) iterated in floats.  Normalized as the
    x-coordinate limit h(P) = lim 4^-K h_x(2^K P), the regulator convention
    under which L'(E,1)/Omega^+ = h(gen) holds on-the-nose for 37a.  Valid
    when P meets the identity component at every bad place; a small multiple
    M*P (with h(P) = h(M*P)/M^2) enforces that.  Returns (value, error_bound)
    with the documented O(4^-K) truncation bound.
    """
    if P.infinity or is_torsion(curve, P):
        return mp.mpf(0), mp.mpf(0)
    M, Q = _nonsingular_multiple(curve, P)
    if Q.x.numerator.bit_length() + Q.x.denominator.bit_length() > digit_budget * 4:
        raise CoordinateOverflow("x-coordinate exceeds the digit budget")
    phi, psi2 = _dup_polys(curve)
    with mp.workdps(DPS):
        x_exact = Q.x
        total = mp.mpf(mp.log(x_exact.denominator))
        x = mp.mpf(x_exact.numerator) / mp.mpf(x_exact.denominator)
        total += mp.log(max(1, abs(x)))
        series_scale = max(abs(curve.b2), abs(curve.b4), abs(curve.b6), abs(curve.b8), 2)
        for n in range(K):
            num = phi(x)
            den = psi2(x)
            c = max(abs(num), abs(den)) / max(1, abs(x)) ** 4
            total += mp.mpf(4) ** (-(n + 1)) * mp.log(c)
            x = num / den
        bound = mp.mpf(4) ** (-K) * 2 * (mp.log(series_scale) + 10) / 3
        return total / (M * M), bound / (M * M)


def neron_tate_doubling_oracle(curve: CurveData, P: CurvePoint, K: int = 8):
    """Independent low-precision oracle: h(P) ~ 4^-K h_x(2^K P) with exact
    point doubling."""
    if P.infinity or is_torsion(curve, P):
        return 0.0
    Q = P
    for _ in range(K):
        Q = group_law(curve, Q, Q)
    H = max(abs(Q.x.numerator), Q.x.denominator)
    with mp.workdps(DPS):
        return float(mp.log(H) / 4 ** K)


@dataclass(frozen=True)
class GZConstant:
    value: Fraction
    float_residual: float
    l_derivative: float
    real_period: float
    height: float
    suspect_multiple: bool

    def to_json(self):
        return {"value": str(self.value), "float_residual": self.float_residual,
                "inputs": {"l_derivative": self.l_derivative,
                           "real_period": self.real_period,
                           "height": self.height},
                "suspect_multiple": self.suspect_multiple}


def gross_zagier_constant(curve: CurveData, gen: CurvePoint, terms: int = 2000,
                          tol: float = 1e-6, max_den: int = 100) -> GZConstant:
    """C(E) = (L'(E,1)/Omega^+) / h(gen), reconstructed as a small rational.

    The caller asserts the rank-one regime and that gen generates
    E(Q)/torsion; a square factor in the reconstructed denominator is flagged
    as a likely non-generator input.
    """
    if gen.infinity or not on_curve(curve, gen):
        raise ValueError("generator must be an affine point on the curve")
    if is_torsion(curve, gen):
        raise TorsionPoint("generator is torsion")
    an = anlist(curve, terms)
    lp, _ = l_derivative(curve, an, tol=tol * 1e-2)
    om, _ = real_period(curve)
    ht, hbound = neron_tate_height(curve, gen, K=max(30, 8))
    with mp.workdps(DPS):
        ratio = (lp / om) / ht
        cand = Fraction(float(ratio)).limit_denominator(max_den)
        residual = abs(float(ratio - mp.mpf(cand.numerator) / cand.denominator))
    if residual > tol or cand == 0:
        raise ReconstructionFailed(
            f"ratio {float(ratio):.9f} not within {tol} of a rational with "
            f"denominator <= {max_den} (wrong generator, rank, or precision)")
    d = cand.denominator
    suspect = any(d % (k * k) == 0 for k in range(2, int(d ** 0.5) + 1))
    return GZConstant(cand, residual, float(lp), float(om), float(ht), suspect)
