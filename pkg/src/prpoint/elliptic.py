"""Elliptic curves over Q: Weierstrass group law, point counting, reduction
types, the formal group with its logarithm/exponential relative to the Neron
differential, and p-adic logarithms of rational points.

The user supplies a globally minimal model; minimality is not re-verified.
The Neron differential is taken as dx/(2y + a1*x + a3) on that model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .padic import PadicElement, vp_fraction


class BadReductionPrime(ValueError):
    pass


class PointNotOnCurve(ValueError):
    pass


class TorsionPoint(ValueError):
    pass


@dataclass(frozen=True)
class CurveData:
    """Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
    with its conductor (supplied, cross-checked at good primes)."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError("singular model (discriminant 0)")
        if self.c4 ** 3 - self.c6 ** 2 != 1728 * self.discriminant:
            raise AssertionError("b/c invariant relation failed")
        for q in _prime_factors(self.conductor):
            if self.discriminant % q != 0:
                raise ValueError(f"conductor prime {q} does not divide the discriminant")

    @property
    def b2(self):
        return self.a1 ** 2 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3 ** 2 + 4 * self.a6

    @property
    def b8(self):
        return (self.a1 ** 2 * self.a6 + 4 * self.a2 * self.a6
                - self.a1 * self.a3 * self.a4 + self.a2 * self.a3 ** 2 - self.a4 ** 2)

    @property
    def c4(self):
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        return (-self.b2 ** 2 * self.b8 - 8 * self.b4 ** 3 - 27 * self.b6 ** 2
                + 9 * self.b2 * self.b4 * self.b6)

    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def short_model(self):
        """(A, B, u): Y^2 = X^3 + A X + B with X = 36x + 3b2, Y = 216y + 108(a1x+a3);
        the Neron differential is u * dX/Y with u = 3."""
        return -27 * self.c4, -54 * self.c6, Fraction(3)

    def rhs_quartic_coeffs(self):
        """(2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6."""
        return 4, self.b2, 2 * self.b4, self.b6

    def label(self):
        return ",".join(str(a) for a in self.ainvs()) + f";{self.conductor}"

    def __repr__(self):
        return f"CurveData({self.label()})"


@dataclass(frozen=True)
class CurvePoint:
    x: Fraction = field(default_factory=lambda: Fraction(0))
    y: Fraction = field(default_factory=lambda: Fraction(0))
    infinity: bool = False

    @classmethod
    def O(cls):
        return cls(Fraction(0), Fraction(0), True)

    def is_infinity(self):
        return self.infinity

    def __repr__(self):
        return "O" if self.infinity else f"({self.x}, {self.y})"


def on_curve(curve: CurveData, P: CurvePoint) -> bool:
    if P.infinity:
        return True
    x, y = P.x, P.y
    return (y * y + curve.a1 * x * y + curve.a3 * y
            == x ** 3 + curve.a2 * x * x + curve.a4 * x + curve.a6)


def point(curve: CurveData, x, y) -> CurvePoint:
    P = CurvePoint(Fraction(x), Fraction(y))
    if not on_curve(curve, P):
        raise PointNotOnCurve(f"({x}, {y}) not on {curve.label()}")
    return P


def negate(curve: CurveData, P: CurvePoint) -> CurvePoint:
    if P.infinity:
        return P
    return CurvePoint(P.x, -P.y - curve.a1 * P.x - curve.a3)


def group_law(curve: CurveData, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Chord-tangent addition on the general Weierstrass model."""
    if P.infinity:
        return Q
    if Q.infinity:
        return P
    a1, a2, a3, a4, a6 = (Fraction(a) for a in curve.ainvs())
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return CurvePoint.O()
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
        nu = (-x1 ** 3 + a4 * x1 + 2 * a6 - a3 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return CurvePoint(x3, y3)


def scalar_mul(curve: CurveData, n: int, P: CurvePoint) -> CurvePoint:
    if n < 0:
        return scalar_mul(curve, -n, negate(curve, P))
    R = CurvePoint.O()
    B = P
    while n:
        if n & 1:
            R = group_law(curve, R, B)
        n >>= 1
        if n:
            B = group_law(curve, B, B)
    return R


def is_torsion(curve: CurveData, P: CurvePoint) -> bool:
    """True iff P has order <= 12 (Mazur's bound covers all torsion orders)."""
    Q = CurvePoint.O()
    for _ in range(12):
        Q = group_law(curve, Q, P)
        if Q.infinity:
            return True
    return False


def count_points(curve: CurveData, p: int) -> int:
    """#E(F_p) including the point at infinity, by x-enumeration with the
    quadratic character on the completed square (brute force at p = 2)."""
    if curve.conductor % p == 0:
        raise BadReductionPrime(f"p = {p} divides the conductor")
    a1, a2, a3, a4, a6 = curve.ainvs()
    if p == 2:
        count = 0
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    count += 1
        return count + 1
    c3, c2, c1, c0 = curve.rhs_quartic_coeffs()
    sq = bytearray(p)
    for i in range(1, (p >> 1) + 1):
        sq[i * i % p] = 1
    count = 0
    for x in range(p):
        r = (((c3 * x + c2) * x + c1) * x + c0) % p
        if r == 0:
            count += 1
        elif sq[r]:
            count += 2
    return count + 1


def ap(curve: CurveData, p: int) -> int:
    """Trace of Frobenius a_p = p + 1 - #E(F_p) at a good prime."""
    a = p + 1 - count_points(curve, p)
    assert a * a <= 4 * p, "Hasse bound violated"
    return a


def reduction_type(curve: CurveData, p: int) -> str:
    """Classification at p >= 5: good-ordinary / good-supersingular /
    multiplicative / additive."""
    if p < 5:
        raise ValueError("reduction_type requires p >= 5")
    v = 0
    N = curve.conductor
    while N % p == 0:
        N //= p
        v += 1
    if v == 0:
        return "good-supersingular" if ap(curve, p) % p == 0 else "good-ordinary"
    return "multiplicative" if v == 1 else "additive"


def smallest_supersingular(curve: CurveData, bound: int = 200) -> int:
    """Smallest good supersingular prime p >= 5 (a_p = 0 scan)."""
    for p in _primes_up_to(bound):
        if p < 5 or curve.conductor % p == 0:
            continue
        if ap(curve, p) == 0:
            return p
    raise ValueError(f"no supersingular prime found below {bound}")


# -- formal group --------------------------------------------------------------


@dataclass(frozen=True)
class FormalLog:
    """Truncated formal-group logarithm lambda(t) = t + c2 t^2 + ... for the
    parameter t = -x/y; lambda'(t) is the t-expansion of the Neron
    differential."""

    curve: CurveData
    truncation: int
    coeffs: tuple  # (c_1, ..., c_K) with c_1 = 1

    def __call__(self, t: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = (acc + c) * t
        return acc

    def eval_padic(self, t: PadicElement) -> PadicElement:
        acc = PadicElement.zero(t.p, t.prec + t.e * t.v_pi(), t.e)
        for c in reversed(self.coeffs):
            acc = (acc + c) * t
        return acc


def _series_mul(a, b, K):
    out = [Fraction(0)] * (K + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > K:
            continue
        for j, bj in enumerate(b):
            if i + j > K:
                break
            out[i + j] += ai * bj
    return out


def _series_w(curve: CurveData, K: int):
    """w(t) = t^3(1 + ...) with w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3,
    truncated at degree K."""
    a1, a2, a3, a4, a6 = (Fraction(a) for a in curve.ainvs())
    w = [Fraction(0)] * (K + 1)
    if K >= 3:
        w[3] = Fraction(1)
    for _ in range(K):
        w2 = _series_mul(w, w, K)
        w3 = _series_mul(w2, w, K)
        new = [Fraction(0)] * (K + 1)
        if K >= 3:
            new[3] = Fraction(1)
        for i in range(K + 1):
            acc = new[i]
            if i >= 1:
                acc += a1 * w[i - 1] + a4 * w2[i - 1]
            if i >= 2:
                acc += a2 * w[i - 2]
            acc += a3 * w2[i] + a6 * w3[i]
            new[i] = acc
        if new == w:
            break
        w = new
    return w


def formal_log(curve: CurveData, K: int = 20) -> FormalLog:
    """Integrate the invariant differential dx/(2y + a1 x + a3) expanded in
    t = -x/y: lambda(t) = t + c2 t^2 + ... + c_K t^K."""
    if K < 2:
        raise ValueError("truncation must be >= 2")
    a1, a3 = Fraction(curve.a1), Fraction(curve.a3)
    KK = K + 4
    w = _series_w(curve, KK)
    # omega/dt = (w - t w') / (w * (-2 + a1 t + a3 w)); both sides vanish to
    # order 3 at t = 0, so strip t^3 before inverting.
    wp = [Fraction(i) * w[i] for i in range(1, KK + 1)] + [Fraction(0)]
    num = [w[i] - wp[i - 1] if i >= 1 else w[i] for i in range(KK + 1)]
    den_in = [Fraction(0)] * (KK + 1)
    den_in[0] = Fraction(-2)
    if KK >= 1:
        den_in[1] += a1
    for i in range(KK + 1):
        den_in[i] += a3 * w[i]
    den = _series_mul(w, den_in, KK)
    num3 = num[3:] + [Fraction(0)] * 3
    den3 = den[3:] + [Fraction(0)] * 3
    inv = _series_inverse(den3, KK - 3)
    F = _series_mul(num3, inv, KK - 3)  # omega/dt as a power series, F[0] = 1
    assert F[0] == 1, "invariant differential not normalized"
    coeffs = [Fraction(0)] * K
    for i in range(min(K, len(F))):
        coeffs[i] = F[i] / (i + 1)
    return FormalLog(curve, K, tuple(coeffs))


def _series_inverse(a, K):
    if a[0] == 0:
        raise ZeroDivisionError("series has no inverse")
    inv = [Fraction(0)] * (K + 1)
    inv[0] = 1 / a[0]
    for i in range(1, K + 1):
        s = Fraction(0)
        for j in range(1, i + 1):
            if j < len(a):
                s += a[j] * inv[i - j]
        inv[i] = -s / a[0]
    return inv


def formal_exp(log: FormalLog):
    """Compositional inverse of lambda: exp(lambda(t)) = t + O(t^(K+1)).

    Returned as a FormalLog-shaped coefficient tuple (leading coefficient 1).
    """
    K = log.truncation
    lam = [Fraction(0)] + list(log.coeffs)  # lam[i] = coefficient of t^i
    e = [Fraction(0), Fraction(1)] + [Fraction(0)] * (K - 1)
    for k in range(2, K + 1):
        # choose e_k so that [t^k] lam(e(t)) = 0 given e_1..e_{k-1}
        comp = _series_compose(lam, e, k)
        e[k] = -comp[k]
    return FormalLog(log.curve, K, tuple(e[1:]))


def _series_compose(a, b, K):
    """a(b(t)) truncated at degree K; requires b[0] = 0."""
    out = [Fraction(0)] * (K + 1)
    out[0] = a[0] if a else Fraction(0)
    power = [Fraction(0)] * (K + 1)
    power[0] = Fraction(1)
    for i in range(1, min(len(a), K + 1)):
        power = _series_mul(power, b, K)
        if a[i] == 0:
            continue
        for j in range(K + 1):
            out[j] += a[i] * power[j]
    return out


def t_parameter(P: CurvePoint) -> Fraction:
    """Formal-group parameter t = -x/y."""
    if P.infinity:
        return Fraction(0)
    if P.y == 0:
        raise ValueError("point with y = 0 is not in the formal-group chart")
    return -P.x / P.y


def padic_log_point(curve: CurveData, P: CurvePoint, p: int, prec: int,
                    multiplier_power: int = 0) -> PadicElement:
    """log_E(P) = lambda(t(mP)) / m with m = #E(F_p) * p^k, relative to the
    Neron differential of the supplied model.

    Independent of the admissible multiplier m (tested); `prec` is the target
    absolute precision in p-units.
    """
    if not on_curve(curve, P):
        raise PointNotOnCurve("point not on curve")
    if is_torsion(curve, P):
        raise TorsionPoint("p-adic logarithm target must be non-torsion")
    m = count_points(curve, p) * p ** multiplier_power
    Q = scalar_mul(curve, m, P)
    t = t_parameter(Q)
    vt = vp_fraction(t, p)
    assert vt >= 1, "multiple did not land in the formal group"
    vm = vp_fraction(Fraction(m), p)
    work = prec + vm + max(2, _ilog(prec + 4, p) + 2)
    J = (work // vt) + _ilog(work + 4, p) + 3
    lam = formal_log(curve, max(20, J))
    tp = PadicElement.from_rational(p, t, work)
    val = lam.eval_padic(tp) / Fraction(m)
    return val.cap(prec)


def _ilog(n, p):
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


# -- curve input formats -------------------------------------------------------


def parse_curve(text: str):
    """Parse "a1,a2,a3,a4,a6;N" or the JSON format
    {"a": [...], "N": ..., "generator": ["x", "y"]}.

    Returns (CurveData, generator CurvePoint or None).
    """
    text = text.strip()
    if text.startswith("{"):
        obj = json.loads(text)
        curve = CurveData(*[int(a) for a in obj["a"]], conductor=int(obj["N"]))
        gen = None
        if obj.get("generator"):
            gx, gy = (Fraction(s) for s in obj["generator"])
            gen = point(curve, gx, gy)
        return curve, gen
    coeffs, _, N = text.partition(";")
    a = [int(c) for c in coeffs.split(",")]
    if len(a) != 5:
        raise ValueError("expected a1,a2,a3,a4,a6;N")
    return CurveData(*a, conductor=int(N)), None


def _prime_factors(n: int):
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _primes_up_to(n: int):
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(math.isqrt(n)) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, v in enumerate(sieve) if v]
