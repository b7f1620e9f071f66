"""Crystalline Frobenius on H^1_dR at p via the Monsky-Washnitzer lift: the
2x2 Frobenius matrix on the basis {omega = dx/y, eta = x dx/y} of the short
model y^2 = x^3 + Ax + B, the eigen-decomposition of the twisted module, the
dual class omega*, the canonical cup-product pairing, and delta_E.

The Frobenius series phi(x^i dx/y) = sum_k p C(-1/2,k) x^(p(i+1)-1) E^k
y^(-p(2k+1)) dx, E = Q(x^p) - Q(x)^p, is truncated at k <= K and reduced with
the standard pole-order relations.  All arithmetic runs modulo p^W on integer
coefficients with an explicit p-power shift tracking the (rare) divisions by
p-divisible odd integers; W carries enough slack that doubling K leaves the
first m digits unchanged (tested).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .archlfun import GZConstant
from .elliptic import CurveData
from .padic import PadicElement


class BadPrime(ValueError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


class DegenerateDecomposition(ArithmeticError):
    pass


def _poly_mulmod_int(a, b, mod):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = (out[i + j] + ai * bj) % mod
    return out


def _poly_divmod_monic(a, q, mod):
    """divmod by the monic cubic q, coefficients mod `mod`."""
    a = list(a)
    n = len(q) - 1
    quot = [0] * max(0, len(a) - n)
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i] % mod
        if c:
            quot[i - n] = c
            for j in range(n + 1):
                a[i - n + j] = (a[i - n + j] - c * q[j]) % mod
    return quot, [x % mod for x in a[:n]]


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


@dataclass(frozen=True)
class FrobeniusData:
    """Frobenius matrix on {dx/y, x dx/y} of y^2 = x^3 + Ax + B, to absolute
    precision m, with the scale u relating the Neron differential to dx/y."""

    p: int
    precision: int
    A: int
    B: int
    u: Fraction
    matrix: tuple       # ((F00, F01), (F10, F11)) as e=1 PadicElements
    truncation: int

    def entry(self, i, j):
        return self.matrix[i][j]

    def trace(self):
        return self.matrix[0][0] + self.matrix[1][1]

    def det(self):
        return (self.matrix[0][0] * self.matrix[1][1]
                - self.matrix[0][1] * self.matrix[1][0])

    def to_json(self):
        return {"p": self.p, "precision": self.precision,
                "short_model": {"A": self.A, "B": self.B, "u": str(self.u)},
                "matrix": [[self.matrix[i][j].to_json() for j in (0, 1)]
                           for i in (0, 1)],
                "truncation": self.truncation}


def kedlaya_frobenius(curve: CurveData, p: int, m: int,
                      truncation: int = None) -> FrobeniusData:
    """Frobenius on H^1_dR of the reduction at a good p >= 5 via Kedlaya's
    algorithm; raises PrecisionExhausted when the shift bookkeeping eats into
    the requested m digits."""
    if p < 5:
        raise BadPrime("p >= 5 required")
    if curve.conductor % p == 0:
        raise BadPrime(f"{p} divides the conductor")
    A, B, u = curve.short_model()
    if (4 * A ** 3 + 27 * B ** 2) % p == 0:
        raise BadPrime("short model is singular mod p")
    K = truncation if truncation is not None else m + 8
    W = m + K + 12
    mod = p ** W
    Q = [B % mod, A % mod, 0, 1]
    Qp = [A % mod, 0, 3]                      # Q'
    # Bezout: S Q + T Q' = 1 mod p^W (disc is a p-unit)
    S, T = _bezout_cubic(A, B, p, mod)
    # E = Q(x^p) - Q(x)^p
    Qxp = [0] * (3 * p + 1)
    Qxp[0] = B % mod
    Qxp[p] = A % mod
    Qxp[3 * p] = 1
    Qpow = [1]
    for _ in range(p):
        Qpow = _poly_mulmod_int(Qpow, Q, mod)
    E = [(a - b) % mod for a, b in
         zip(Qxp + [0] * len(Qpow), Qpow + [0] * len(Qxp))]
    _poly_trim(E)
    inv4 = pow(4, -1, mod)
    cols = []
    for i in (0, 1):
        # terms per pole level m_k = p k + (p-1)/2
        levels = {}
        Ek = [1]
        for k in range(K + 1):
            if k:
                Ek = _poly_mulmod_int(Ek, E, mod)
            coef = p * comb(2 * k, k) % mod * pow(inv4, k, mod) % mod
            if k % 2:
                coef = (-coef) % mod
            deg_shift = p * (i + 1) - 1
            poly = [0] * deg_shift + [c * coef % mod for c in Ek]
            levels[p * k + (p - 1) // 2] = _poly_trim(poly)
        col, shift = _reduce_to_basis(levels, Q, Qp, S, T, A, B, p, mod, W)
        avail = W - shift - 2
        if avail < m:
            raise PrecisionExhausted(
                f"only {avail} digits available after shift {shift}; raise W")
        entries = []
        for c in col:
            entries.append(PadicElement.from_rational(
                p, Fraction(_balanced(c, mod), p ** shift), m))
        cols.append(entries)
    matrix = ((cols[0][0], cols[1][0]), (cols[0][1], cols[1][1]))
    return FrobeniusData(p, m, A, B, u, matrix, K)


def _balanced(c, mod):
    c %= mod
    return c - mod if c > mod // 2 else c


def _bezout_cubic(A, B, p, mod):
    """S, T with S Q + T Q' = 1 for Q = x^3 + Ax + B over Z/p^W:
    (27B - 18A x) Q + (4A^2 - 9B x + 6A x^2) Q' = 4A^3 + 27B^2."""
    scale = (4 * A ** 3 + 27 * B ** 2) % mod
    sinv = pow(scale, -1, mod)
    S = [27 * B * sinv % mod, -18 * A * sinv % mod]
    T = [4 * A * A * sinv % mod, -9 * B * sinv % mod, 6 * A * sinv % mod]
    return S, T


def _reduce_to_basis(levels, Q, Qp, S, T, A, B, p, mod, W):
    """Reduce sum_m P_m(x) y^-(2m+1) dx to c0 dx/y + c1 x dx/y.

    Returns ([c0, c1], shift) with true values c_i / p^shift.
    """
    top = max(levels)
    acc = []            # running poly at the current level
    shift = 0
    for mlvl in range(top, 0, -1):
        if mlvl in levels:
            acc = _acc_add(acc, levels[mlvl], 0, shift, p, mod)
            shift = max(shift, 0)
        if not acc:
            continue
        # A = a Q + b Q'; b = (A T) mod Q, a = (A - b Q') / Q
        bpoly = _poly_divmod_monic(_poly_mulmod_int(acc, T, mod), Q, mod)[1]
        bq = _poly_mulmod_int(bpoly, Qp, mod)
        resid = [(x - y) % mod for x, y in
                 zip(acc + [0] * len(bq), bq + [0] * len(acc))]
        apoly, rem = _poly_divmod_monic(resid, Q, mod)
        assert all(r == 0 for r in rem), "Bezout split failed"
        # b Q' y^-(2m+1) == (2/(2m-1)) b' y^-(2m-1) mod exact forms
        bprime = [(j * bpoly[j]) % mod for j in range(1, len(bpoly))]
        odd = 2 * mlvl - 1
        j = 0
        while odd % p == 0:
            odd //= p
            j += 1
        winv = pow(odd, -1, mod)
        contrib = [2 * c * winv % mod for c in bprime]
        if j:
            # division by p^j: raise the global shift
            apoly = [c * pow(p, j, mod) % mod for c in apoly]
            acc_new = apoly
            acc_new = _acc_add(acc_new, contrib, 0, 0, p, mod)
            acc = acc_new
            shift += j
        else:
            acc = _acc_add(apoly, contrib, 0, 0, p, mod)
        _poly_trim(acc)
    final = levels.get(0, [])
    acc = _acc_add(acc, final, 0, shift, p, mod)
    _poly_trim(acc)
    # degree reduction at level 0: x^s == -[A(2s-3) x^(s-2) + 2B(s-2) x^(s-3)] / (2s-1)
    while len(acc) > 2:
        s = len(acc) - 1
        c = acc[s] % mod
        acc = acc[:s]
        if c == 0:
            continue
        odd = 2 * s - 1
        j = 0
        while odd % p == 0:
            odd //= p
            j += 1
        winv = pow(odd, -1, mod)
        if j:
            acc = [x * pow(p, j, mod) % mod for x in acc]
            shift += j
        t = (-c * winv) % mod
        acc[s - 2] = (acc[s - 2] + t * A * (2 * s - 3)) % mod
        if s >= 3:
            acc[s - 3] = (acc[s - 3] + t * 2 * B * (s - 2)) % mod
    acc = acc + [0] * (2 - len(acc))
    return acc[:2], shift


def _acc_add(acc, other, s_other, s_acc, p, mod):
    """acc (at shift s_acc) + other (at shift s_other), aligned to max shift.

    Only used with s_other <= s_acc; scales `other` up accordingly.
    """
    if s_other > s_acc:
        raise AssertionError("shift alignment order violated")
    scale = pow(p, s_acc - s_other, mod)
    out = list(acc) + [0] * max(0, len(other) - len(acc))
    for i, c in enumerate(other):
        if c:
            out[i] = (out[i] + c * scale) % mod
    return out


# -- pairing and eigen-data ------------------------------------------------------


def pairing_matrix(F: FrobeniusData) -> tuple:
    """The algebraic cup product on {omega, eta}, normalized [omega, eta] = 1;
    antisymmetric."""
    one = Fraction(1)
    return ((Fraction(0), one), (-one, Fraction(0)))


def pair(x, y):
    """[a omega + b eta, c omega + d eta] = a d - b c (coordinates may be
    PadicElements or Fractions)."""
    (a, b), (c, d) = x, y
    return a * d - b * c


@dataclass(frozen=True)
class EigenData:
    """phi = F/p eigen-decomposition of the Neron class, the dual class
    omega*, the pairing value [omega_beta, omega_alpha], and delta_E."""

    alpha: PadicElement
    beta: PadicElement
    omega_alpha: tuple
    omega_beta: tuple
    omega_star: tuple
    pairing_value: PadicElement
    delta_E: PadicElement

    def to_json(self):
        return {"alpha": self.alpha.to_json(), "beta": self.beta.to_json(),
                "omega_alpha": [c.to_json() for c in self.omega_alpha],
                "omega_beta": [c.to_json() for c in self.omega_beta],
                "omega_star": [str(c) for c in self.omega_star],
                "pairing_value": self.pairing_value.to_json(),
                "delta_E": self.delta_E.to_json()}


def eigen_data(F: FrobeniusData, C_E: GZConstant) -> EigenData:
    """alpha = pi, beta = -pi (supersingular a_p = 0); decomposes the Neron
    class u*omega into F-eigencomponents (F acts by beta on D_alpha, where
    phi = F/p acts by 1/alpha), solves [omega_cris, omega*] = 1 in the
    eta-direction, and sets delta_E = [omega_beta, omega_alpha] / C(E)."""
    p = F.p
    prec_pi = 2 * F.precision
    alpha = PadicElement.pi(p, prec_pi)
    beta = -alpha
    u = F.u
    O = (PadicElement.from_rational(p, u, prec_pi, e=2),
         PadicElement.zero(p, prec_pi, e=2))
    Fx = tuple(F.entry(i, 0).to_extension() for i in (0, 1))
    Fy = tuple(F.entry(i, 1).to_extension() for i in (0, 1))

    def apply_F(v):
        return (Fx[0] * v[0] + Fy[0] * v[1], Fx[1] * v[0] + Fy[1] * v[1])

    FO = apply_F(O)
    denom = beta - alpha
    omega_alpha = tuple((fo - alpha * o) / denom for fo, o in zip(FO, O))
    omega_beta = tuple((fo - beta * o) / (-denom) for fo, o in zip(FO, O))
    if all(c.is_zero() for c in omega_alpha) or all(c.is_zero() for c in omega_beta):
        raise DegenerateDecomposition(
            "Neron class is a Frobenius eigenvector: impossible for a_p = 0")
    pairing_value = pair(omega_beta, omega_alpha)
    omega_star = (Fraction(0), 1 / u)
    delta = pairing_value / Fraction(C_E.value)
    return EigenData(alpha, beta, omega_alpha, omega_beta, omega_star,
                     pairing_value, delta)
