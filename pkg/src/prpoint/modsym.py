"""Weight-2 modular symbols for Gamma_0(N) over Q.

Manin-symbol presentation: generators are classes (c:d) in P^1(Z/N) subject to
the two-term (x + xS) and three-term (x + xT + xT^2) relations.  Paths are
reduced to generator sums by Manin's continued-fraction trick; the curve's
plus eigenfunctional is isolated by good Hecke operators and pinned against
numerically computed period integrals divided by the real period.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath as mp
import numpy as np

from .archlfun import DPS, anlist, real_period
from .elliptic import CurveData, ap
from .exact import QMatrix, kernel_basis, reconstruct_float, rref

INFINITY_CUSP = object()


class BadLevelPrime(ValueError):
    pass


class EigenlineNotIsolated(RuntimeError):
    pass


class NormalizationMismatch(RuntimeError):
    pass


class P1List:
    """P^1(Z/N): normalized representatives and an (c, d) -> index table."""

    def __init__(self, N: int):
        self.N = N
        table = np.full(N * N, -1, dtype=np.int32)
        reps = []
        if N == 1:
            reps.append((0, 0))
            table[0] = 0
        else:
            for c in range(N):
                for d in range(N):
                    if table[c * N + d] != -1 or gcd(gcd(c, d), N) != 1:
                        continue
                    idx = len(reps)
                    reps.append((c, d))
                    for u in range(1, N):
                        if gcd(u, N) == 1:
                            table[(c * u % N) * N + (d * u % N)] = idx
        self.reps = reps
        self.table = table

    def __len__(self):
        return len(self.reps)

    def index(self, c: int, d: int) -> int:
        if self.N == 1:
            return 0
        i = int(self.table[(c % self.N) * self.N + (d % self.N)])
        if i < 0:
            raise ValueError(f"({c}:{d}) is not a point of P^1(Z/{self.N})")
        return i

    def lift_to_sl2(self, i: int):
        """An SL_2(Z) matrix (a, b, c, d) whose bottom row represents class i."""
        c, d = self.reps[i]
        N = self.N
        if N == 1 or (c % N == 0 and d % N == 1):
            return (1, 0, 0, 1)
        c %= N
        d %= N
        if c == 0:
            c = N  # class (0 : d), d a non-1 unit, kept integral via c = N
        while gcd(c, d) != 1:
            d += N
        g, x, y = _xgcd(d, c)
        assert g == 1
        a, b = x, -y
        assert a * d - b * c == 1
        return (a, b, c, d)


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def manin_path(r, N: int, p1: P1List):
    """Generator indices of the unimodular decomposition of {oo -> r}.

    r is a Fraction (or INFINITY_CUSP for the empty path).  Segment k of the
    continued-fraction chain contributes the class ((-1)^(k-1) q_k : q_{k-1}).
    """
    if r is INFINITY_CUSP:
        return []
    r = Fraction(r)
    a, b = r.numerator, r.denominator
    # convergents p_k/q_k; k = 0 term is (a0 : 1) preceded by 1/0
    out = [p1.index(-1, 0)]
    a0, rem = divmod(a, b)
    q_prev, q_cur = 0, 1
    sign = 1
    x, y = b, rem
    while y > 0:
        c = x // y
        x, y = y, x - c * y
        q_next = c * q_cur + q_prev
        out.append(p1.index(sign * q_next, q_cur))
        q_prev, q_cur = q_cur, q_next
        sign = -sign
    return out


def path_vector(x, y, N: int, p1: P1List):
    """{x -> y} as a sparse generator-coefficient dict via
    {x -> y} = {oo -> y} - {oo -> x}."""
    vec = {}
    for i in manin_path(y, N, p1):
        vec[i] = vec.get(i, 0) + 1
    for i in manin_path(x, N, p1):
        vec[i] = vec.get(i, 0) - 1
    return vec


@dataclass(frozen=True)
class ManinSpace:
    """Presentation of the weight-2 modular symbol space for Gamma_0(N)."""

    N: int
    p1: P1List
    relation_rows: tuple        # integer relation rows over the generators
    basis: tuple                # generator indices of the free columns
    gen_expr: tuple             # per generator: tuple of Fractions over basis

    @property
    def dimension(self):
        return len(self.basis)

    def expr(self, i):
        return self.gen_expr[i]

    def vector_to_basis(self, vec: dict):
        """Sparse generator-coefficient dict -> dense coordinates over the basis."""
        out = [Fraction(0)] * self.dimension
        for i, c in vec.items():
            if c == 0:
                continue
            for j, e in enumerate(self.gen_expr[i]):
                if e:
                    out[j] += c * e
        return out

    def relation_matrix(self) -> QMatrix:
        return QMatrix.from_rows([list(r) for r in self.relation_rows])


def build_space(N: int) -> ManinSpace:
    """Enumerate P^1(Z/N), assemble the S- and T-relations, and compute the
    quotient basis by exact elimination."""
    if N < 1:
        raise ValueError("level must be >= 1")
    p1 = P1List(N)
    if N == 1:
        # boundary-only degenerate case: keep the single symbol free
        return ManinSpace(1, p1, (), (0,), ((Fraction(1),),))
    n = len(p1)
    rows = []
    seen = set()
    for i, (c, d) in enumerate(p1.reps):
        # x + xS, S: (c, d) -> (d, -c)
        j = p1.index(d, -c)
        row = [0] * n
        row[i] += 1
        row[j] += 1
        key = tuple(row)
        if key not in seen:
            seen.add(key)
            rows.append(row)
        # x + xT + xT^2, T: (c, d) -> (d, -c-d)
        j = p1.index(d, -c - d)
        k = p1.index(-c - d, c)
        row = [0] * n
        row[i] += 1
        row[j] += 1
        row[k] += 1
        key = tuple(row)
        if key not in seen:
            seen.add(key)
            rows.append(row)
    pivots, red = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = tuple(free)
    col_of = {c: j for j, c in enumerate(free)}
    gen_expr = []
    pivot_row = {c: r for r, c in enumerate(pivots)}
    for i in range(n):
        if i in col_of:
            e = [Fraction(0)] * len(free)
            e[col_of[i]] = Fraction(1)
        else:
            row = red[pivot_row[i]]
            e = [-row[f] for f in free]
        gen_expr.append(tuple(e))
    return ManinSpace(N, p1, tuple(tuple(r) for r in rows), basis, tuple(gen_expr))


def _operator_matrix(space: ManinSpace, images) -> QMatrix:
    """Matrix of a linear operator given the image basis coordinates of each
    basis vector (columns)."""
    d = space.dimension
    entries = [Fraction(0)] * (d * d)
    for j, img in enumerate(images):
        for i in range(d):
            entries[i * d + j] = img[i]
    return QMatrix(d, d, entries)


def hecke_matrix(space: ManinSpace, ell: int) -> QMatrix:
    """T_ell on the quotient basis for a good prime ell (Heilbronn-style
    determinant-ell action, realized through the coset paths
    {x -> y} -> {ell x -> ell y} + sum_k {(x+k)/ell -> (y+k)/ell})."""
    if space.N % ell == 0:
        raise BadLevelPrime(f"{ell} divides the level; U_ell is not implemented")
    images = []
    for i in space.basis:
        a, b, c, d = space.p1.lift_to_sl2(i)
        x = INFINITY_CUSP if c == 0 else Fraction(a, c)      # g(oo)
        y = INFINITY_CUSP if d == 0 else Fraction(b, d)      # g(0)
        acc = {}
        for delta in _hecke_cosets(ell):
            xx = _moebius(delta, x)
            yy = _moebius(delta, y)
            for idx, coeff in path_vector(yy, xx, space.N, space.p1).items():
                acc[idx] = acc.get(idx, 0) + coeff
        images.append(space.vector_to_basis(acc))
    return _operator_matrix(space, images)


def star_matrix(space: ManinSpace) -> QMatrix:
    """The star involution {x -> y} -> {-x -> -y}; on Manin symbols
    (c : d) -> (-c : d)."""
    images = []
    for i in space.basis:
        c, d = space.p1.reps[i]
        j = space.p1.index(-c, d)
        images.append(space.vector_to_basis({j: 1}))
    return _operator_matrix(space, images)


def _hecke_cosets(ell):
    cosets = [((ell, 0), (0, 1))]
    for k in range(ell):
        cosets.append(((1, k), (0, ell)))
    return cosets


def _moebius(mat, z):
    (a, b), (c, d) = mat
    if z is INFINITY_CUSP:
        return INFINITY_CUSP if c == 0 else Fraction(a, c)
    num = a * z + b
    den = c * z + d
    if den == 0:
        return INFINITY_CUSP
    return num / den


@dataclass(frozen=True)
class PlusSymbol:
    """The normalized plus modular symbol r -> [r]^+ of a rational newform:
    a Q-valued functional on the Manin quotient, pinned so that values match
    Re(period integral)/Omega^+."""

    curve: CurveData
    space: ManinSpace
    gen_values: tuple           # Fraction value on each P^1 generator
    denominator: int            # common denominator of gen_values
    numerators: np.ndarray      # int64, gen_values * denominator
    normalization: dict         # cusp used, float ratio, residual
    hecke_bound: int

    def eval(self, r) -> Fraction:
        """[r]^+ by Manin's trick; exact rational."""
        total = Fraction(0)
        for i in manin_path(Fraction(r), self.space.N, self.space.p1):
            total += self.gen_values[i]
        return total

    def eval_path(self, x, y) -> Fraction:
        total = Fraction(0)
        for i, c in path_vector(x, y, self.space.N, self.space.p1).items():
            total += c * self.gen_values[i]
        return total

    def scaled(self, factor: Fraction) -> "PlusSymbol":
        """Rescaled symbol (normalization perturbation hook for tests)."""
        factor = Fraction(factor)
        vals = tuple(v * factor for v in self.gen_values)
        den = 1
        for v in vals:
            den = den * v.denominator // gcd(den, v.denominator)
        nums = np.array([int(v * den) for v in vals], dtype=np.int64)
        rec = dict(self.normalization)
        rec["scaled_by"] = str(factor)
        return PlusSymbol(self.curve, self.space, vals, den, nums, rec, self.hecke_bound)


def eval_cusp(symbol: PlusSymbol, r) -> Fraction:
    return symbol.eval(r)


def _period_integral(curve: CurveData, an, gamma, terms):
    """2 pi i * integral of f from z0 to gamma(z0) along the symmetric point
    z0 = (-d + i)/c for gamma = [[a, b], [c, d]]: equals the modular-symbol
    period of {oo -> gamma(oo)}."""
    a, b, c, d = gamma
    with mp.workdps(DPS):
        z0 = mp.mpc(-d, 1) / c
        gz0 = (a * z0 + b) / (c * z0 + d)
        return _eichler_antiderivative(an, gz0, terms) - _eichler_antiderivative(an, z0, terms)


def _eichler_antiderivative(an, z, terms):
    """F(z) = sum a_n/n e^(2 pi i n z), the antiderivative of 2 pi i f."""
    q = mp.exp(2j * mp.pi * z)
    qn = mp.mpc(1)
    total = mp.mpc(0)
    for n in range(1, terms + 1):
        qn *= q
        if an[n]:
            total += mp.mpf(an[n]) / n * qn
    return total


def eigen_plus_symbol(curve: CurveData, space: ManinSpace = None,
                      hecke_bound: int = 50, terms: int = None) -> PlusSymbol:
    """Isolate the 1-dimensional plus eigenline for the curve's a_ell system
    and normalize against numeric period integrals.

    Raises EigenlineNotIsolated when good primes up to hecke_bound do not cut
    the line down to dimension 1, NormalizationMismatch when the numeric
    ratio fails to reconstruct as a small rational consistently on two cusps.
    """
    if space is None:
        space = build_space(curve.conductor)
    if space.N != curve.conductor:
        raise ValueError("space level must equal the curve conductor")
    d = space.dimension
    constraints = []
    star = star_matrix(space).transpose()
    for i in range(d):
        row = [star[i, j] - (1 if i == j else 0) for j in range(d)]
        constraints.append(row)
    ker = kernel_basis(QMatrix.from_rows(constraints))
    ell = 1
    while len(ker) > 1:
        ell = _next_good_prime(ell, space.N)
        if ell > hecke_bound:
            raise EigenlineNotIsolated(
                f"eigenline still {len(ker)}-dimensional at ell = {ell}; "
                "raise hecke_bound")
        a_ell = ap(curve, ell)
        T = hecke_matrix(space, ell).transpose()
        for i in range(d):
            row = [T[i, j] - (a_ell if i == j else 0) for j in range(d)]
            constraints.append(row)
        ker = kernel_basis(QMatrix.from_rows(constraints))
    if not ker:
        raise EigenlineNotIsolated("eigen system has no solution: wrong curve/level?")
    phi_basis = ker[0]
    # integer-primitive scaling
    den = 1
    for v in phi_basis:
        den = den * v.denominator // gcd(den, v.denominator)
    phi_basis = [v * den for v in phi_basis]
    g = 0
    for v in phi_basis:
        g = gcd(g, v.numerator)
    if g > 1:
        phi_basis = [v / g for v in phi_basis]
    raw_gen_values = [sum(e * phi_basis[j] for j, e in enumerate(space.gen_expr[i]))
                      for i in range(len(space.p1))]

    def raw_eval(r):
        return sum(raw_gen_values[i] for i in manin_path(r, space.N, space.p1))

    if terms is None:
        terms = max(2000, 12 * space.N)
    an = anlist(curve, terms)
    om, _ = real_period(curve)
    ratio = None
    used = None
    with mp.workdps(DPS):
        for a in range(1, space.N):
            if gcd(a, space.N) != 1:
                continue
            dd = pow(a, -1, space.N)
            gamma = (a, (a * dd - 1) // space.N, space.N, dd)
            raw = raw_eval(Fraction(a, space.N))
            if raw == 0:
                continue
            num = mp.re(_period_integral(curve, an, gamma, terms)) / om
            ratio = float(num) / float(raw)
            used = (a, space.N, float(num))
            break
        if ratio is None:
            raise NormalizationMismatch("symbol vanishes on all test cusps")
        rho = reconstruct_float(ratio, max_den=10 ** 4,
                                tol=1e-7 * max(1.0, abs(ratio)))
        # cross-check on a second cusp
        checked = False
        for a in range(used[0] + 1, space.N):
            if gcd(a, space.N) != 1:
                continue
            dd = pow(a, -1, space.N)
            gamma = (a, (a * dd - 1) // space.N, space.N, dd)
            raw = raw_eval(Fraction(a, space.N))
            num = mp.re(_period_integral(curve, an, gamma, terms)) / om
            if abs(float(num) - float(rho) * float(raw)) > 1e-6 * max(1.0, abs(float(num))):
                raise NormalizationMismatch(
                    f"period ratio inconsistent at cusp {a}/{space.N}")
            checked = True
            break
    gen_values = tuple(Fraction(v) * rho for v in raw_gen_values)
    D = 1
    for v in gen_values:
        D = D * v.denominator // gcd(D, v.denominator)
    nums = np.array([int(v * D) for v in gen_values], dtype=np.int64)
    record = {"cusp": f"{used[0]}/{used[1]}", "float_value": used[2],
              "ratio": str(rho), "cross_checked": checked}
    return PlusSymbol(curve, space, gen_values, D, nums, record, hecke_bound)


def _next_good_prime(ell, N):
    from .elliptic import _primes_up_to
    for p in _primes_up_to(max(2 * ell + 10, 60)):
        if p > ell and N % p != 0:
            return p
    raise RuntimeError("prime search exhausted")
