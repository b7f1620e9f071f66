"""Mazur-Tate elements and the alpha/beta-stabilized p-adic L-series.

theta_n = sum over units a mod p^(n+1) of Phi(a/p^(n+1)) [a], exactly over Q.
Stabilization forms root^-(n+1) (theta_n - root^-1 nu(theta_{n-1})) and
rewrites the trivial tame branch in T through [gamma^j] -> (1+T)^j for the
topological generator gamma with cyclotomic image 1+p.

Depth-n data only determines the T^k coefficient (k >= 1) of the measure
limit up to the telescoping bound; every emitted coefficient is capped at
min(arithmetic precision, measure guarantee), so downstream arithmetic stays
honest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import _kernels
from .padic import PadicElement, teichmuller_lift
from .modsym import PlusSymbol


class RootMismatch(ValueError):
    pass


@dataclass(frozen=True)
class MazurTateElement:
    """Group-ring element over Q: coefficient map a -> c_a on (Z/p^(n+1))^*."""

    p: int
    n: int
    coeffs: dict

    @property
    def modulus(self):
        return self.p ** (self.n + 1)

    def __getitem__(self, a):
        return self.coeffs[a % self.modulus]


def mazur_tate(phi: PlusSymbol, p: int, n: int, backend=None) -> MazurTateElement:
    """theta_n attached to the plus symbol, exact over Q."""
    if phi.curve.conductor % p == 0:
        raise ValueError("p must be a good prime")
    if n < 0:
        raise ValueError("depth must be >= 0")
    m = p ** (n + 1)
    units = [a for a in range(1, m) if a % p != 0]
    nums = _kernels.eval_symbol_numerators(
        m, units, phi.space.N, phi.space.p1.table, phi.numerators, backend=backend)
    D = phi.denominator
    coeffs = {a: Fraction(int(v), D) for a, v in zip(units, nums)}
    return MazurTateElement(p, n, coeffs)


def project(theta: MazurTateElement) -> MazurTateElement:
    """Natural projection to depth n-1: sums coefficients over fibers of
    (Z/p^(n+1))^* -> (Z/p^n)^*."""
    if theta.n < 1:
        raise ValueError("cannot project below depth 0")
    m = theta.p ** theta.n
    out = {}
    for a, c in theta.coeffs.items():
        out[a % m] = out.get(a % m, Fraction(0)) + c
    return MazurTateElement(theta.p, theta.n - 1, out)


def nu_lift(theta: MazurTateElement) -> MazurTateElement:
    """Norm-compatibility lift to depth n+1: the coefficient at a is the
    depth-n coefficient at a mod p^(n+1)."""
    p = theta.p
    m_new = p ** (theta.n + 2)
    m_old = theta.modulus
    out = {a: theta.coeffs[a % m_old] for a in range(1, m_new) if a % p != 0}
    return MazurTateElement(p, theta.n + 1, out)


@dataclass(frozen=True)
class BranchData:
    """Trivial-tame-branch sums of theta_n: sums[j] / denominator is the
    total theta-coefficient over the Teichmuller fiber of gamma^j."""

    p: int
    n: int
    sums: np.ndarray
    denominator: int


def branch_data(phi: PlusSymbol, p: int, n: int, threads: int = 1,
                backend=None) -> BranchData:
    sums = _kernels.theta_branch_sums(
        p, n, phi.space.N, phi.space.p1.table, phi.numerators,
        threads=threads, backend=backend)
    return BranchData(p, n, sums, phi.denominator)


def branch_from_theta(theta: MazurTateElement) -> BranchData:
    """Branch sums recomputed directly from a coefficient map (small depths;
    the kernel route is tested against this)."""
    p, n = theta.p, theta.n
    m = theta.modulus
    gamma = 1 + p
    D = 1
    for c in theta.coeffs.values():
        D = D * c.denominator // gcd(D, c.denominator)
    sums = np.zeros(p ** n, dtype=np.int64)
    teich = [teichmuller_lift(a, p, n + 1) for a in range(1, p)]
    u = 1
    for j in range(p ** n):
        s = Fraction(0)
        for t in teich:
            s += theta.coeffs[t * u % m]
        sums[j] = int(s * D)
        u = u * gamma % m
    return BranchData(p, n, sums, D)


def unit_root(p: int, a_p: int, prec: int) -> PadicElement:
    """The unit root of X^2 - a_p X + p in Z_p (good ordinary: p does not
    divide a_p), by Newton iteration."""
    if a_p % p == 0:
        raise ValueError("unit root requires a_p a unit mod p")
    x = a_p % p
    pk = p ** prec
    for _ in range(prec.bit_length() + 2):
        f = (x * x - a_p * x + p) % pk
        fp = (2 * x - a_p) % pk
        x = (x - f * pow(fp, -1, pk)) % pk
    assert (x * x - a_p * x + p) % pk == 0
    return PadicElement.from_rational(p, x, prec)


def supersingular_roots(p: int, prec_pi: int):
    """alpha = pi, beta = -pi: the roots of X^2 + p for a_p = 0."""
    alpha = PadicElement.pi(p, prec_pi)
    return alpha, -alpha


@dataclass(frozen=True)
class PadicLSeries:
    """Truncated T-expansion of the stabilized p-adic L-series on the trivial
    tame branch; coefficient k carries its honest absolute precision."""

    p: int
    root: PadicElement
    depth: int
    a_p: int
    coeffs: tuple           # PadicElement, T^0 .. T^kmax
    guarantees: tuple       # measure-truncation bound per coefficient (pi-units)
    denominator: int

    def coefficient(self, k):
        return self.coeffs[k]

    def value_at_zero(self):
        return self.coeffs[0]

    def degree(self):
        return len(self.coeffs) - 1

    def evaluate(self, T: PadicElement) -> PadicElement:
        """Horner evaluation of the truncated T-polynomial."""
        acc = PadicElement.zero(self.p, self.coeffs[-1].prec, self.coeffs[-1].e)
        for c in reversed(self.coeffs):
            acc = acc * T + c
        return acc

    def to_json(self):
        return {"p": self.p, "depth": self.depth, "a_p": self.a_p,
                "root": self.root.to_json(),
                "coefficients": [c.to_json() for c in self.coeffs],
                "guarantees_pi_units": [g if g is None or g < 10 ** 9 else None
                                        for g in self.guarantees]}


def _ilog(k, p):
    j = 0
    while p ** (j + 1) <= k:
        j += 1
    return j


def stabilize(thetas, root: PadicElement, a_p: int, kmax: int = 8,
              prec: int = None, backend=None) -> PadicLSeries:
    """Stabilized series from depth data: thetas is a sequence of
    MazurTateElement or BranchData for consecutive depths ending at n >= 1;
    only the last two depths enter root^-(n+1)(theta_n - root^-1 nu(theta_{n-1})).
    """
    data = [t if isinstance(t, BranchData) else branch_from_theta(t) for t in thetas]
    cur, prev = data[-1], data[-2]
    if cur.n != prev.n + 1:
        raise ValueError("need consecutive depths n-1, n")
    p, n = cur.p, cur.n
    if prec is None:
        prec = max(2 * n, n + 6)
    quad = root * root - a_p * root + p
    if not quad.is_zero():
        raise RootMismatch(
            f"root does not satisfy X^2 - {a_p} X + {p} = 0 at its precision")
    D = cur.denominator
    if D != prev.denominator:
        L = D * prev.denominator // gcd(D, prev.denominator)
        cur_sums = cur.sums * (L // D)
        prev_sums = prev.sums * (L // prev.denominator)
        D = L
    else:
        cur_sums, prev_sums = cur.sums, prev.sums
    vD = 0
    while D % p ** (vD + 1) == 0:
        vD += 1
    e = root.e
    # modulus exponent: target precision + stabilization loss + guard digits
    M = prec + ((n + 3) // 2 if e == 2 else 0) + vD + 3
    kmax = min(kmax, p ** n - 1)
    c_cur = _kernels.binom_column_sums(cur_sums, p ** n, p ** n, kmax, p, M,
                                       backend=backend)
    c_prev = _kernels.binom_column_sums(prev_sums, p ** n, p ** (n - 1), kmax, p, M,
                                        backend=backend)
    prec_pi = e * (M - vD)
    # rebuild the root at full working precision (its sign must match)
    if e == 2:
        cand = PadicElement.pi(p, prec_pi + e * (n + 3))
        root_hi = cand if (cand.cap(root.prec) - root).is_zero() else -cand
    else:
        root_hi = unit_root(p, a_p, M + n + 3)
    inv = root_hi.inverse()
    scale = inv ** (n + 1)
    vroot = Fraction(1, 2) if e == 2 else Fraction(0)
    coeffs = []
    guarantees = []
    for k in range(kmax + 1):
        ck = PadicElement.from_rational(p, Fraction(c_cur[k], D), prec_pi, e)
        chk = PadicElement.from_rational(p, Fraction(c_prev[k], D), prec_pi, e)
        val = scale * (ck - inv * chk)
        if k == 0:
            g = None
        else:
            g_p = Fraction(n) - (n + 2) * vroot - vD - _ilog(k, p)
            g = max(int(e * g_p), 0)
            val = val.cap(g)
        coeffs.append(val)
        guarantees.append(g)
    return PadicLSeries(p, root, n, a_p, tuple(coeffs), tuple(guarantees), D)


def _select_root(phi, p, depth, prec, root_label):
    from .elliptic import ap as ap_fn
    a_p = ap_fn(phi.curve, p)
    if a_p % p == 0:
        if a_p != 0:
            raise ValueError("supersingular with a_p != 0 needs p < 5; unsupported")
        alpha, beta = supersingular_roots(p, 2 * (prec + depth + 8))
        return a_p, (alpha if root_label in ("alpha", "pi") else beta)
    if root_label == "beta":
        raise ValueError(
            "critical-slope stabilization at an ordinary prime is not "
            "computed: the root^-(n+1) denominators exhaust all precision")
    return a_p, unit_root(p, a_p, prec + depth + 8)


def padic_l_series(phi: PlusSymbol, p: int, depth: int, root_label: str = "alpha",
                   prec: int = None, kmax: int = 8, threads: int = 1,
                   backend=None) -> PadicLSeries:
    """End-to-end: branch sums at depths n-1, n, then stabilization.

    root_label: "alpha"/"beta" = +-pi for supersingular a_p = 0; "unit" (or
    "alpha" at an ordinary prime) = the unit root.  The critical-slope beta
    series at an ordinary prime is rejected: the beta^-(n+1) denominators
    destroy every digit of a bounded-coefficient computation.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if prec is None:
        prec = max(2 * depth, depth + 6)
    a_p, root = _select_root(phi, p, depth, prec, root_label)
    cur = branch_data(phi, p, depth, threads=threads, backend=backend)
    prev = branch_data(phi, p, depth - 1, threads=threads, backend=backend)
    return stabilize([prev, cur], root, a_p, kmax=kmax, prec=prec, backend=backend)


def padic_l_series_pair(phi: PlusSymbol, p: int, depth: int, prec: int = None,
                        kmax: int = 8, threads: int = 1, backend=None):
    """Both stabilized series (alpha, beta) off one set of branch sums.

    The theta data is root-independent; the two stabilizations still run
    separately, so the conjugacy of the outputs remains a real check.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if prec is None:
        prec = max(2 * depth, depth + 6)
    a_p, alpha = _select_root(phi, p, depth, prec, "alpha")
    _, beta = _select_root(phi, p, depth, prec, "beta")
    cur = branch_data(phi, p, depth, threads=threads, backend=backend)
    prev = branch_data(phi, p, depth - 1, threads=threads, backend=backend)
    return (stabilize([prev, cur], alpha, a_p, kmax=kmax, prec=prec, backend=backend),
            stabilize([prev, cur], beta, a_p, kmax=kmax, prec=prec, backend=backend))


def derivative_at_triv(series: PadicLSeries) -> PadicElement:
    """L'_{p,root}(E, 1) = F'(0) * log_p(1+p) under T = (1+p)^(s-1) - 1."""
    c1 = series.coefficient(1)
    p = series.p
    log_gamma = PadicElement.from_rational(
        p, 1 + p, max(2, c1.prec // c1.e + 3)).iwasawa_log()
    return c1 * log_gamma


@dataclass(frozen=True)
class VanishingOrder:
    order: int          # smallest k with T^k coefficient distinguishable, or None
    exact: bool         # False when every computed coefficient vanished
    searched: int       # number of coefficients inspected

    def __str__(self):
        if self.order is None:
            return f">= {self.searched}"
        return str(self.order)


def order_of_vanishing(series: PadicLSeries) -> VanishingOrder:
    """Smallest k with the T^k coefficient distinguishable from 0 at its
    honest precision; flagged inexact when everything vanished."""
    for k in range(len(series.coeffs)):
        if not series.coefficient(k).is_zero():
            return VanishingOrder(k, True, k + 1)
    return VanishingOrder(None, False, len(series.coeffs))
