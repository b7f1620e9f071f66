"""Exact rational arithmetic: dense linear algebra over Q, continued fractions,
and rational reconstruction from modular data.

All values are immutable and all functions are pure.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

Rat = Fraction


class NoReconstruction(ValueError):
    """No rational within the requested bound matches the residue."""


class QMatrix:
    """Dense matrix over Q, row-major entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        entries = [Fraction(e) for e in entries]
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.rows = rows
        self.cols = cols
        self.entries = tuple(entries)

    @classmethod
    def from_rows(cls, row_list):
        rows = len(row_list)
        cols = len(row_list[0]) if rows else 0
        flat = [e for row in row_list for e in row]
        return cls(rows, cols, flat)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [Fraction(int(i == j)) for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_list(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def mul_vec(self, v):
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(self[i, j] * v[j] for j in range(self.cols)) for i in range(self.rows)]

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other[k, j] for k in range(self.cols)))
        return QMatrix(self.rows, other.cols, out)

    def transpose(self):
        return QMatrix(self.cols, self.rows,
                       [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def sub(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return QMatrix(self.rows, self.cols,
                       [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, c):
        c = Fraction(c)
        return QMatrix(self.rows, self.cols, [c * a for a in self.entries])

    def __eq__(self, other):
        return (isinstance(other, QMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols})"

    def trace(self):
        if self.rows != self.cols:
            raise ValueError("trace of non-square matrix")
        return sum(self[i, i] for i in range(self.rows))

    def det(self):
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        # Bareiss on a scaled integer copy; denominator restored at the end
        rows, den = _integer_rows(self)
        n = self.rows
        sign = 1
        prev = 1
        for k in range(n - 1):
            if rows[k][k] == 0:
                for i in range(k + 1, n):
                    if rows[i][k] != 0:
                        rows[k], rows[i] = rows[i], rows[k]
                        sign = -sign
                        break
                else:
                    return Fraction(0)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
                rows[i][k] = 0
            prev = rows[k][k]
        d = Fraction(sign * rows[n - 1][n - 1])
        for row_den in den:
            d /= row_den
        return d

    def charpoly(self):
        """Coefficients [c_0, ..., c_n] of det(X*I - M), via Faddeev-LeVerrier."""
        n = self.rows
        if n != self.cols:
            raise ValueError("charpoly of non-square matrix")
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[n] = Fraction(1)
        M = QMatrix.identity(n)
        for k in range(1, n + 1):
            AM = self.mul(M)
            c = -AM.trace() / k
            coeffs[n - k] = c
            M = QMatrix(n, n, [AM[a, b] + (c if a == b else 0)
                               for a in range(n) for b in range(n)])
        return coeffs


def _integer_rows(M):
    """Scale each row of M to integers; returns (rows, per-row denominators)."""
    rows = []
    dens = []
    for i in range(M.rows):
        r = M.row(i)
        d = 1
        for e in r:
            d = d * e.denominator // gcd(d, e.denominator)
        rows.append([int(e * d) for e in r])
        dens.append(Fraction(1, d))
    return rows, dens


def rref(row_list):
    """Reduced row echelon form over Q.

    Returns (pivot_cols, reduced_rows) where reduced_rows contains only the
    nonzero rows, each with leading 1 at its pivot column.
    """
    rows = [[Fraction(e) for e in r] for r in row_list]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [e * inv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots, rows[:r]


def kernel_basis(M: QMatrix):
    """Basis of the right kernel {v : M v = 0}, as a list of Fraction vectors.

    Fraction-free (Bareiss-style) forward elimination on integer-scaled rows,
    then exact back-substitution; returns cols - rank vectors.
    """
    rows, _ = _integer_rows(M)
    ncols = M.cols
    pivots, red = rref([[Fraction(e) for e in row] for row in rows])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for prow, pc in zip(red, pivots):
            v[pc] = -prow[fc]
        basis.append(v)
    return basis


def bareiss_rank(row_list):
    """Rank of an integer matrix by fraction-free elimination."""
    rows = [list(r) for r in row_list]
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for c in range(n):
        piv = None
        for i in range(rank, m):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, m):
            for j in range(c + 1, n):
                rows[i][j] = (rows[i][j] * rows[rank][c] - rows[i][c] * rows[rank][j]) // prev
            rows[i][c] = 0
        prev = rows[rank][c]
        rank += 1
    return rank


def rational_reconstruct(x: int, M: int, bound: int) -> Fraction:
    """Recover u/v from x mod M with |u| <= bound, 0 < v <= bound.

    Half-extended Euclid, truncated when the remainder crosses the bound.
    Under 2*bound^2 < M the answer is unique when it exists.
    """
    if not (0 <= x < M):
        raise ValueError("residue out of range")
    if bound < 1:
        raise NoReconstruction(f"bound {bound} too small")
    r0, r1 = M, x
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if r1 == 0 or abs(t1) > bound or gcd(abs(t1), M) != 1:
        raise NoReconstruction(f"no u/v with |u|,v <= {bound} matches {x} mod {M}")
    u, v = r1, t1
    if v < 0:
        u, v = -u, -v
    if (u - x * v) % M != 0:
        raise NoReconstruction("reconstruction check failed")
    return Fraction(u, v)


def reconstruct_float(x: float, max_den: int = 10 ** 6, tol: float = 1e-9) -> Fraction:
    """Best rational approximation of a float with denominator <= max_den.

    Raises NoReconstruction when no convergent is within tol.
    """
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) > tol:
        raise NoReconstruction(f"{x} is not close to a rational with denominator <= {max_den}")
    return f


def contfrac_convergents(q) -> list:
    """All continued-fraction convergents of q, ending in q itself.

    Consecutive convergents p_k/q_k satisfy p_k q_{k-1} - p_{k-1} q_k = (-1)^(k-1).
    """
    q = Fraction(q)
    a, b = q.numerator, q.denominator
    p_prev, p_cur = 1, a // b
    q_prev, q_cur = 0, 1
    convs = [Fraction(p_cur, 1)]
    a, b = b, a - (a // b) * b
    while b:
        c = a // b
        a, b = b, a - c * b
        p_prev, p_cur = p_cur, c * p_cur + p_prev
        q_prev, q_cur = q_cur, c * q_cur + q_prev
        convs.append(Fraction(p_cur, q_cur))
    return convs


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a modulo an odd prime p (Tonelli-Shanks).

    Raises ValueError when a is a non-residue.
    """
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # write p-1 = q 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def is_square_mod_prime(a: int, p: int) -> bool:
    a %= p
    return a == 0 or pow(a, (p - 1) // 2, p) == 1


def isqrt_exact(n: int):
    """Integer square root when n is a perfect square, else None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None
