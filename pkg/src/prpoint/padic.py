"""Capped-absolute-precision arithmetic in Q_p and in the ramified quadratic
extension Q_p(pi), pi^2 = -p.

Every element carries its absolute precision; each operation computes the
guaranteed output precision (zealous interval rules):

    prec(x + y) = min(prec x, prec y)
    prec(x * y) = min(v(x) + prec y, v(y) + prec x)

Internally everything is measured in pi-units: v(pi) = 1 and v(p) = 2 when
e = 2, plain p-adic units when e = 1.  An element is stored through its
coordinates (c0, c1) in the basis {1, pi}; coordinate valuations have distinct
parities, so the valuation of a sum is exact (no hidden cancellation).

Values are immutable and all operations are pure.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import sqrt_mod_prime, is_square_mod_prime

INF = float("inf")


class PadicError(ArithmeticError):
    pass


class DivisionByIndistinguishableZero(PadicError):
    pass


class OddValuation(PadicError):
    pass


class NonResidue(PadicError):
    pass


class NotAUnit(PadicError):
    pass


def _vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(q: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    return _vp(q.numerator, p) - _vp(q.denominator, p)


def teichmuller_lift(a: int, p: int, M: int) -> int:
    """The (p-1)-st root of unity congruent to a mod p, computed mod p^M."""
    pm = p ** M
    t = a % pm
    if t % p == 0:
        raise NotAUnit("Teichmuller lift of a non-unit")
    for _ in range(M + 1):
        t_new = pow(t, p, pm)
        if t_new == t:
            break
        t = t_new
    return t


class PadicElement:
    """Element of Q_p (e=1) or Q_p(pi) (e=2) at finite absolute precision.

    `prec` is the absolute precision in pi-units (p-units when e=1).  Each
    component is None (indistinguishable from 0 at this precision) or a pair
    (v, u): the exact representative u * p^v with u a unit mod p^(absprec-v).
    """

    __slots__ = ("p", "e", "prec", "parts")

    def __init__(self, p, e, prec, parts):
        if e not in (1, 2):
            raise ValueError("ramification index must be 1 or 2")
        self.p = p
        self.e = e
        self.prec = int(prec)
        norm = []
        for i in range(e):
            part = parts[i] if i < len(parts) else None
            norm.append(self._normalize_part(part, self._part_absprec(i)))
        self.parts = tuple(norm)

    def _part_absprec(self, i):
        # p-adic absolute precision carried by the coefficient of pi^i
        if self.e == 1:
            return self.prec
        return (self.prec - i + 1) // 2

    def _normalize_part(self, part, absprec):
        if part is None:
            return None
        v, u = part
        if u == 0 or v >= absprec:
            return None
        w = _vp(u, self.p)
        if w:
            v += w
            u //= self.p ** w
            if v >= absprec:
                return None
        u %= self.p ** (absprec - v)
        if u == 0:
            return None
        return (v, u)

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_rational(cls, p, q, prec, e=1):
        """Embed an exact rational at absolute precision prec (pi-units)."""
        q = Fraction(q)
        if q == 0:
            return cls(p, e, prec, (None, None))
        v = vp_fraction(q, p)
        un = q.numerator // p ** _vp(q.numerator, p)
        ud = q.denominator // p ** _vp(q.denominator, p)
        absprec = prec if e == 1 else (prec + 1) // 2
        rel = absprec - v
        if rel <= 0:
            return cls(p, e, prec, (None, None))
        m = un * pow(ud, -1, p ** rel) % p ** rel
        return cls(p, e, prec, ((v, m), None))

    @classmethod
    def zero(cls, p, prec, e=1):
        return cls(p, e, prec, (None, None))

    @classmethod
    def one(cls, p, prec, e=1):
        return cls.from_rational(p, 1, prec, e)

    @classmethod
    def pi(cls, p, prec):
        """The uniformizer pi of Q_p(pi), pi^2 = -p."""
        return cls(p, 2, prec, (None, (0, 1)))

    # -- inspection ----------------------------------------------------------

    def is_zero(self):
        """Indistinguishable from zero at this precision."""
        return all(part is None for part in self.parts)

    def v_pi(self):
        """Valuation in pi-units; returns prec (a floor) for zero."""
        vals = [part[0] * self.e + i
                for i, part in enumerate(self.parts) if part is not None]
        return min(vals) if vals else self.prec

    def valuation(self):
        """Valuation in p-units as a Fraction; INF for indistinguishable zero."""
        if self.is_zero():
            return INF
        v = Fraction(self.v_pi(), self.e)
        return v

    def precision(self):
        """Absolute precision in p-units as a Fraction."""
        return Fraction(self.prec, self.e)

    def relative_precision(self):
        return self.prec - self.v_pi() if not self.is_zero() else 0

    def component(self, i):
        """Coefficient of pi^i as an e=1 element at its own precision."""
        return PadicElement(self.p, 1, self._part_absprec(i), (self.parts[i],))

    def residue(self):
        """Leading digit: residue of x / pi^v(x) mod p."""
        if self.is_zero():
            raise PadicError("residue of indistinguishable zero")
        v = self.v_pi()
        part = self.parts[v % self.e if self.e == 2 else 0]
        return part[1] % self.p

    def pi_part_valuation(self):
        """pi-valuation of the pi-coordinate; prec when indistinguishable."""
        if self.e == 1 or self.parts[1] is None:
            return self.prec
        return 2 * self.parts[1][0] + 1

    # -- precision management --------------------------------------------------

    def cap(self, prec):
        """Reduce absolute precision to at most prec (pi-units)."""
        prec = int(prec)
        if prec >= self.prec:
            return self
        return PadicElement(self.p, self.e, prec, self.parts)

    def to_extension(self):
        """View an e=1 element inside Q_p(pi)."""
        if self.e == 2:
            return self
        return PadicElement(self.p, 2, 2 * self.prec, (self.parts[0], None))

    def to_base(self, tol=0):
        """Coerce to Q_p; the pi-coordinate must be indistinguishable from 0,
        or within `tol` pi-units of the precision ceiling."""
        if self.e == 1:
            return self
        ppv = self.pi_part_valuation()
        if ppv < self.prec - tol:
            raise PadicError(
                f"pi-coordinate distinguishable from 0 (valuation {ppv} < {self.prec})")
        return PadicElement(self.p, 1, self.prec // 2, (self.parts[0],))

    # -- exact representatives ---------------------------------------------------

    def _exact_parts(self):
        out = []
        for part in self.parts:
            if part is None:
                out.append(Fraction(0))
            else:
                v, u = part
                out.append(Fraction(u) * Fraction(self.p) ** v)
        while len(out) < 2:
            out.append(Fraction(0))
        return out[0], out[1]

    def exact_representative(self):
        """Exact rational representative (e=1 only)."""
        if self.e != 1:
            raise PadicError("exact_representative requires e = 1")
        c0, _ = self._exact_parts()
        return c0

    # -- arithmetic ----------------------------------------------------------------

    def _coerce(self, other):
        if self.p != other.p:
            raise PadicError("prime mismatch")
        a, b = self, other
        if a.e != b.e:
            a, b = a.to_extension(), b.to_extension()
        return a, b

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self
            other = PadicElement.from_rational(self.p, other, self.prec, self.e)
        if not isinstance(other, PadicElement):
            return NotImplemented
        a, b = self._coerce(other)
        prec = min(a.prec, b.prec)
        parts = [_part_add(pa, pb, a.p) for pa, pb in zip(a.parts, b.parts)]
        return PadicElement(a.p, a.e, prec, parts)

    __radd__ = __add__

    def __neg__(self):
        parts = [None if part is None else (part[0], -part[1]) for part in self.parts]
        return PadicElement(self.p, self.e, self.prec, parts)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__add__(-Fraction(other))
        if not isinstance(other, PadicElement):
            return NotImplemented
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return self.__neg__().__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._mul_exact(Fraction(other))
        if not isinstance(other, PadicElement):
            return NotImplemented
        a, b = self._coerce(other)
        prec = min(a.v_pi() + b.prec, b.v_pi() + a.prec)
        a0, a1 = a._exact_parts()
        b0, b1 = b._exact_parts()
        if a.e == 1:
            return _from_exact_pair(a.p, 1, prec, a0 * b0, Fraction(0))
        c0 = a0 * b0 - a.p * a1 * b1
        c1 = a0 * b1 + a1 * b0
        return _from_exact_pair(a.p, 2, prec, c0, c1)

    __rmul__ = __mul__

    def _mul_exact(self, q: Fraction):
        """Multiply by an exact rational: precision shifts, no digit loss."""
        if q == 0:
            return PadicElement.zero(self.p, self.prec, self.e)
        prec = self.prec + self.e * vp_fraction(q, self.p)
        c0, c1 = self._exact_parts()
        return _from_exact_pair(self.p, self.e, prec, c0 * q, c1 * q)

    def shift_pi(self, k: int):
        """Multiply by pi^k exactly (e=2); precision shifts by k."""
        if self.e != 2:
            raise PadicError("shift_pi requires e = 2")
        c0, c1 = self._exact_parts()
        prec = self.prec + k
        if k >= 0:
            for _ in range(k):
                c0, c1 = -self.p * c1, c0
        else:
            for _ in range(-k):
                c0, c1 = c1, -c0 / self.p
        return _from_exact_pair(self.p, 2, prec, c0, c1)

    def inverse(self):
        if self.is_zero():
            raise DivisionByIndistinguishableZero(
                "divisor indistinguishable from zero at its precision")
        v = self.v_pi()
        prec = self.prec - 2 * v
        if self.e == 1:
            pv, u = self.parts[0]
            rel = self.prec - pv
            inv = pow(u, -1, self.p ** rel)
            return PadicElement(self.p, 1, prec, ((-pv, inv),))
        # x^-1 = conj(x) / Norm(x), Norm(x) = c0^2 + p*c1^2 lies in Q_p
        c0, c1 = self._exact_parts()
        norm = c0 * c0 + self.p * c1 * c1
        vn = vp_fraction(norm, self.p)
        rel = (self.prec - v + 1) // 2 + 1
        un = norm.numerator // self.p ** _vp(norm.numerator, self.p)
        ud = norm.denominator // self.p ** _vp(norm.denominator, self.p)
        inv_unit = pow(un, -1, self.p ** rel) * ud % self.p ** rel
        ninv = Fraction(inv_unit) * Fraction(self.p) ** (-vn)
        return _from_exact_pair(self.p, 2, prec, c0 * ninv, -c1 * ninv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError("division by exact zero")
            return self._mul_exact(1 / q)
        if not isinstance(other, PadicElement):
            return NotImplemented
        a, b = self._coerce(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse()._mul_exact(Fraction(other))

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PadicElement.one(self.p, self.prec, self.e)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        """Indistinguishability at the joint precision."""
        if isinstance(other, (int, Fraction)):
            other = PadicElement.from_rational(self.p, other, self.prec, self.e)
        if not isinstance(other, PadicElement):
            return NotImplemented
        a, b = self._coerce(other)
        return (a - b).is_zero()

    __hash__ = None

    def galois_conjugate(self):
        """Image under pi -> -pi; the identity on the e=1 sublayer."""
        if self.e == 1:
            return self
        c0, c1 = self.parts
        return PadicElement(self.p, 2, self.prec,
                            (c0, None if c1 is None else (c1[0], -c1[1])))

    # -- analytic operations ---------------------------------------------------------

    def sqrt(self):
        """Both square roots (r, -r) by Hensel lifting from the residue field.

        Requires p odd, even valuation, and a square leading digit.
        """
        if self.is_zero():
            raise PadicError("sqrt of indistinguishable zero")
        if self.p == 2:
            raise PadicError("p = 2 unsupported")
        v = self.v_pi()
        if v % 2:
            raise OddValuation(
                f"valuation {Fraction(v, self.e)} (p-units) is odd")
        if self.e == 1:
            u = self._mul_exact(Fraction(self.p) ** (-v))
        else:
            u = self.shift_pi(-v)
        r0 = u.residue()
        if not is_square_mod_prime(r0, self.p):
            raise NonResidue(f"unit part {r0} mod {self.p} is not a square")
        s = PadicElement.from_rational(self.p, sqrt_mod_prime(r0, self.p), u.prec, u.e)
        # Newton: s <- (s + u/s)/2, quadratically convergent, self-correcting
        for _ in range(u.prec.bit_length() + 3):
            s_next = (s + u / s)._mul_exact(Fraction(1, 2)).cap(u.prec)
            if (s_next - s).is_zero():
                s = s_next
                break
            s = s_next
        if self.e == 1:
            root = s._mul_exact(Fraction(self.p) ** (v // 2))
        else:
            root = s.shift_pi(v // 2)
        root = root.cap(self.prec - v // 2)
        return root, -root

    def iwasawa_log(self):
        """log of the principal-unit part via log(1+x) = x - x^2/2 + ...

        The Teichmuller component contributes 0 (Iwasawa branch, log p = 0).
        Requires a unit of Q_p (e = 1).  The series is evaluated on the exact
        rational representative, so the output carries the full input
        precision.
        """
        if self.e != 1:
            raise NotAUnit("iwasawa_log requires a Q_p unit (e = 1)")
        if self.is_zero() or self.v_pi() != 0:
            raise NotAUnit("iwasawa_log requires a unit (valuation 0)")
        p, N = self.p, self.prec
        omega = teichmuller_lift(self.parts[0][1], p, N)
        principal = self.exact_representative() * Fraction(
            pow(omega, -1, p ** N) % p ** N)
        x = principal - 1
        if x == 0 or vp_fraction(x, p) >= N:
            return PadicElement.zero(p, N, 1)
        w = vp_fraction(x, p)
        total = Fraction(0)
        term = Fraction(1)
        k = 1
        while (k - 1) * w < N + 4:
            term *= x
            total += Fraction((-1) ** (k + 1), k) * term
            k += 1
        return PadicElement.from_rational(p, total, N, 1)

    # -- serialization ------------------------------------------------------------

    def pi_digits(self):
        """Base-p digits of the pi-adic (base-p for e=1) expansion, least
        significant first, starting at pi^v."""
        if self.is_zero():
            return []
        v = self.v_pi()
        p = self.p
        if self.e == 1:
            pv, u = self.parts[0]
            rel = self.prec - pv
            m = u % p ** rel
            digits = []
            for _ in range(rel):
                digits.append(m % p)
                m //= p
            return digits
        c0, c1 = self._exact_parts()
        for _ in range(max(0, v)):
            c0, c1 = c1, -c0 / p
        for _ in range(max(0, -v)):
            c0, c1 = -p * c1, c0
        digits = []
        for _ in range(self.prec - v):
            d = c0.numerator * pow(c0.denominator, -1, p) % p
            digits.append(int(d))
            c0 = c0 - d
            c0, c1 = c1, -c0 / p
        return digits

    def to_json(self):
        if self.is_zero():
            return {"p": self.p, "e": self.e, "valuation": None,
                    "digits": [], "precision": _frac_str(self.precision())}
        return {"p": self.p, "e": self.e,
                "valuation": _frac_str(self.valuation()),
                "digits": self.pi_digits(),
                "precision": _frac_str(self.precision())}

    @classmethod
    def from_json(cls, obj):
        p, e = obj["p"], obj["e"]
        prec_pi = int(_parse_frac(obj["precision"]) * e)
        if obj["valuation"] is None:
            return cls.zero(p, prec_pi, e)
        v = int(_parse_frac(obj["valuation"]) * e)
        c0, c1 = Fraction(0), Fraction(0)
        for i, d in enumerate(obj["digits"]):
            k = v + i
            if e == 1:
                c0 += d * Fraction(p) ** k
            else:
                half, par = divmod(k, 2)
                w = Fraction(-p) ** half
                if par == 0:
                    c0 += d * w
                else:
                    c1 += d * w
        return _from_exact_pair(p, e, prec_pi, c0, c1)

    def __repr__(self):
        sym = "pi" if self.e == 2 else str(self.p)
        if self.is_zero():
            return f"O({sym}^{self.prec})"
        digs = self.pi_digits()
        v = self.v_pi()
        terms = []
        for i, d in enumerate(digs):
            if d:
                k = v + i
                terms.append(f"{d}*{sym}^{k}" if k else str(d))
            if len(terms) >= 8:
                terms.append("...")
                break
        return " + ".join(terms) + f" + O({sym}^{self.prec})"


def _part_add(pa, pb, p):
    if pa is None:
        return pb
    if pb is None:
        return pa
    va, ua = pa
    vb, ub = pb
    v = min(va, vb)
    m = ua * p ** (va - v) + ub * p ** (vb - v)
    return None if m == 0 else (v, m)


def _from_exact_pair(p, e, prec, c0, c1):
    """Build an element at precision prec from exact rational coordinates."""
    parts = []
    for i, c in enumerate((Fraction(c0), Fraction(c1))[:e]):
        if c == 0:
            parts.append(None)
            continue
        v = vp_fraction(c, p)
        un = c.numerator // p ** _vp(c.numerator, p)
        ud = c.denominator // p ** _vp(c.denominator, p)
        absprec = prec if e == 1 else (prec - i + 1) // 2
        rel = absprec - v
        if rel <= 0:
            parts.append(None)
            continue
        m = un * pow(ud, -1, p ** rel) % p ** rel
        parts.append((v, m))
    return PadicElement(p, e, prec, parts)


def _frac_str(x):
    if x == INF:
        return "inf"
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _parse_frac(s):
    if s == "inf":
        return INF
    if "/" in s:
        n, d = s.split("/")
        return Fraction(int(n), int(d))
    return Fraction(int(s))
