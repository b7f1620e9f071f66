"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Both backends implement identical semantics over int64 numerators; outputs are
exact integers, so backend and thread count never change results.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..padic import teichmuller_lift

try:
    from . import _theta_cy as _impl
    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _theta_py as _impl
    BACKEND = "python"

from . import _theta_py as _pure

_I64_MAX = 2 ** 62


def backend_name():
    return BACKEND


def _guard(p, n, values):
    m = p ** (n + 1)
    if m >= _I64_MAX:
        raise OverflowError(f"modulus p^(n+1) = {m} exceeds the kernel range")
    vmax = int(np.abs(np.asarray(values, dtype=np.int64)).max()) if len(values) else 0
    # <= ~64 continued-fraction segments per evaluation at desk scale
    if (p - 1) * 64 * max(vmax, 1) >= _I64_MAX:
        raise OverflowError("symbol numerators too large for the int64 kernel")
    return m


def theta_branch_sums(p, n, level, p1_index, values, threads=1, backend=None):
    """Trivial tame branch sums of theta_n: an int64 array s of length p^n with

        s[j] = sum over units tau in the Teichmuller fiber of
               numerator of Phi(tau * (1+p)^j / p^(n+1)).

    `values` are the symbol numerators per P^1(Z/level) index over one common
    denominator; the output shares that denominator.
    """
    m = _guard(p, n, values)
    impl = _select(backend)
    teich = np.array([teichmuller_lift(a, p, n + 1) for a in range(1, p)],
                     dtype=np.int64)
    count = p ** n
    out = np.zeros(count, dtype=np.int64)
    values = np.ascontiguousarray(values, dtype=np.int64)
    p1_index = np.ascontiguousarray(p1_index, dtype=np.int32)
    gamma = 1 + p
    threads = max(1, int(threads))
    if threads == 1 or impl is _pure or count < 4 * threads:
        impl.branch_sums_range(m, gamma, 1, count, teich, level, p1_index, values, out)
        return out
    bounds = [count * i // threads for i in range(threads + 1)]
    def run(i):
        j0, j1 = bounds[i], bounds[i + 1]
        impl.branch_sums_range(m, gamma, pow(gamma, j0, m), j1 - j0,
                               teich, level, p1_index, values, out[j0:j1])
    with ThreadPoolExecutor(max_workers=threads) as ex:
        list(ex.map(run, range(threads)))
    return out


def eval_symbol_numerators(m, a_values, level, p1_index, values, backend=None):
    """Numerators of Phi(a/m) for each a (over the shared denominator)."""
    impl = _select(backend)
    a_arr = np.ascontiguousarray(a_values, dtype=np.int64)
    out = np.zeros(len(a_arr), dtype=np.int64)
    impl.eval_many(m, a_arr, level,
                   np.ascontiguousarray(p1_index, dtype=np.int32),
                   np.ascontiguousarray(values, dtype=np.int64), out)
    return out


def binom_column_sums(d, j_count, period, kmax, p, M, backend=None):
    """[sum_j d[j % period] * C(j, k) mod p^M for k <= kmax], j < j_count.

    p^M must fit in int64 for the compiled backend; the caller picks M.
    """
    pM = p ** M
    impl = _select(backend)
    if impl is not _pure and pM >= _I64_MAX:
        impl = _pure
    d = np.ascontiguousarray(d, dtype=np.int64)
    return [int(x) for x in impl.binom_column_sums(d, int(j_count), int(period), kmax, pM)]


def _select(backend):
    if backend in (None, BACKEND):
        return _impl
    if backend == "python":
        return _pure
    if backend == "cython":
        if BACKEND != "cython":
            raise RuntimeError("compiled kernel unavailable")
        return _impl
    raise ValueError(f"unknown backend {backend!r}")


def default_threads():
    env = os.environ.get("PRPOINT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1
