# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the Mazur-Tate Riemann sums.

The inner loop writes {oo -> a/m} as unimodular paths via the continued
fraction of a/m and sums the plus-symbol values of the corresponding Manin
generators.  All symbol values are integers (numerators over one common
denominator); sums stay well inside int64 (callers enforce the bound).
"""

ctypedef long long i64

cdef extern from *:
    ctypedef long long i128 "__int128"


cdef inline i64 eval_path(i64 a, i64 m, int N, const int* tab, const i64* vals) nogil:
    """Numerator of Phi(a/m) for 0 < a < m, gcd(a, m) = 1."""
    cdef i64 total, x, y, c, t, q_prev, q_cur, q_next
    cdef int sign, ci
    # k = 0 segment: Manin generator (-1 : 0)
    total = vals[tab[(N - 1) * N]]
    x = m
    y = a
    q_prev = 0
    q_cur = 1
    sign = 1
    while y > 0:
        c = x / y
        t = x - c * y
        x = y
        y = t
        q_next = ((c % N) * q_cur + q_prev) % N
        if sign > 0:
            ci = <int>q_next
        else:
            ci = <int>((N - q_next) % N)
        total += vals[tab[ci * N + <int>q_cur]]
        q_prev = q_cur
        q_cur = q_next
        sign = -sign
    return total


def branch_sums_range(i64 m, i64 gamma, i64 u_start, i64 j_count,
                      i64[::1] teich, int N, int[::1] p1_index,
                      i64[::1] values, i64[::1] out):
    """out[j] = sum over Teichmuller units tau of Phi(tau * gamma^j * u_start / m),
    numerators only, for j = 0 .. j_count-1."""
    cdef i64 u = u_start % m
    cdef i64 j, a, s
    cdef Py_ssize_t i, nt = teich.shape[0]
    cdef const int* tab = &p1_index[0]
    cdef const i64* vals = &values[0]
    with nogil:
        for j in range(j_count):
            s = 0
            for i in range(nt):
                a = <i64>((<i128>teich[i] * <i128>u) % m)
                s += eval_path(a, m, N, tab, vals)
            out[j] = s
            u = <i64>((<i128>u * <i128>gamma) % m)


def eval_many(i64 m, i64[::1] a_values, int N, int[::1] p1_index,
              i64[::1] values, i64[::1] out):
    """out[i] = numerator of Phi(a_values[i] / m)."""
    cdef Py_ssize_t i, n = a_values.shape[0]
    cdef const int* tab = &p1_index[0]
    cdef const i64* vals = &values[0]
    with nogil:
        for i in range(n):
            out[i] = eval_path(a_values[i] % m, m, N, tab, vals)


def binom_column_sums(i64[::1] d, i64 j_count, i64 period, int kmax, i64 pM):
    """sums[k] = sum_{j < j_count} d[j % period] * C(j, k)  (mod pM), k <= kmax.

    Pascal-row update keeps C(j, k) mod pM without divisions; products go
    through 128-bit intermediates.
    """
    cdef i64 j, dj
    cdef int k
    cdef i64[64] row
    cdef i64[64] sums
    if kmax >= 63:
        raise ValueError("kmax too large")
    for k in range(kmax + 1):
        row[k] = 0
        sums[k] = 0
    row[0] = 1 % pM
    with nogil:
        for j in range(j_count):
            dj = d[j % period]
            if dj != 0:
                for k in range(kmax + 1):
                    sums[k] = <i64>((sums[k] + <i128>dj * row[k]) % pM)
            for k in range(kmax, 0, -1):
                row[k] = (row[k] + row[k - 1]) % pM
    result = []
    for k in range(kmax + 1):
        result.append((sums[k] % pM + pM) % pM)
    return result
