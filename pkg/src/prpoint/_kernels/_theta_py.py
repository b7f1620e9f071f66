"""Pure-Python fallback for the Mazur-Tate sum kernels.

Mirrors _theta_cy exactly; Python integers make overflow a non-issue, at
roughly two orders of magnitude in speed.
"""


def _eval_path(a, m, N, tab, vals):
    total = vals[tab[(N - 1) * N]]
    x, y = m, a
    q_prev, q_cur = 0, 1
    sign = 1
    while y > 0:
        c, t = divmod(x, y)
        x, y = y, t
        q_next = ((c % N) * q_cur + q_prev) % N
        ci = q_next if sign > 0 else (N - q_next) % N
        total += vals[tab[ci * N + q_cur]]
        q_prev, q_cur = q_cur, q_next
        sign = -sign
    return total


def branch_sums_range(m, gamma, u_start, j_count, teich, N, p1_index, values, out):
    tab = p1_index.tolist() if hasattr(p1_index, "tolist") else list(p1_index)
    vals = values.tolist() if hasattr(values, "tolist") else list(values)
    tch = teich.tolist() if hasattr(teich, "tolist") else list(teich)
    u = u_start % m
    for j in range(j_count):
        s = 0
        for t in tch:
            s += _eval_path(t * u % m, m, N, tab, vals)
        out[j] = s
        u = u * gamma % m


def eval_many(m, a_values, N, p1_index, values, out):
    tab = p1_index.tolist() if hasattr(p1_index, "tolist") else list(p1_index)
    vals = values.tolist() if hasattr(values, "tolist") else list(values)
    avs = a_values.tolist() if hasattr(a_values, "tolist") else list(a_values)
    for i, a in enumerate(avs):
        out[i] = _eval_path(a % m, m, N, tab, vals)


def binom_column_sums(d, j_count, period, kmax, pM):
    dl = d.tolist() if hasattr(d, "tolist") else list(d)
    row = [0] * (kmax + 1)
    row[0] = 1 % pM
    sums = [0] * (kmax + 1)
    for j in range(j_count):
        dj = dl[j % period]
        if dj:
            for k in range(kmax + 1):
                sums[k] = (sums[k] + dj * row[k]) % pM
        for k in range(kmax, 0, -1):
            row[k] = (row[k] + row[k - 1]) % pM
    return [s % pM for s in sums]
