import random

from fractions import Fraction

import pytest

from prpoint.exact import (
    NoReconstruction,
    QMatrix,
    contfrac_convergents,
    kernel_basis,
    rational_reconstruct,
    sqrt_mod_prime,
)


def test_kernel_identity_trivial():
    assert kernel_basis(QMatrix.identity(2)) == []


def test_kernel_zero_matrix_full():
    basis = kernel_basis(QMatrix.zero(2, 2))
    assert len(basis) == 2
    # spans Q^2: the two vectors are independent
    a, b = basis
    assert a[0] * b[1] - a[1] * b[0] != 0


def test_kernel_rank_one():
    M = QMatrix.from_rows([[1, 2], [2, 4]])
    basis = kernel_basis(M)
    assert len(basis) == 1
    v = basis[0]
    # spans the same line as (2, -1): 1*2 + 2*(-1) = 0
    assert v[0] * Fraction(-1) - v[1] * Fraction(2) == 0
    assert all(sum(M[i, j] * v[j] for j in range(2)) == 0 for i in range(2))


def test_kernel_exactness_random():
    rng = random.Random(7)
    for _ in range(25):
        rows = rng.randrange(1, 5)
        cols = rng.randrange(1, 5)
        M = QMatrix(rows, cols,
                    [Fraction(rng.randrange(-9, 10), rng.randrange(1, 7))
                     for _ in range(rows * cols)])
        for v in kernel_basis(M):
            assert all(x == 0 for x in M.mul_vec(v))


def test_reconstruct_7_thirds():
    # x = 7 * 3^-1 mod 5^6; inverse of 3 mod 15625 is 10417
    M = 5 ** 6
    inv3 = pow(3, -1, M)
    assert inv3 == 10417
    x = 7 * inv3 % M
    assert rational_reconstruct(x, M, 100) == Fraction(7, 3)
    assert (7 - x * 3) % M == 0


def test_reconstruct_small_integer():
    assert rational_reconstruct(5, 10 ** 6 + 3, 100) == Fraction(5)


def test_reconstruct_signed_small():
    # exhaustive search over |u|, v <= 10 finds exactly the multiples of -3/2
    M = 10 ** 6 + 3
    found = [(u, v) for v in range(1, 11) for u in range(-10, 11)
             if (u - 500000 * v) % M == 0]
    assert found == [(-3, 2), (-6, 4), (-9, 6)]
    assert rational_reconstruct(500000, M, 10) == Fraction(-3, 2)


def test_reconstruct_failure():
    # exhaustive: no u/v with |u|, v <= 10 matches 123456 mod 10^6+3
    M = 10 ** 6 + 3
    for v in range(1, 11):
        for u in range(-10, 11):
            assert (u - 123456 * v) % M != 0
    with pytest.raises(NoReconstruction):
        rational_reconstruct(123456, M, 10)


def test_reconstruct_left_inverse_random():
    rng = random.Random(11)
    M = 5 ** 12
    B = 1000  # 2 B^2 < M
    for _ in range(200):
        u = rng.randrange(-B, B + 1)
        v = rng.randrange(1, B + 1)
        from math import gcd
        g = gcd(abs(u), v)
        if g:
            u //= g
            v //= g
        if v % 5 == 0:
            continue
        x = u * pow(v, -1, M) % M
        assert rational_reconstruct(x, M, B) == Fraction(u, v)


def test_contfrac_examples():
    assert contfrac_convergents(Fraction(10, 7)) == [Fraction(1), Fraction(3, 2), Fraction(10, 7)]
    assert contfrac_convergents(4) == [Fraction(4)]
    assert contfrac_convergents(0) == [Fraction(0)]


def test_contfrac_determinant_property():
    rng = random.Random(3)
    for _ in range(1000):
        q = Fraction(rng.randrange(-10 ** 6, 10 ** 6), rng.randrange(1, 10 ** 6))
        convs = contfrac_convergents(q)
        assert convs[-1] == q
        prev_n, prev_d = (convs[0].numerator, convs[0].denominator)
        for c in convs[1:]:
            det = c.numerator * prev_d - prev_n * c.denominator
            assert det in (1, -1)
            prev_n, prev_d = c.numerator, c.denominator


def test_sqrt_mod_prime():
    rng = random.Random(5)
    for p in (5, 7, 11, 13, 17, 19, 101):
        for _ in range(20):
            a = rng.randrange(1, p)
            r = sqrt_mod_prime(a * a % p, p)
            assert r * r % p == a * a % p


def test_charpoly_2x2():
    M = QMatrix.from_rows([[1, 2], [3, 4]])
    assert M.charpoly() == [Fraction(-2), Fraction(-5), Fraction(1)]
    assert M.det() == Fraction(-2)
    assert M.trace() == Fraction(5)
