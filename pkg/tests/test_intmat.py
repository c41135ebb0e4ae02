import random

import numpy as np

from prymrep import intmat


def rand_matrix(rng, m, n, lo=-9, hi=9):
    return intmat.arr([[rng.randint(lo, hi) for _ in range(n)]
                       for _ in range(m)])


def rand_unimodular(rng, n, ops=8):
    M = intmat.eye(n)
    for _ in range(ops):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            M[i, :] = M[i, :] + rng.choice([-2, -1, 1, 2]) * M[j, :]
    return M


def test_smith_normal_form_random():
    rng = random.Random(11)
    for _ in range(60):
        m, n = rng.randint(1, 7), rng.randint(1, 7)
        A = rand_matrix(rng, m, n)
        U, D, V, Uinv = intmat.smith_normal_form(A)
        assert intmat.mat_eq(U @ A @ V, D)
        assert intmat.mat_eq(U @ Uinv, intmat.eye(m))
        assert abs(intmat.det(U)) == 1
        assert abs(intmat.det(V)) == 1
        d = intmat.snf_diagonal(D)
        for i in range(len(d) - 1):
            if d[i + 1] != 0:
                assert d[i] != 0 and d[i + 1] % d[i] == 0
        # off-diagonal zero
        for i in range(m):
            for j in range(n):
                if i != j:
                    assert D[i, j] == 0


def test_kernel_and_rank():
    rng = random.Random(12)
    for _ in range(40):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = rand_matrix(rng, m, n, -4, 4)
        K = intmat.kernel_basis(A)
        assert intmat.is_zero(A @ K) or K.shape[1] == 0
        assert intmat.rank(A) + K.shape[1] == n


def test_det_against_numpy():
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(1, 5)
        A = rand_matrix(rng, n, n, -5, 5)
        expected = round(np.linalg.det(A.astype(float)))
        assert intmat.det(A) == expected


def test_column_space_data():
    rng = random.Random(14)
    for _ in range(40):
        m, n = rng.randint(1, 6), rng.randint(0, 6)
        A = rand_matrix(rng, m, n, -3, 3) if n else intmat.zeros(m, 0)
        r, sat, comp, proj, torsion = intmat.column_space_data(A)
        assert r == intmat.rank(A)
        assert sat.shape == (m, r) and comp.shape == (m, m - r)
        assert intmat.is_zero(proj @ sat) or r == 0 or m == r
        if m - r:
            assert intmat.mat_eq(proj @ comp, intmat.eye(m - r))
        # [sat | comp] is a basis of Z^m
        assert intmat.lattice_equal(np.concatenate([sat, comp], axis=1),
                                    intmat.eye(m))
        # each column of A is an integer combination of sat columns
        assert intmat.lattice_equal(np.concatenate([A, sat], axis=1), sat) \
            or r == 0


def test_lattice_equal_invariance():
    rng = random.Random(15)
    for _ in range(30):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        A = rand_matrix(rng, m, n, -4, 4)
        W = rand_unimodular(rng, n)
        assert intmat.lattice_equal(A, A @ W)
        # scaling one column changes the lattice unless column is zero
        B = A.copy()
        col = rng.randrange(n)
        if not intmat.is_zero(B[:, col].reshape(-1, 1)):
            B[:, col] = 2 * B[:, col]
            assert not intmat.lattice_equal(A, B)


def test_inverse_unimodular():
    rng = random.Random(16)
    for _ in range(20):
        n = rng.randint(1, 6)
        M = rand_unimodular(rng, n)
        assert intmat.mat_eq(M @ intmat.inverse_unimodular(M), intmat.eye(n))
