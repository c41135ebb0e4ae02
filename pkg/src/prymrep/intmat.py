"""Exact integer matrix routines on numpy object arrays (python ints).

Everything here is deterministic: fixed pivot rules, no randomness, no
floating point.  Matrices are numpy arrays with dtype=object so entries are
arbitrary-precision.
"""

from __future__ import annotations

import numpy as np


def arr(rows) -> np.ndarray:
    A = np.array(rows, dtype=object)
    if A.ndim == 1:
        A = A.reshape(1, -1) if len(rows) else A.reshape(0, 0)
    return A


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=object) + 0


def eye(n: int) -> np.ndarray:
    M = zeros(n, n)
    for i in range(n):
        M[i, i] = 1
    return M


def is_zero(A) -> bool:
    return all(x == 0 for x in np.asarray(A, dtype=object).flat)


def mat_eq(A, B) -> bool:
    A, B = np.asarray(A), np.asarray(B)
    return A.shape == B.shape and all(
        x == y for x, y in zip(A.flat, B.flat))


def smith_normal_form(A):
    """U, D, V, Uinv with U A V = D, U/V unimodular, D diagonal with
    d_1 | d_2 | ... (nonnegative).  Uinv is U^{-1} (tracked, not inverted).
    """
    D = np.array(A, dtype=object, copy=True)
    m, n = D.shape
    U, Uinv, V = eye(m), eye(m), eye(n)

    def row_op(i, j, q):      # row_i -= q * row_j
        D[i, :] -= q * D[j, :]
        U[i, :] -= q * U[j, :]
        Uinv[:, j] += q * Uinv[:, i]

    def col_op(i, j, q):      # col_i -= q * col_j
        D[:, i] -= q * D[:, j]
        V[:, i] -= q * V[:, j]

    def row_swap(i, j):
        D[[i, j], :] = D[[j, i], :]
        U[[i, j], :] = U[[j, i], :]
        Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def col_swap(i, j):
        D[:, [i, j]] = D[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]

    def row_neg(i):
        D[i, :] = -D[i, :]
        U[i, :] = -U[i, :]
        Uinv[:, i] = -Uinv[:, i]

    t = 0
    while t < min(m, n):
        # pivot: first minimal-|v| nonzero entry of the trailing submatrix
        piv = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i, j]
                if v != 0 and (best is None or abs(v) < best):
                    best = abs(v)
                    piv = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if piv is None:
            break
        if piv[0] != t:
            row_swap(t, piv[0])
        if piv[1] != t:
            col_swap(t, piv[1])

        while True:
            dirty = False
            for i in range(t + 1, m):
                if D[i, t] != 0:
                    q = D[i, t] // D[t, t]
                    row_op(i, t, q)
                    if D[i, t] != 0:        # smaller remainder becomes pivot
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if D[t, j] != 0:
                    q = D[t, j] // D[t, t]
                    col_op(j, t, q)
                    if D[t, j] != 0:
                        col_swap(t, j)
                        dirty = True
            if dirty:
                continue
            # divisibility: pivot must divide the whole trailing block
            stub = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i, j] % D[t, t] != 0:
                        stub = i
                        break
                if stub is not None:
                    break
            if stub is None:
                break
            row_op(t, stub, -1)     # row_t += row_stub, then reduce again
        if D[t, t] < 0:
            row_neg(t)
        t += 1
    return U, D, V, Uinv


def snf_diagonal(D) -> list:
    return [D[i, i] for i in range(min(D.shape))]


def rank(A) -> int:
    """Rank over Q (via fraction-free elimination)."""
    M = np.array(A, dtype=object, copy=True)
    m, n = M.shape
    r = 0
    for j in range(n):
        piv = None
        for i in range(r, m):
            if M[i, j] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            M[[r, piv], :] = M[[piv, r], :]
        for i in range(r + 1, m):
            if M[i, j] != 0:
                a, b = M[r, j], M[i, j]
                M[i, :] = a * M[i, :] - b * M[r, :]
        r += 1
        if r == m:
            break
    return r


def det(A):
    """Determinant by fraction-free (Bareiss) elimination."""
    M = np.array(A, dtype=object, copy=True)
    n = M.shape[0]
    assert M.shape == (n, n)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k, k] == 0:
            piv = None
            for i in range(k + 1, n):
                if M[i, k] != 0:
                    piv = i
                    break
            if piv is None:
                return 0
            M[[k, piv], :] = M[[piv, k], :]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i, j] = (M[k, k] * M[i, j] - M[i, k] * M[k, j]) // prev
            M[i, k] = 0
        prev = M[k, k]
    return sign * M[n - 1, n - 1]


def kernel_basis(A) -> np.ndarray:
    """Primitive basis of the right integer kernel, as columns."""
    _, D, V, _ = smith_normal_form(A)
    r = sum(1 for d in snf_diagonal(D) if d != 0)
    return V[:, r:]


def column_space_data(A):
    """Saturation/complement data for the column lattice of A (m x k).

    Returns (r, sat, comp, proj, torsion) where:
      * r = rank of A over Q;
      * sat: m x r primitive basis of the saturation of col(A);
      * comp: m x (m-r) basis of a complementary lattice ([sat|comp] is a
        basis of Z^m, i.e. unimodular);
      * proj: (m-r) x m integer matrix with proj @ comp = I, proj @ sat = 0
        (the quotient map Z^m -> Z^m / saturation in the comp coordinates);
      * torsion: the diagonal entries d_i > 1 (col(A) has index prod(d_i)
        inside its saturation).
    """
    A = np.asarray(A, dtype=object)
    U, D, _, Uinv = smith_normal_form(A)
    diag = snf_diagonal(D)
    r = sum(1 for d in diag if d != 0)
    sat = Uinv[:, :r]
    comp = Uinv[:, r:]
    proj = U[r:, :]
    torsion = [d for d in diag[:r] if d != 1]
    return r, sat, comp, proj, torsion


def column_hnf(A) -> np.ndarray:
    """Canonical column-style Hermite normal form of the column lattice.

    Returns an m x r matrix in canonical form: pivots positive, entries to
    the right of a pivot zero, entries to the left reduced mod the pivot.
    Two integer matrices span the same column lattice iff their HNFs match.
    """
    M = np.array(A, dtype=object, copy=True)
    m, n = M.shape
    c = 0  # next column to place a pivot in
    for i in range(m):
        piv = None
        for j in range(c, n):
            if M[i, j] != 0:
                piv = j
                break
        if piv is None:
            continue
        if piv != c:
            M[:, [c, piv]] = M[:, [piv, c]]
        # gcd out the row across columns > c
        for j in range(c + 1, n):
            while M[i, j] != 0:
                q = M[i, c] // M[i, j] if M[i, j] != 0 else 0
                M[:, c] -= q * M[:, j]
                M[:, [c, j]] = M[:, [j, c]]
        if M[i, c] < 0:
            M[:, c] = -M[:, c]
        for j in range(c):
            q = M[i, j] // M[i, c]
            M[:, j] -= q * M[:, c]
        c += 1
        if c == n:
            break
    # drop zero columns (all below previous pivots)
    keep = [j for j in range(n) if any(M[i, j] != 0 for i in range(m))]
    return M[:, keep] if keep else zeros(m, 0)


def lattice_equal(A, B) -> bool:
    """Do the columns of A and B span the same lattice in Z^m?"""
    return mat_eq(column_hnf(A), column_hnf(B))


def solve_unimodular(M, B) -> np.ndarray:
    """Solve M X = B for unimodular (det +-1) M, exactly over Z."""
    U, D, V, _ = smith_normal_form(M)
    diag = snf_diagonal(D)
    assert all(d == 1 for d in diag), "matrix is not unimodular"
    return V @ (U @ np.asarray(B, dtype=object))


def inverse_unimodular(M) -> np.ndarray:
    return solve_unimodular(M, eye(M.shape[0]))
