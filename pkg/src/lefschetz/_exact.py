"""Exact rational linear algebra on small integer matrices."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _to_rows(M) -> list[list[Fraction]]:
    return [[Fraction(int(x)) if not isinstance(x, Fraction) else x for x in row] for row in M]


def rref(M):
    A = _to_rows(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(M.tolist())[1])


def nullspace(M) -> list[list[Fraction]]:
    """Basis of {x : M x = 0} over Q."""
    M = [list(r) for r in np.asarray(M, dtype=object).tolist()]
    cols = len(M[0])
    A, pivots = rref(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -A[i][f]
        basis.append(v)
    return basis


def signature(S) -> int:
    """Signature of a symmetric rational matrix via symmetric Gaussian elimination."""
    A = _to_rows(S)
    n = len(A)
    sig = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if A[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # replace e_i by e_i + e_j to create a nonzero diagonal entry
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            piv = i
        d = A[piv][piv]
        sig += 1 if d > 0 else -1
        active.remove(piv)
        for i in active:
            if A[i][piv] != 0:
                f = A[i][piv] / d
                for k in range(n):
                    A[i][k] -= f * A[piv][k]
        for i in active:
            A[piv][i] = A[i][piv] = Fraction(0)
    return sig
