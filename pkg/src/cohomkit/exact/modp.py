"""Small dense linear algebra over prime fields F_p (numpy int64, exact)."""

from __future__ import annotations

import numpy as np


def _as_matrix(A, p):
    M = np.asarray(A, dtype=np.int64) % p
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    return M


def row_echelon_modp(A, p):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    M = _as_matrix(A, p).copy()
    rows, cols = M.shape
    piv = []
    r = 0
    for c in range(cols):
        pr = None
        for rr in range(r, rows):
            if M[rr, c] % p:
                pr = rr
                break
        if pr is None:
            continue
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        for rr in range(rows):
            if rr != r and M[rr, c]:
                M[rr] = (M[rr] - M[rr, c] * M[r]) % p
        piv.append(c)
        r += 1
        if r == rows:
            break
    return M, piv


def rank_modp(A, p) -> int:
    return len(row_echelon_modp(A, p)[1])


def solve_modp(A, b, p):
    """One solution of A x = b over F_p, or None."""
    M = _as_matrix(A, p)
    bb = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    aug, piv = row_echelon_modp(np.concatenate([M, bb], axis=1), p)
    cols = M.shape[1]
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = aug[r, cols] % p
    return x


def nullspace_modp(A, p):
    """Basis of ker(A) over F_p as a list of int vectors."""
    M, piv = row_echelon_modp(A, p)
    cols = M.shape[1]
    free = [c for c in range(cols) if c not in piv]
    out = []
    for c in free:
        v = np.zeros(cols, dtype=np.int64)
        v[c] = 1
        for r, pc in enumerate(piv):
            v[pc] = (-M[r, c]) % p
        out.append(v)
    return out


def invert_modp(A, p):
    """Inverse matrix over F_p, or None if singular."""
    M = _as_matrix(A, p)
    n = M.shape[0]
    if M.shape[1] != n:
        raise ValueError("square matrices only")
    aug, piv = row_echelon_modp(np.concatenate(
        [M, np.eye(n, dtype=np.int64)], axis=1), p)
    if piv != list(range(n)):
        return None
    return aug[:, n:] % p
