"""Dense exact linear algebra over Z and Z/m.

Everything here uses python integers, so no computation can overflow.  These
routines are the reference implementations; the sparse engine in
:mod:`cohomkit.exact.sparse` delegates its small residual blocks here.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from ..errors import InternalCheckFailed


class IntMatrix:
    """Immutable integer matrix, row-major, arbitrary precision."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = [int(x) for x in entries]
        if len(entries) != rows * cols:
            raise ValueError(f"need {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, rowlist) -> "IntMatrix":
        rowlist = [list(r) for r in rowlist]
        r = len(rowlist)
        c = len(rowlist[0]) if r else 0
        if any(len(row) != c for row in rowlist):
            raise ValueError("ragged rows")
        return cls(r, c, [x for row in rowlist for x in row])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    def __getitem__(self, rc):
        i, j = rc
        return self.entries[i * self.cols + j]

    def row(self, i: int):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         [self[i, j] for j in range(self.cols)
                          for i in range(self.rows)])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        out = []
        for i in range(self.rows):
            ai = a[i]
            for j in range(other.cols):
                out.append(sum(ai[k] * b[k][j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, out)

    def mul_vec(self, v):
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        return [sum(self[i, k] * v[k] for k in range(self.cols))
                for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.entries)))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {self.to_rows()})"

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [row[:] for row in self.to_rows()]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """U*M*V = D with U, V unimodular and D diagonal with divisibility chain."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    source: IntMatrix

    def diagonal(self):
        n = min(self.D.rows, self.D.cols)
        return [self.D[i, i] for i in range(n)]

    def rank(self) -> int:
        return sum(1 for d in self.diagonal() if d != 0)

    def verify(self) -> bool:
        if (self.U @ self.source) @ self.V != self.D:
            return False
        if abs(self.U.det()) != 1 or abs(self.V.det()) != 1:
            return False
        diag = self.diagonal()
        for i in range(len(diag) - 1):
            if diag[i + 1] != 0 and (diag[i] == 0 or diag[i + 1] % diag[i] != 0):
                return False
            if diag[i] == 0 and diag[i + 1] != 0:
                return False
        if any(d < 0 for d in diag):
            return False
        for i in range(self.D.rows):
            for j in range(self.D.cols):
                if i != j and self.D[i, j] != 0:
                    return False
        return True


def _as_rows(M):
    if isinstance(M, IntMatrix):
        return M.to_rows(), M.rows, M.cols
    rows = [list(map(int, r)) for r in M]
    r = len(rows)
    c = len(rows[0]) if r else 0
    return rows, r, c


def smith_normal_form(M) -> SmithDecomposition:
    """Smith normal form with full transforms.

    Pivot selection: smallest nonzero absolute value, ties broken by lowest
    (row, col) index, which makes the output deterministic.
    """
    a, nr, nc = _as_rows(M)
    src = M if isinstance(M, IntMatrix) else IntMatrix.from_rows(a)
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]
    t = 0
    limit = min(nr, nc)
    while t < limit:
        # pivot: min |value|, ties by (row, col)
        best = None
        for i in range(t, nr):
            ai = a[i]
            for j in range(t, nc):
                x = ai[j]
                if x != 0 and (best is None or abs(x) < abs(best[0])):
                    best = (x, i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
            u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
            for row in v:
                row[t], row[pj] = row[pj], row[t]
        p = a[t][t]
        dirty = False
        for i in range(t + 1, nr):
            x = a[i][t]
            if x:
                q = x // p
                if q:
                    ai, at = a[i], a[t]
                    for j in range(t, nc):
                        ai[j] -= q * at[j]
                    ui, ut = u[i], u[t]
                    for j in range(nr):
                        ui[j] -= q * ut[j]
                if a[i][t]:
                    dirty = True
        if dirty:
            continue
        for j in range(t + 1, nc):
            x = a[t][j]
            if x:
                q = x // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
        if dirty:
            continue
        # divisibility of the remaining block by the pivot
        bad = None
        for i in range(t + 1, nr):
            ai = a[i]
            for j in range(t + 1, nc):
                if ai[j] % p != 0:
                    bad = j
                    break
            if bad is not None:
                break
        if bad is not None:
            for row in a:
                row[t] += row[bad]
            for row in v:
                row[t] += row[bad]
            continue
        if p < 0:
            for j in range(t, nc):
                a[t][j] = -a[t][j]
            for j in range(nr):
                u[t][j] = -u[t][j]
        t += 1
    d = [[a[i][j] if i == j else 0 for j in range(nc)] for i in range(nr)]
    return SmithDecomposition(
        U=IntMatrix.from_rows(u),
        D=IntMatrix.from_rows(d),
        V=IntMatrix.from_rows(v),
        source=src,
    )


def _normalize_modulus(m) -> int:
    """Accept "Z"/0 for the integers, or an integer modulus >= 2."""
    if m in ("Z", "z", None, 0):
        return 0
    m = int(m)
    if m < 2:
        raise ValueError(f"modulus must be 'Z' or an integer >= 2, got {m}")
    return m


def solve_mod(A, b, m):
    """Some x with A x = b (mod m), or None. Over "Z" solves exactly.

    The returned solution is deterministic: each Smith coordinate is chosen
    as the least nonnegative value.
    """
    m = _normalize_modulus(m)
    dec = smith_normal_form(A)
    nr, nc = dec.source.rows, dec.source.cols
    b = [int(x) for x in b]
    if len(b) != nr:
        raise ValueError("rhs length mismatch")
    c = dec.U.mul_vec(b)
    diag = dec.diagonal()
    y = [0] * nc
    for i in range(nr):
        ci = c[i]
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if (ci % m if m else ci) != 0:
                return None
        else:
            if m == 0:
                if ci % d != 0:
                    return None
                y[i] = ci // d
            else:
                g = gcd(d, m)
                if ci % g != 0:
                    return None
                mm = m // g
                y[i] = ((ci // g) * pow(d // g, -1, mm)) % mm if mm > 1 else 0
    x = dec.V.mul_vec(y)
    if m:
        x = [xi % m for xi in x]
    back = dec.source.mul_vec(x)
    if any((bi - ci) % m != 0 if m else bi != ci for bi, ci in zip(back, b)):
        raise InternalCheckFailed("solve_mod produced a non-solution")
    return x


def cokernel_invariants(M, m):
    """Invariant factors of target/(image of M) over Z or Z/m.

    Over Z a factor 0 denotes a free summand; over Z/m all factors divide m.
    """
    m = _normalize_modulus(m)
    rows, nr, nc = _as_rows(M)
    if m:
        for i in range(nr):
            rows[i] = rows[i] + [m if j == i else 0 for j in range(nr)]
        nc += nr
    dec = smith_normal_form(IntMatrix.from_rows(rows) if rows else
                            IntMatrix.zero(nr, nc))
    diag = dec.diagonal()
    rank = sum(1 for d in diag if d != 0)
    out = [d for d in diag if d > 1]
    out += [0] * (nr - rank)
    return out
