"""Sparse echelon factorization of integer matrices over Z and Z/m.

Bar-resolution cochain differentials are very sparse (at most deg+2 entries
of +-1 per row), and every cohomology computation reduces to questions about
one of them: invariant factors of the cokernel, membership in the image,
torsion representatives, kernels.  This module factors such a matrix once
and answers all of those queries cheaply afterwards.

The factorization runs in three logged phases:

1. unit-pivot sparse elimination (global min-column-size pivoting, which
   keeps fill-in low on face-map matrices);
2. integer/modular row echelon on the leftover rows (gcd steps);
3. dense Smith normal form (exact, python ints) on the small echelon block.

Row operations from phases 1-2 are recorded in a log that can be replayed
over any vector (the hot kernels in :mod:`cohomkit.kernels`); phase 3 keeps
its small transform matrices explicitly.  No column operation is ever
applied to the ambient space, so cokernel coordinates of a vector are read
off directly after replaying the log.

All arithmetic is exact: python integers over Z, canonical residues over
Z/m.  Pivoting is deterministic, so factorizations (and everything derived
from them) are reproducible.
"""

from __future__ import annotations

from math import gcd

import numpy as np

from .. import kernels
from ..errors import SizeCapExceeded
from .dense import IntMatrix, smith_normal_form

_RESIDUAL_DIM_CAP = 2048
_RESIDUAL_ENTRY_CAP = 4_000_000

ROW_ZERO = 0
ROW_PIVOT = 1
ROW_ECHELON = 2


def _fraction_free_inverse(M: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    from fractions import Fraction

    n = M.rows
    a = [[Fraction(M[i, j]) for j in range(n)] +
         [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = next(i for i in range(k, n) if a[i][k] != 0)
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    ent = []
    for i in range(n):
        for j in range(n):
            v = a[i][j + n]
            if v.denominator != 1:
                raise ValueError("matrix is not unimodular")
            ent.append(int(v))
    return IntMatrix(n, n, ent)


class SparseFactorization:
    """Logged echelon factorization of a sparse matrix over Z (m=0) or Z/m."""

    def __init__(self, nrows: int, ncols: int, coo, m: int = 0):
        """``coo`` is a triple (row_idx, col_idx, values) of equal-length
        sequences; duplicate positions are summed."""
        self.m = int(m)
        self.nrows = nrows
        self.ncols = ncols
        rows = [dict() for _ in range(nrows)]
        ri, ci, vi = coo
        for r, c, v in zip(np.asarray(ri).tolist(), np.asarray(ci).tolist(),
                           np.asarray(vi).tolist()):
            d = rows[r]
            nv = d.get(c, 0) + int(v)
            if self.m:
                nv %= self.m
            if nv:
                d[c] = nv
            elif c in d:
                del d[c]
        self._keep_csr(rows)
        self._log: list = []  # (type, a, b, q)
        self._eliminate(rows)
        self._finalize_log()

    # -- construction ------------------------------------------------------

    def _keep_csr(self, rows):
        """Store the input matrix in CSR form for matvec/verification."""
        indptr = [0]
        indices = []
        data = []
        for d in rows:
            for c in sorted(d):
                indices.append(c)
                data.append(d[c])
            indptr.append(len(indices))
        self._indptr = np.array(indptr, dtype=np.int64)
        self._indices = np.array(indices, dtype=np.int64)
        try:
            self._data = np.array(data, dtype=np.int64)
            self._data_py = None
        except OverflowError:
            self._data = None
            self._data_py = data

    def _is_unit(self, v: int) -> bool:
        if self.m == 0:
            return v == 1 or v == -1
        return gcd(v, self.m) == 1

    def _eliminate(self, rows):
        m = self.m
        log = self._log
        ncols = self.ncols
        col_rows: dict[int, set] = {}
        for r, d in enumerate(rows):
            for c in d:
                col_rows.setdefault(c, set()).add(r)
        col_len = {c: len(s) for c, s in col_rows.items()}
        buckets: dict[int, set] = {}
        for c, l in col_len.items():
            buckets.setdefault(l, set()).add(c)
        blocked: set = set()
        retired_rows: set = set()

        piv_rows: list[int] = []
        piv_cols: list[int] = []
        piv_vals: list[int] = []
        piv_content: list[dict] = []

        def bucket_move(c, old, new):
            if old == new:
                return
            s = buckets.get(old)
            if s is not None:
                s.discard(c)
                if not s:
                    del buckets[old]
            if new > 0:
                buckets.setdefault(new, set()).add(c)

        def touch(c):
            # a blocked column whose content changed becomes selectable again
            if c in blocked:
                blocked.discard(c)
                buckets.setdefault(col_len.get(c, 0), set()).add(c)

        while buckets:
            length = min(buckets)
            bucket = buckets[length]
            pc = min(bucket)
            rset = col_rows.get(pc)
            if rset is None or len(rset) != length or length == 0:
                bucket.discard(pc)
                if not bucket:
                    del buckets[length]
                if rset:
                    bucket_move(pc, 0, len(rset))
                continue
            # choose the unit entry with shortest row, lowest index
            best = None
            for r in sorted(rset):
                v = rows[r][pc]
                if self._is_unit(v):
                    key = (len(rows[r]), r)
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                # no unit pivot available here for now
                bucket.discard(pc)
                if not bucket:
                    del buckets[length]
                blocked.add(pc)
                continue
            pr = best[1]
            prow = rows[pr]
            pv = prow[pc]
            inv = None
            if m and pv != 1:
                inv = pow(pv, -1, m)
            pitems = sorted(prow.items())
            for r in sorted(rset):
                if r == pr:
                    continue
                row = rows[r]
                v = row[pc]
                if m == 0:
                    q = v * pv  # pv is +-1
                else:
                    q = (v * inv) % m if inv is not None else v
                log.append((0, r, pr, q))
                for c2, w in pitems:
                    nv = row.get(c2, 0) - q * w
                    if m:
                        nv %= m
                    if nv:
                        if c2 not in row:
                            cs = col_rows.setdefault(c2, set())
                            cs.add(r)
                            old = col_len.get(c2, 0)
                            col_len[c2] = old + 1
                            if c2 not in blocked and c2 != pc:
                                bucket_move(c2, old, old + 1)
                        row[c2] = nv
                        touch(c2)
                    elif c2 in row:
                        del row[c2]
                        cs = col_rows.get(c2)
                        if cs is not None:
                            cs.discard(r)
                            old = col_len[c2]
                            col_len[c2] = old - 1
                            if c2 not in blocked and c2 != pc:
                                bucket_move(c2, old, old - 1)
                        touch(c2)
            # retire pivot row and column
            for c2 in prow:
                if c2 == pc:
                    continue
                cs = col_rows.get(c2)
                if cs is not None and pr in cs:
                    cs.discard(pr)
                    old = col_len[c2]
                    col_len[c2] = old - 1
                    if c2 not in blocked:
                        bucket_move(c2, old, old - 1)
                    touch(c2)
            del col_rows[pc]
            col_len.pop(pc, None)
            bucket = buckets.get(length)
            if bucket is not None:
                bucket.discard(pc)
                if not bucket:
                    buckets.pop(length, None)
            blocked.discard(pc)
            piv_rows.append(pr)
            piv_cols.append(pc)
            piv_vals.append(pv)
            piv_content.append(dict(prow))
            retired_rows.add(pr)
            rows[pr] = {}

        # phase 2: gcd echelon on leftover rows
        live = sorted(r for r in range(self.nrows)
                      if r not in retired_rows and rows[r])
        res_cols = sorted({c for r in live for c in rows[r]})
        if res_cols:
            if (len(live) * len(res_cols) > _RESIDUAL_ENTRY_CAP
                    and len(res_cols) > _RESIDUAL_DIM_CAP):
                raise SizeCapExceeded(
                    f"residual block {len(live)}x{len(res_cols)} "
                    "after unit-pivot elimination is too large")
        echelon_rows: list[int] = []
        live_set = set(live)
        for c in res_cols:
            holders = sorted(r for r in live_set if c in rows[r])
            while len(holders) > 1:
                holders.sort(key=lambda r: (abs(rows[r][c]), r))
                a = holders[0]
                for b in holders[1:]:
                    q = rows[b][c] // rows[a][c]
                    if q:
                        log.append((0, b, a, q))
                        rb, ra = rows[b], rows[a]
                        for c2, w in list(ra.items()):
                            nv = rb.get(c2, 0) - q * w
                            if m:
                                nv %= m
                            if nv:
                                rb[c2] = nv
                            elif c2 in rb:
                                del rb[c2]
                holders = [r for r in holders if c in rows[r]]
            for r in list(live_set):
                if not rows[r]:
                    live_set.discard(r)
            if holders:
                r = holders[0]
                if m == 0 and rows[r][c] < 0:
                    log.append((2, r, r, 0))
                    rows[r] = {c2: -w for c2, w in rows[r].items()}
                echelon_rows.append(r)
                live_set.discard(r)

        self.piv_rows = piv_rows
        self.piv_cols = piv_cols
        self.piv_vals = piv_vals
        self.echelon_rows = echelon_rows
        self.res_cols = res_cols
        self._res_col_pos = {c: i for i, c in enumerate(res_cols)}

        row_kind = np.zeros(self.nrows, dtype=np.int8)
        for r in piv_rows:
            row_kind[r] = ROW_PIVOT
        for r in echelon_rows:
            row_kind[r] = ROW_ECHELON
        self.row_kind = row_kind
        self.zero_rows = [r for r in range(self.nrows)
                          if row_kind[r] == ROW_ZERO]

        # phase 3: dense SNF of the echelon block
        E = [[rows[r].get(c, 0) for c in res_cols] for r in echelon_rows]
        if echelon_rows:
            self.esnf = smith_normal_form(IntMatrix.from_rows(E))
            self._Us_inv = _fraction_free_inverse(self.esnf.U)
        else:
            self.esnf = None
            self._Us_inv = None

        # freeze pivot rows for back-substitution (pivot entry first)
        starts = []
        lens = []
        cols_pool: list[int] = []
        vals_pool: list[int] = []
        for t, content in enumerate(piv_content):
            pc = piv_cols[t]
            starts.append(len(cols_pool))
            items = [(pc, content[pc])] + sorted(
                (c, v) for c, v in content.items() if c != pc)
            lens.append(len(items))
            for c, v in items:
                cols_pool.append(c)
                vals_pool.append(v)
        self._pool_starts = np.array(starts, dtype=np.int64)
        self._pool_lens = np.array(lens, dtype=np.int64)
        self._pool_cols = np.array(cols_pool, dtype=np.int64)
        try:
            self._pool_vals = np.array(vals_pool, dtype=np.int64)
            self._pool_vals_py = None
        except OverflowError:
            self._pool_vals = None
            self._pool_vals_py = vals_pool
        self._piv_col_arr = np.array(piv_cols, dtype=np.int64)
        if self.m:
            self._piv_inv = np.array(
                [pow(v, -1, self.m) for v in piv_vals], dtype=np.int64)
        else:
            self._piv_inv = np.array(piv_vals, dtype=np.int64)  # signs +-1

    def _finalize_log(self):
        types = np.array([op[0] for op in self._log], dtype=np.int8)
        aa = np.array([op[1] for op in self._log], dtype=np.int64)
        bb = np.array([op[2] for op in self._log], dtype=np.int64)
        qs = [op[3] for op in self._log]
        try:
            qq = np.array(qs, dtype=np.int64)
        except OverflowError:
            qq = qs  # the pure kernel path accepts lists
        if len(types) == 0:
            aa = np.zeros(0, dtype=np.int64)
            bb = np.zeros(0, dtype=np.int64)
            qq = np.zeros(0, dtype=np.int64)
        self.log = (types, aa, bb, qq)
        self._log = []

    # -- queries -----------------------------------------------------------

    @property
    def rank(self) -> int:
        """Rank over Z of the input (unit pivots plus echelon rank)."""
        r = len(self.piv_rows)
        if self.esnf is not None:
            r += self.esnf.rank()
        return r

    def _replay(self, vec, reverse=False):
        if self.m:
            return kernels.apply_oplog_mod(vec, self.log, self.m,
                                           reverse=reverse)
        if isinstance(self.log[3], list):
            return kernels._apply_oplog_int_pure(
                vec, self.log[0], self.log[1], self.log[2], self.log[3],
                reverse)
        return kernels.apply_oplog_int(vec, self.log, reverse=reverse)

    def _echelon_diag(self):
        """Diagonal of the echelon block SNF, reduced against m."""
        if self.esnf is None:
            return []
        diag = self.esnf.diagonal()
        if self.m:
            return [gcd(d, self.m) if d else 0 for d in diag]
        return diag

    def coker_invariants(self) -> list[int]:
        """Invariant factors of coker over Z (0 = free) or Z/m."""
        out = [d for d in self._echelon_diag() if d > 1]
        nfree = len(self.zero_rows)
        if self.esnf is not None:
            nfree += max(0, self.esnf.D.rows - self.esnf.rank())
        if self.m:
            out += [self.m] * nfree
            out.sort()
        else:
            out += [0] * nfree
        return out

    def coords(self, vec):
        """Cokernel coordinates of ``vec``: (values, moduli) in canonical
        order (echelon coordinates, then untouched rows ascending).

        Modulus 0 means a free Z summand; over Z/m free summands have
        modulus m.  Unit-pivot coordinates are omitted (always zero in the
        cokernel)."""
        z = self._replay(vec)
        vals: list[int] = []
        mods: list[int] = []
        if self.echelon_rows:
            sub = [int(z[r]) for r in self.echelon_rows]
            w = self.esnf.U.mul_vec(sub)
            diag = self._echelon_diag()
            for j, x in enumerate(w):
                d = diag[j] if j < len(diag) else 0
                if self.m:
                    d = d if d else self.m
                    vals.append(x % d if d > 1 else 0)
                    mods.append(d)
                else:
                    if d:
                        vals.append(x % d)
                        mods.append(d)
                    else:
                        vals.append(x)
                        mods.append(0)
        for r in self.zero_rows:
            x = int(z[r])
            if self.m:
                vals.append(x % self.m)
                mods.append(self.m)
            else:
                vals.append(x)
                mods.append(0)
        return vals, mods

    def in_image(self, vec) -> bool:
        vals, mods = self.coords(vec)
        return all(v == 0 for v in vals)

    def solve(self, b, verify: bool = True):
        """Some x with A x = b (over Z or mod m), or None."""
        m = self.m
        z = self._replay(b)
        x = [0] * self.ncols
        # echelon part
        if self.echelon_rows:
            sub = [int(z[r]) for r in self.echelon_rows]
            w = self.esnf.U.mul_vec(sub)
            diag = self.esnf.diagonal()
            y = [0] * len(self.res_cols)
            for j, wj in enumerate(w):
                d = diag[j] if j < len(diag) else 0
                if d == 0:
                    if (wj % m if m else wj) != 0:
                        return None
                elif m == 0:
                    if wj % d != 0:
                        return None
                    y[j] = wj // d
                else:
                    g = gcd(d, m)
                    if wj % g != 0:
                        return None
                    mm = m // g
                    y[j] = ((wj // g) * pow(d // g, -1, mm)) % mm if mm > 1 else 0
            xr = self.esnf.V.mul_vec(y)
            for c, v in zip(self.res_cols, xr):
                x[c] = v % m if m else v
        for r in self.zero_rows:
            if (int(z[r]) % m if m else int(z[r])) != 0:
                return None
        # back-substitute unit pivots
        if self.piv_rows:
            rhs = [int(z[r]) for r in self.piv_rows]
            pool_vals = (self._pool_vals if self._pool_vals is not None
                         else self._pool_vals_py)
            rows = (self._pool_starts, self._pool_lens, self._pool_cols,
                    pool_vals)
            if m:
                if self._pool_vals is None:
                    x = kernels._backsub_mod_pure(
                        self._pool_starts, self._pool_lens, self._pool_cols,
                        pool_vals, self._piv_col_arr, self._piv_inv, rhs,
                        [v % m for v in x], m)
                    x = [int(v) for v in x]
                else:
                    x = kernels.backsub_mod(
                        rows, self._piv_col_arr, self._piv_inv, rhs, x, m)
                    x = [int(v) for v in x]
            else:
                x = kernels.backsub_int(rows, self._piv_col_arr,
                                        self._piv_inv, rhs, x)
        else:
            x = [int(v) for v in x]
        if verify:
            back = self.matvec(x)
            ok = all((bi - vi) % m == 0 for bi, vi in zip(back, b)) if m else \
                all(int(bi) == int(vi) for bi, vi in zip(back, b))
            if not ok:
                return None
        return x

    def matvec(self, x):
        data = self._data if self._data is not None else self._data_py
        if self.m:
            if self._data is not None and self._indices.size:
                out = kernels.csr_matvec_mod(self._indptr, self._indices,
                                             self._data, x, self.m)
                return [int(v) for v in out]
        out = []
        xs = [int(v) for v in x]
        for r in range(self.nrows):
            acc = 0
            for k in range(self._indptr[r], self._indptr[r + 1]):
                acc += int(data[k]) * xs[self._indices[k]]
            out.append(acc % self.m if self.m else acc)
        return out

    def torsion_reps(self):
        """Representatives for the nonunit torsion of the cokernel:
        list of (invariant factor, vector) pairs, over Z only."""
        if self.m:
            raise ValueError("torsion_reps is defined over Z")
        out = []
        if self.esnf is None:
            return out
        diag = self.esnf.diagonal()
        n = len(self.echelon_rows)
        for j, d in enumerate(diag):
            if d > 1:
                col = [self._Us_inv[i, j] for i in range(n)]
                vec = [0] * self.nrows
                for r, v in zip(self.echelon_rows, col):
                    vec[r] = v
                rep = self._replay(vec, reverse=True)
                out.append((d, [int(v) for v in rep]))
        return out

    def free_rep(self, k: int):
        """Representative for the k-th free cokernel coordinate (zero rows)."""
        r = self.zero_rows[k]
        vec = [0] * self.nrows
        vec[r] = 1
        rep = self._replay(vec, reverse=True)
        return [int(v) for v in rep]

    def kernel_basis(self):
        """Generators of ker(A) over Z or Z/m (torsion directions included)."""
        gens = []
        ys = []
        if self.esnf is not None:
            diag = self.esnf.diagonal()
            nres = len(self.res_cols)
            for j in range(nres):
                d = diag[j] if j < len(diag) else 0
                if d == 0:
                    ys.append((j, 1))
                elif self.m:
                    g = gcd(d, self.m)
                    if g > 1:
                        ys.append((j, self.m // g))
        touched = set(self.res_cols)
        for j, mult in ys:
            y = [0] * len(self.res_cols)
            y[j] = mult
            xr = self.esnf.V.mul_vec(y)
            x = [0] * self.ncols
            for c, v in zip(self.res_cols, xr):
                x[c] = v % self.m if self.m else v
            gens.append(self._backsub_kernel(x))
        # remaining non-pivot columns: free directions, completed through
        # the frozen pivot rows (they may still carry entries there)
        seen = set(self.piv_cols) | touched
        for c in range(self.ncols):
            if c not in seen:
                x = [0] * self.ncols
                x[c] = 1
                gens.append(self._backsub_kernel(x))
        return gens

    def _backsub_kernel(self, x):
        if not self.piv_rows:
            return [int(v) for v in x]
        rhs = [0] * len(self.piv_rows)
        pool_vals = (self._pool_vals if self._pool_vals is not None
                     else self._pool_vals_py)
        rows = (self._pool_starts, self._pool_lens, self._pool_cols, pool_vals)
        if self.m:
            if self._pool_vals is None:
                out = kernels._backsub_mod_pure(
                    self._pool_starts, self._pool_lens, self._pool_cols,
                    pool_vals, self._piv_col_arr, self._piv_inv, rhs,
                    [v % self.m for v in x], self.m)
                return [int(v) for v in out]
            out = kernels.backsub_mod(rows, self._piv_col_arr, self._piv_inv,
                                      rhs, x, self.m)
            return [int(v) for v in out]
        return kernels.backsub_int(rows, self._piv_col_arr, self._piv_inv,
                                   rhs, x)
