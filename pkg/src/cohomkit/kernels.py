"""Hot numeric kernels with a numba fast path and a pure fallback.

The sparse factorizations in :mod:`cohomkit.exact.sparse` are built once per
(group, modulus, degree) but queried hundreds of times: every cohomology-class
equality, coboundary test and witness verification replays an elementary
row-operation log over a dense vector, multiplies by a CSR differential, or
back-substitutes through frozen pivot rows.  Those three loops dominate
runtime and carry ``@njit`` here.

The pure path is exact over Z (python integers, no overflow); the numba path
works in int64 and reports overflow through a flag, in which case callers
redo the computation on the pure path.  Both paths implement the identical
algorithm, so results agree bit-for-bit whenever int64 suffices.

Select with COHOMKIT_NUMBA=0/1 (see :mod:`cohomkit.config`) or
:func:`set_backend`.
"""

from __future__ import annotations

import numpy as np

from . import config

# op codes for the row-operation log
OP_AXPY = 0  # row[a] -= q * row[b]
OP_SWAP = 1  # row[a] <-> row[b]
OP_NEG = 2   # row[a] = -row[a]

_INT64_GUARD = 1 << 60

_backend: str | None = None
_nb = None  # module-level holder for compiled numba functions


def backend() -> str:
    global _backend
    if _backend is None:
        set_backend("numba" if config.numba_enabled() else "pure")
    return _backend


def set_backend(name: str) -> None:
    global _backend, _nb
    if name not in ("numba", "pure"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and _nb is None:
        _nb = _compile_numba()
        if _nb is None:
            name = "pure"
    _backend = name


# ---------------------------------------------------------------------------
# pure implementations (exact; python ints over Z)
# ---------------------------------------------------------------------------

def _apply_oplog_mod_pure(vec, types, aa, bb, qq, m, reverse):
    v = [int(x) % m for x in vec]
    n = len(types)
    rng = range(n - 1, -1, -1) if reverse else range(n)
    for i in rng:
        t = types[i]
        a = aa[i]
        b = bb[i]
        if t == OP_AXPY:
            if reverse:
                v[a] = (v[a] + qq[i] * v[b]) % m
            else:
                v[a] = (v[a] - qq[i] * v[b]) % m
        elif t == OP_SWAP:
            v[a], v[b] = v[b], v[a]
        else:
            v[a] = (-v[a]) % m
    return np.array(v, dtype=np.int64)


def _apply_oplog_int_pure(vec, types, aa, bb, qq, reverse):
    v = [int(x) for x in vec]
    n = len(types)
    rng = range(n - 1, -1, -1) if reverse else range(n)
    for i in rng:
        t = types[i]
        a = aa[i]
        b = bb[i]
        if t == OP_AXPY:
            if reverse:
                v[a] = v[a] + int(qq[i]) * v[b]
            else:
                v[a] = v[a] - int(qq[i]) * v[b]
        elif t == OP_SWAP:
            v[a], v[b] = v[b], v[a]
        else:
            v[a] = -v[a]
    return v


def _backsub_mod_pure(starts, lens, cols, vals, pivcol, pivinv, rhs, x, m):
    npiv = len(starts)
    for t in range(npiv - 1, -1, -1):
        s = starts[t]
        e = s + lens[t]
        acc = int(rhs[t])
        for k in range(s + 1, e):  # entry 0 is the pivot itself
            acc -= int(vals[k]) * int(x[cols[k]])
        x[pivcol[t]] = (acc * int(pivinv[t])) % m
    return x


def _backsub_int_pure(starts, lens, cols, vals, pivcol, pivsign, rhs, x):
    npiv = len(starts)
    for t in range(npiv - 1, -1, -1):
        s = starts[t]
        e = s + lens[t]
        acc = int(rhs[t])
        for k in range(s + 1, e):
            acc -= int(vals[k]) * int(x[cols[k]])
        x[pivcol[t]] = acc * int(pivsign[t])
    return x


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _compile_numba():
    try:
        from numba import njit
    except ImportError:
        return None

    @njit(cache=True)
    def oplog_mod(v, types, aa, bb, qq, m, reverse):
        n = types.shape[0]
        if reverse:
            for i in range(n - 1, -1, -1):
                t = types[i]
                a = aa[i]
                b = bb[i]
                if t == 0:
                    v[a] = (v[a] + qq[i] * v[b]) % m
                elif t == 1:
                    tmp = v[a]
                    v[a] = v[b]
                    v[b] = tmp
                else:
                    v[a] = (-v[a]) % m
        else:
            for i in range(n):
                t = types[i]
                a = aa[i]
                b = bb[i]
                if t == 0:
                    v[a] = (v[a] - qq[i] * v[b]) % m
                elif t == 1:
                    tmp = v[a]
                    v[a] = v[b]
                    v[b] = tmp
                else:
                    v[a] = (-v[a]) % m
        return v

    @njit(cache=True)
    def oplog_int(v, types, aa, bb, qq, reverse):
        guard = np.int64(1) << 60
        n = types.shape[0]
        if reverse:
            for i in range(n - 1, -1, -1):
                t = types[i]
                a = aa[i]
                b = bb[i]
                if t == 0:
                    nv = v[a] + qq[i] * v[b]
                    if nv > guard or nv < -guard:
                        return False
                    v[a] = nv
                elif t == 1:
                    tmp = v[a]
                    v[a] = v[b]
                    v[b] = tmp
                else:
                    v[a] = -v[a]
        else:
            for i in range(n):
                t = types[i]
                a = aa[i]
                b = bb[i]
                if t == 0:
                    nv = v[a] - qq[i] * v[b]
                    if nv > guard or nv < -guard:
                        return False
                    v[a] = nv
                elif t == 1:
                    tmp = v[a]
                    v[a] = v[b]
                    v[b] = tmp
                else:
                    v[a] = -v[a]
        return True

    @njit(cache=True)
    def backsub_mod(starts, lens, cols, vals, pivcol, pivinv, rhs, x, m):
        npiv = starts.shape[0]
        for t in range(npiv - 1, -1, -1):
            s = starts[t]
            e = s + lens[t]
            acc = rhs[t]
            for k in range(s + 1, e):
                acc = (acc - vals[k] * x[cols[k]]) % m
            x[pivcol[t]] = (acc * pivinv[t]) % m

    @njit(cache=True)
    def backsub_int(starts, lens, cols, vals, pivcol, pivsign, rhs, x):
        guard = np.int64(1) << 60
        npiv = starts.shape[0]
        for t in range(npiv - 1, -1, -1):
            s = starts[t]
            e = s + lens[t]
            acc = rhs[t]
            for k in range(s + 1, e):
                acc -= vals[k] * x[cols[k]]
                if acc > guard or acc < -guard:
                    return False
            x[pivcol[t]] = acc * pivsign[t]
        return True

    @njit(cache=True)
    def csr_matvec(indptr, indices, data, vec, out):
        guard = np.int64(1) << 60
        n = indptr.shape[0] - 1
        for r in range(n):
            acc = np.int64(0)
            for k in range(indptr[r], indptr[r + 1]):
                acc += data[k] * vec[indices[k]]
                if acc > guard or acc < -guard:
                    return False
            out[r] = acc
        return True

    return {
        "oplog_mod": oplog_mod,
        "oplog_int": oplog_int,
        "backsub_mod": backsub_mod,
        "backsub_int": backsub_int,
        "csr_matvec": csr_matvec,
    }


# ---------------------------------------------------------------------------
# public wrappers
# ---------------------------------------------------------------------------

def apply_oplog_mod(vec, log, m: int, reverse: bool = False) -> np.ndarray:
    """Replay a row-operation log over ``vec`` modulo m. Returns a new array."""
    types, aa, bb, qq = log
    if backend() == "numba":
        v = (np.asarray(vec, dtype=np.int64) % m).astype(np.int64)
        _nb["oplog_mod"](v, types, aa, bb, qq, np.int64(m), reverse)
        return v
    return _apply_oplog_mod_pure(vec, types, aa, bb, qq, m, reverse)


def apply_oplog_int(vec, log, reverse: bool = False) -> list:
    """Replay a row-operation log over Z. Always exact; returns python ints."""
    types, aa, bb, qq = log
    if backend() == "numba":
        ok = True
        v = np.zeros(len(vec), dtype=np.int64)
        try:
            for i, x in enumerate(vec):
                v[i] = x
        except OverflowError:
            ok = False
        if ok and _nb["oplog_int"](v, types, aa, bb, qq, reverse):
            return [int(x) for x in v]
    return _apply_oplog_int_pure(vec, types, aa, bb, qq, reverse)


def backsub_mod(rows, pivcol, pivinv, rhs, x, m: int) -> np.ndarray:
    """Back-substitute through frozen pivot rows (reverse pivot order), mod m.

    ``rows`` is the CSR pool (starts, lens, cols, vals) with the pivot entry
    stored first in each row; ``x`` is prefilled on non-pivot columns.
    """
    starts, lens, cols, vals = rows
    if backend() == "numba":
        xv = np.asarray(x, dtype=np.int64)
        _nb["backsub_mod"](starts, lens, cols, vals, pivcol, pivinv,
                           np.asarray(rhs, dtype=np.int64), xv, np.int64(m))
        return xv
    return np.asarray(
        _backsub_mod_pure(starts, lens, cols, vals, pivcol, pivinv,
                          [int(r) for r in rhs], [int(v) % m for v in x], m),
        dtype=np.int64)


def backsub_int(rows, pivcol, pivsign, rhs, x) -> list:
    """Back-substitute over Z (pivots are +-1). Exact; returns python ints."""
    starts, lens, cols, vals = rows
    if backend() == "numba":
        ok = True
        xv = np.zeros(len(x), dtype=np.int64)
        rv = np.zeros(len(rhs), dtype=np.int64)
        try:
            for i, val in enumerate(x):
                xv[i] = val
            for i, val in enumerate(rhs):
                rv[i] = val
        except OverflowError:
            ok = False
        if ok and _nb["backsub_int"](starts, lens, cols, vals, pivcol,
                                     pivsign, rv, xv):
            return [int(v) for v in xv]
    return _backsub_int_pure(starts, lens, cols, vals, pivcol, pivsign,
                             [int(r) for r in rhs], [int(v) for v in x])


def csr_matvec_int(indptr, indices, data, vec) -> list:
    """Exact integer CSR matrix-vector product."""
    if backend() == "numba":
        ok = True
        v = np.zeros(len(vec), dtype=np.int64)
        try:
            for i, val in enumerate(vec):
                v[i] = val
        except OverflowError:
            ok = False
        if ok:
            out = np.zeros(indptr.shape[0] - 1, dtype=np.int64)
            if _nb["csr_matvec"](indptr, indices, data, v, out):
                return [int(x) for x in out]
    out = []
    vec = list(vec)
    for r in range(len(indptr) - 1):
        acc = 0
        for k in range(indptr[r], indptr[r + 1]):
            acc += int(data[k]) * vec[indices[k]]
        out.append(acc)
    return out


def csr_matvec_mod(indptr, indices, data, vec, m: int) -> np.ndarray:
    """CSR matrix-vector product mod m (entries of data and vec small)."""
    v = np.asarray(vec, dtype=np.int64) % m
    if backend() == "numba":
        out = np.zeros(indptr.shape[0] - 1, dtype=np.int64)
        _nb["csr_matvec"](indptr, indices, data, v, out)
        return out % m
    prod = data * v[indices]
    out = np.zeros(indptr.shape[0] - 1, dtype=np.int64)
    row_ids = np.repeat(np.arange(indptr.shape[0] - 1),
                        np.diff(indptr))
    np.add.at(out, row_ids, prod)
    return out % m
