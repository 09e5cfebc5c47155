"""Finite shadows of the stratification theorems: the thick tensor ideal
lattice of kC_p by brute force on Jordan types, and F-isomorphism
certificates for ring-map slices (the spectra-bijection criterion).

All stable-category operations are realized concretely on Jordan blocks:
syzygy is reflection a -> p-a, tensor decompositions come from rank
sequences of the nilpotent part, and short exact sequences among blocks are
enumerated by explicit matrix search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from .cohomology import (CohomologyClass, CohomologyGroup, canonical_coords,
                         cohomology_group, cohomology_system)
from .cup import GradedRingSlice, cup_vec, ring_slice
from .errors import NotPrime, SliceTooShallow
from .exact.modp import nullspace_modp, rank_modp, solve_modp
from .fiso import s_exponent
from .groups import FiniteGroup


def _require_prime(p: int):
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise NotPrime(f"{p} is not prime")


@dataclass(frozen=True)
class JordanType:
    """Multiset of Jordan block sizes of a nilpotent operator mod p."""

    prime: int
    blocks: tuple

    def __post_init__(self):
        if any(not 1 <= b <= self.prime for b in self.blocks):
            raise ValueError("block sizes must lie in 1..p")
        object.__setattr__(self, "blocks", tuple(sorted(self.blocks)))

    @property
    def dimension(self) -> int:
        return sum(self.blocks)

    def __str__(self):
        return " + ".join(f"J_{b}" for b in self.blocks) or "0"


def _jordan_block(a: int, p: int) -> np.ndarray:
    """Unipotent a x a block: the generator of C_p acting on J_a."""
    M = np.eye(a, dtype=np.int64)
    for i in range(a - 1):
        M[i, i + 1] = 1
    return M % p


def jordan_type_of_nilpotent(N: np.ndarray, p: int) -> JordanType:
    """Block sizes from the rank sequence of powers."""
    dim = N.shape[0]
    ranks = [dim]
    M = np.eye(dim, dtype=np.int64)
    while True:
        M = (M @ N) % p
        r = rank_modp(M, p)
        ranks.append(r)
        if r == 0:
            break
    blocks = []
    for k in range(1, len(ranks)):
        count_ge_k = ranks[k - 1] - ranks[k]
        count_ge_k1 = ranks[k] - ranks[k + 1] if k + 1 < len(ranks) else 0
        blocks.extend([k] * (count_ge_k - count_ge_k1))
    return JordanType(p, tuple(blocks))


def jordan_tensor_type(a: int, b: int, p: int) -> JordanType:
    """Jordan type of J_a tensor J_b under the diagonal action of C_p."""
    _require_prime(p)
    if not (1 <= a <= p and 1 <= b <= p):
        raise ValueError("block sizes must lie in 1..p")
    g = np.kron(_jordan_block(a, p), _jordan_block(b, p)) % p
    N = (g - np.eye(a * b, dtype=np.int64)) % p
    return jordan_type_of_nilpotent(N, p)


_SES_CACHE: dict = {}


def enumerate_block_ses(p: int):
    """All (a, c, b) with a short exact sequence 0->J_a->J_c->J_b->0 of
    kC_p-modules, found by explicit matrix search over Hom(J_a, J_c)."""
    _require_prime(p)
    if p in _SES_CACHE:
        return _SES_CACHE[p]
    out = []
    for a in range(1, p + 1):
        for c in range(a, p + 1):
            # Hom(J_a, J_c): f determined by f(e_0) in ker(t^a) = t^{c-a} J_c
            tmat = (_jordan_block(c, p) - np.eye(c, dtype=np.int64)) % p
            powers = [np.eye(c, dtype=np.int64)]
            for _ in range(c):
                powers.append((powers[-1] @ tmat) % p)
            kernel_dim = min(a, c)
            # basis of ker(t^a): e_{c-1}, t e_{c-1}... use column space of t^{c-a}
            base = powers[c - a] if c - a >= 0 else powers[0]
            # columns of base spanning: take first kernel_dim independent cols
            cols = []
            for j in range(c):
                cand = cols + [base[:, j]]
                if rank_modp(np.stack(cand, axis=1).reshape(c, -1), p) == len(cand):
                    cols.append(base[:, j])
                if len(cols) == kernel_dim:
                    break
            found = set()
            for coeffs in iproduct(range(p), repeat=len(cols)):
                if not any(coeffs):
                    continue
                v = np.zeros(c, dtype=np.int64)
                for cf, col in zip(coeffs, cols):
                    v = (v + cf * col) % p
                orbit = [v]
                for _ in range(a - 1):
                    orbit.append((tmat @ orbit[-1]) % p)
                Phi = np.stack(orbit, axis=1) % p
                if rank_modp(Phi, p) != a:
                    continue
                if a == c:
                    continue  # cokernel would be zero
                # cokernel: t action on F_p^c / im(Phi), via a projection
                # whose kernel is exactly im(Phi)
                ns = nullspace_modp(Phi.T, p)
                if len(ns) != c - a:
                    continue
                proj = np.stack(ns, axis=0) % p  # (c-a) x c, full row rank
                cols = []
                for i in range(c - a):
                    e = np.zeros(c - a, dtype=np.int64)
                    e[i] = 1
                    x = solve_modp(proj, e, p)
                    cols.append(x)
                X = np.stack(cols, axis=1) % p  # right inverse of proj
                T2 = (proj @ tmat @ X) % p
                jt = jordan_type_of_nilpotent(T2, p)
                if len(jt.blocks) == 1:
                    found.add(jt.blocks[0])
            for b in sorted(found):
                out.append((a, c, b))
    _SES_CACHE[p] = out
    return out


def thick_closure(seed, p: int):
    """Least subset of {1..p-1} containing the seed and closed under
    syzygy, stable tensor summands, and two-out-of-three over the
    enumerated short exact sequences of Jordan blocks."""
    _require_prime(p)
    seed = set(int(x) for x in seed)
    if any(not 1 <= x <= p - 1 for x in seed):
        raise ValueError("seed blocks must be non-projective: 1..p-1")
    tensor_cache = {}
    ses = enumerate_block_ses(p)
    S = set(seed)

    def stable(blocks):
        return {b for b in blocks if b != p}

    changed = True
    while changed:
        changed = False
        cur = sorted(S)
        for a in cur:
            om = p - a
            if om != 0 and om not in S and 1 <= om <= p - 1:
                S.add(om)
                changed = True
            for b in range(1, p):
                key = (min(a, b), max(a, b))
                if key not in tensor_cache:
                    tensor_cache[key] = jordan_tensor_type(key[0], key[1], p)
                for c in stable(tensor_cache[key].blocks):
                    if c not in S:
                        S.add(c)
                        changed = True
        # two-out-of-three over block SESs; J_p and 0 count as members
        full = S | {p}
        for (a, c, b) in ses:
            known = (a in full, c in full, b in full)
            if sum(known) == 2:
                for val, inside in ((a, known[0]), (c, known[1]),
                                    (b, known[2])):
                    if not inside and val != p and val not in S:
                        S.add(val)
                        changed = True
    return S


@dataclass
class ThickReport:
    prime: int
    seed: tuple
    closure: tuple
    ideal_count: int
    full: bool

    def to_json(self):
        return json.dumps({
            "check": "thick-closure",
            "p": self.prime,
            "seed": list(self.seed),
            "closure": list(self.closure),
            "thick_tensor_ideals": self.ideal_count,
        }, indent=1, sort_keys=True)


def thick_lattice_report(p: int, seed) -> ThickReport:
    closure = thick_closure(seed, p)
    everything = set(range(1, p))
    # brute force over all seeds to count distinct nonzero closures
    closures = set()
    for mask in range(1, 1 << (p - 1)):
        s = {i + 1 for i in range(p - 1) if mask >> i & 1}
        closures.add(tuple(sorted(thick_closure(s, p))))
    count = len(closures) + 1  # plus the zero ideal
    return ThickReport(p, tuple(sorted(seed)), tuple(sorted(closure)),
                       count, closure == everything)


# ---------------------------------------------------------------------------
# ring map slices and the spectra certificate
# ---------------------------------------------------------------------------

class RingMapSlice:
    """A degreewise map between graded ring slices, as matrices on bases."""

    def __init__(self, source: GradedRingSlice, target: GradedRingSlice,
                 matrices: dict, label: str = "kappa"):
        if source.modulus != target.modulus:
            raise ValueError("source and target slices over different rings")
        self.source = source
        self.target = target
        self.matrices = matrices  # degree -> target_dim x source_dim rows
        self.label = label

    @property
    def max_degree(self) -> int:
        return min(self.source.max_degree, self.target.max_degree)

    def apply(self, d: int, coords):
        M = self.matrices.get(d)
        if M is None:
            raise SliceTooShallow(f"no matrix stored for degree {d}")
        out = [0] * len(M)
        for i, row in enumerate(M):
            out[i] = sum(r * c for r, c in zip(row, coords))
        m = self.source.modulus
        return tuple(v % m if m else v for v in out)

    def check_multiplicative(self) -> bool:
        N = self.max_degree
        for d1 in range(N + 1):
            for d2 in range(N + 1 - d1):
                for i in range(self.source.dimension(d1)):
                    for j in range(self.source.dimension(d2)):
                        sc = self.source.table[(d1, i, d2, j)]
                        lhs = self.apply(d1 + d2, sc)
                        a = self.apply(d1, _unit(self.source, d1, i))
                        b = self.apply(d2, _unit(self.source, d2, j))
                        rhs = self.target.multiply(d1, a, d2, b)
                        m = self.source.modulus
                        if any((x - y) % m if m else x - y
                               for x, y in zip(lhs, rhs)):
                            return False
        return True


def _unit(slice_, d, i):
    return tuple(1 if t == i else 0 for t in range(slice_.dimension(d)))


@dataclass
class KappaReport:
    label: str
    prime: int
    exponent: int
    max_degree: int
    kernel_nilpotent: list
    onto_witnesses: list
    verdict: bool

    def to_json(self):
        return json.dumps({
            "check": "kappa-certificate",
            "map": self.label,
            "p": self.prime,
            "s": self.exponent,
            "max_degree": self.max_degree,
            "kernel_nilpotent": self.kernel_nilpotent,
            "onto_witnesses": self.onto_witnesses,
            "verdict": "pass" if self.verdict else "fail",
        }, indent=1, sort_keys=True)


def kappa_certificate(f: RingMapSlice, p: int, s: int, N: int) -> KappaReport:
    """Certificate that f induces a bijection on homogeneous prime spectra:
    every homogeneous kernel element z with s|z| <= N satisfies z^s = 0 in
    the source, and every target basis element x with p^s |x| <= N has
    x^{p^s} in the image (membership via linear solves on structure
    constants)."""
    _require_prime(p)
    if N > f.max_degree:
        raise SliceTooShallow(
            f"slices only reach degree {f.max_degree}, requested {N}")
    kernel_entries = []
    ok = True
    for d in range(1, N + 1):
        if s * d > N:
            break
        dim = f.source.dimension(d)
        if dim == 0:
            kernel_entries.append({"degree": d, "kernel_dim": 0,
                                   "nilpotent": True})
            continue
        M = f.matrices[d]
        kern = nullspace_modp(M, p) if M and len(M) else \
            [list(row) for row in np.eye(dim, dtype=np.int64)]
        entry = {"degree": d, "kernel_dim": len(kern), "nilpotent": True,
                 "witnesses": []}
        for kv in kern:
            coords = tuple(int(v) % p for v in kv)
            power = f.source.power_coords(d, coords, s)
            vanishes = f.source.element_is_zero(s * d, power)
            entry["witnesses"].append({"kernel_vector": list(coords),
                                       "power_coords": list(power),
                                       "vanishes": vanishes})
            if not vanishes:
                entry["nilpotent"] = False
                ok = False
        kernel_entries.append(entry)
    onto = []
    for d in range(1, N + 1):
        if d * p**s > N:
            break
        D = d * p**s
        img_cols = []
        src_dim = f.source.dimension(D)
        for i in range(src_dim):
            img_cols.append(list(f.apply(D, _unit(f.source, D, i))))
        for j in range(f.target.dimension(d)):
            x = _unit(f.target, d, j)
            power = f.target.power_coords(d, x, p**s)
            if not img_cols:
                solvable = f.target.element_is_zero(D, power)
                sol = [] if solvable else None
            else:
                A = np.asarray(img_cols, dtype=np.int64).T % p
                sol = solve_modp(A, list(power), p)
                solvable = sol is not None
            onto.append({"degree": d, "basis_index": j,
                         "power_degree": D,
                         "preimage_coords": None if sol is None
                         else [int(v) for v in sol],
                         "found": solvable})
            if not solvable:
                ok = False
    return KappaReport(f.label, p, s, N, kernel_entries, onto, ok)


def integral_mod_p_source_slice(G: FiniteGroup, p: int, N: int) -> GradedRingSlice:
    """(p-primary part of H^*(G, Z)) tensor F_p as a graded ring slice."""
    sys = cohomology_system(G)
    groups = []
    basis_map = []
    for d in range(N + 1):
        if d == 0:
            unit = sys.unit_class(0)
            groups.append(CohomologyGroup(G, 0, p, (p,), (unit,)))
            basis_map.append([(1, unit)])
            continue
        reps = [(fct, w) for fct, w in sys.integral_basis(d) if fct % p == 0]
        cls = tuple(CohomologyClass(G, d, 0, tuple(w)) for _f, w in reps)
        groups.append(CohomologyGroup(G, d, p, (p,) * len(reps), cls))
        basis_map.append(reps)
    table = {}
    for d1 in range(N + 1):
        for d2 in range(N + 1 - d1):
            target_reps = basis_map[d1 + d2] if d1 + d2 > 0 else None
            for i, x in enumerate(groups[d1].basis):
                for j, y in enumerate(groups[d2].basis):
                    prod = cup_vec(G, list(x.vector), d1,
                                   list(y.vector), d2)
                    if d1 + d2 == 0:
                        table[(0, i, 0, j)] = (1,)
                        continue
                    coords = sys.integral_coords(d1 + d2, prod)
                    out = []
                    for c, (fct, _w) in zip(coords,
                                            sys.integral_basis(d1 + d2)):
                        if fct % p == 0:
                            out.append(c % p)
                    table[(d1, i, d2, j)] = tuple(out)
    return GradedRingSlice(G, p, N, groups, table,
                           label=f"(H*({G.label};Z)_({p}) mod {p})")


def kappa_map_for_group(G: FiniteGroup, p: int, N: int) -> RingMapSlice:
    """The comparison map (p-primary integral mod p) -> H^*(G, F_p) with
    matrices computed from reductions in canonical coordinates."""
    source = integral_mod_p_source_slice(G, p, N)
    target = ring_slice(G, p, N)
    sys = cohomology_system(G)
    matrices = {}
    for d in range(N + 1):
        cols = []
        for b in source.groups[d].basis:
            red = CohomologyClass(G, d, p, tuple(int(v) % p
                                                 for v in b.vector))
            cols.append(list(canonical_coords(G, red)))
        tdim = target.dimension(d)
        if cols:
            matrices[d] = [[cols[j][i] for j in range(len(cols))]
                           for i in range(tdim)]
        else:
            matrices[d] = [[] for _ in range(tdim)]
    return RingMapSlice(source, target, matrices,
                        label=f"kappa_{p}({G.label})")
