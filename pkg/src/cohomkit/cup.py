"""Cup products via the Alexander-Whitney diagonal on bar cochains, and
graded ring slices up to a degree bound.

For trivial coefficients the AW formula needs no action twisting: the
product of an a-cochain and a b-cochain evaluates on an (a+b)-tuple as
front value times back value.  The circle-one (cup-1) product implements
Steenrod's overlapping formula; it is used mod 2, where its coboundary
identity d(u u1 v) = uv + vu + (du u1 v) + (u u1 dv) provides explicit
lifting witnesses.
"""

from __future__ import annotations

import json

import numpy as np

from .cohomology import (CohomologyClass, CohomologyGroup, canonical_coords,
                         cohomology_group, cohomology_system, normalize_coeff)
from .errors import ModulusMismatch, SizeCapExceeded
from .groups import FiniteGroup
from .resolutions import bar_cochains

_INT64_SAFE = 1 << 30


def cup_vec(G: FiniteGroup, u, a: int, v, b: int, modulus: int = 0):
    """AW product of raw cochain vectors: degree a + b."""
    bc = bar_cochains(G)
    bc.check_cap(a + b)
    q = bc.q
    r = q ** (a + b)
    idx = np.arange(r, dtype=np.int64)
    back = idx % (q**b)
    front = idx // (q**b)
    mx = max((abs(int(x)) for x in u), default=0)
    my = max((abs(int(x)) for x in v), default=0)
    if mx < _INT64_SAFE and my < _INT64_SAFE:
        ua = np.asarray(list(u), dtype=np.int64)
        va = np.asarray(list(v), dtype=np.int64)
        out = ua[front] * va[back]
        if modulus:
            out %= modulus
        return [int(x) for x in out]
    ul = list(u)
    vl = list(v)
    out = [ul[f] * vl[bk] for f, bk in zip(front.tolist(), back.tolist())]
    if modulus:
        out = [x % modulus for x in out]
    return out


def cup1_vec(G: FiniteGroup, u, a: int, v, b: int, modulus: int = 0):
    """Steenrod cup-1 of raw cochains: degree a + b - 1.

    Convention: (u u1 v)(g_1..g_n) sums over windows of length b,
    u evaluated with the window collapsed to its product.  Satisfies
    d(u u1 v) = uv + vu + (du)u1 v + u u1 (dv) mod 2.
    """
    bc = bar_cochains(G)
    n = a + b - 1
    if a == 0 or b == 0 or n < 0:
        return [0] * bc.rank(max(n, 0))
    bc.check_cap(n)
    q = bc.q
    r = q**n
    digits = bc.digits(n)
    table = bc._table
    ua = np.asarray(list(u), dtype=np.int64)
    va = np.asarray(list(v), dtype=np.int64)
    out = np.zeros(r, dtype=np.int64)
    for i in range(a):
        prod = digits[i].copy()
        for k in range(i + 1, i + b):
            prod = table[prod, digits[k]]
        mask = prod != 0
        uidx = np.zeros(r, dtype=np.int64)
        for k in range(i):
            uidx = uidx * q + (digits[k] - 1)
        uidx = uidx * q + (np.where(mask, prod, 1) - 1)
        for k in range(i + b, n):
            uidx = uidx * q + (digits[k] - 1)
        vidx = np.zeros(r, dtype=np.int64)
        for k in range(i, i + b):
            vidx = vidx * q + (digits[k] - 1)
        out += np.where(mask, ua[uidx] * va[vidx], 0)
    if modulus:
        out %= modulus
    return [int(x) for x in out]


def cup_product(x: CohomologyClass, y: CohomologyClass) -> CohomologyClass:
    """Cocycle-level cup product; bilinear, associative up to coboundary."""
    if x.group is not y.group:
        raise ModulusMismatch("classes live over different groups")
    if x.modulus != y.modulus:
        raise ModulusMismatch(
            f"modulus mismatch: {x.modulus} vs {y.modulus}")
    vec = cup_vec(x.group, x.vector, x.degree, y.vector, y.degree,
                  modulus=x.modulus)
    return CohomologyClass(x.group, x.degree + y.degree, x.modulus,
                           tuple(vec))


def cup_power(x: CohomologyClass, k: int) -> CohomologyClass:
    if k < 0:
        raise ValueError("nonnegative powers only")
    sys = cohomology_system(x.group)
    if k == 0:
        return sys.unit_class(x.modulus)
    out = x
    for _ in range(k - 1):
        out = cup_product(out, x)
    return out


class GradedRingSlice:
    """Degreewise bases and multiplication table of H^*(G, coeff) up to N.

    Structure constants are stored for every basis pair with total degree
    at most N, in canonical coordinates of the target degree.
    """

    def __init__(self, group: FiniteGroup, modulus: int, max_degree: int,
                 groups: list, table: dict, label: str = ""):
        self.group = group
        self.modulus = modulus
        self.max_degree = max_degree
        self.groups = groups  # CohomologyGroup per degree 0..N
        self.table = table    # (d1, i, d2, j) -> tuple of coords
        self.label = label or f"H*({group.label}; "\
            f"{'Z' if not modulus else f'Z/{modulus}'})"

    def dimension(self, d: int) -> int:
        return len(self.groups[d].invariant_factors)

    def dimensions(self):
        return [self.dimension(d) for d in range(self.max_degree + 1)]

    def orders(self, d: int):
        return list(self.groups[d].invariant_factors)

    def basis_class(self, d: int, i: int) -> CohomologyClass:
        return self.groups[d].basis[i]

    def product_coords(self, d1: int, i: int, d2: int, j: int):
        return self.table[(d1, i, d2, j)]

    def multiply(self, d1: int, coords1, d2: int, coords2):
        """Coordinates of the product of two homogeneous elements."""
        if d1 + d2 > self.max_degree:
            raise SizeCapExceeded("product degree exceeds the slice bound")
        n = self.dimension(d1 + d2)
        out = [0] * n
        for i, a in enumerate(coords1):
            if a == 0:
                continue
            for j, b in enumerate(coords2):
                if b == 0:
                    continue
                sc = self.table[(d1, i, d2, j)]
                for t in range(n):
                    out[t] += a * b * sc[t]
        orders = self.orders(d1 + d2)
        return tuple(v % f if f else v for v, f in zip(out, orders))

    def power_coords(self, d: int, coords, k: int):
        """Coordinates of the k-th power of a homogeneous element."""
        if k == 0:
            return (1,)
        cur_d, cur = d, tuple(coords)
        for _ in range(k - 1):
            cur = self.multiply(cur_d, cur, d, coords)
            cur_d += d
        return cur

    def element_is_zero(self, d: int, coords) -> bool:
        orders = self.orders(d)
        return all(c % f == 0 if f else c == 0
                   for c, f in zip(coords, orders))

    def check_unit(self) -> bool:
        if self.dimension(0) != 1:
            return False
        for d in range(0, self.max_degree + 1):
            for i in range(self.dimension(d)):
                want = tuple(1 if t == i else 0
                             for t in range(self.dimension(d)))
                if self.table[(0, 0, d, i)] != want:
                    return False
                if self.table[(d, i, 0, 0)] != want:
                    return False
        return True

    def check_graded_commutativity(self) -> bool:
        for d1 in range(self.max_degree + 1):
            for d2 in range(self.max_degree + 1 - d1):
                sign = -1 if (d1 % 2 and d2 % 2) else 1
                orders = self.orders(d1 + d2)
                for i in range(self.dimension(d1)):
                    for j in range(self.dimension(d2)):
                        ab = self.table[(d1, i, d2, j)]
                        ba = self.table[(d2, j, d1, i)]
                        for x, y, f in zip(ab, ba, orders):
                            diff = x - sign * y
                            if (diff % f if f else diff) != 0:
                                return False
        return True

    def check_associativity(self) -> bool:
        """(x y) z = x (y z) in coordinates, all basis triples in range."""
        N = self.max_degree
        for d1 in range(1, N + 1):
            for d2 in range(1, N + 1 - d1):
                for d3 in range(1, N + 1 - d1 - d2):
                    for i in range(self.dimension(d1)):
                        for j in range(self.dimension(d2)):
                            for k in range(self.dimension(d3)):
                                xy = self.table[(d1, i, d2, j)]
                                a = self.multiply(d1 + d2, xy, d3,
                                                  _unit_coords(self, d3, k))
                                yz = self.table[(d2, j, d3, k)]
                                b = self.multiply(d1, _unit_coords(self, d1, i),
                                                  d2 + d3, yz)
                                if a != b:
                                    return False
        return True

    def to_json(self, include_basis: bool = False) -> str:
        data = {
            "group": self.group.label,
            "modulus": self.modulus,
            "max_degree": self.max_degree,
            "dimensions": self.dimensions(),
            "orders": [self.orders(d) for d in range(self.max_degree + 1)],
            "structure_constants": [
                {"deg": [d1, d2], "idx": [i, j], "coords": list(self.table[(d1, i, d2, j)])}
                for (d1, i, d2, j) in sorted(self.table)
            ],
        }
        if include_basis:
            data["basis"] = [
                [list(map(int, b.vector)) for b in self.groups[d].basis]
                for d in range(self.max_degree + 1)
            ]
        return json.dumps(data, indent=1, sort_keys=True)


def _unit_coords(slice_, d, k):
    return tuple(1 if t == k else 0 for t in range(slice_.dimension(d)))


def ring_slice(G: FiniteGroup, coeff, N: int, label: str = "") -> GradedRingSlice:
    """Cohomology ring slice to degree N: bases from cohomology_group,
    products from cup_product in canonical coordinates."""
    m = normalize_coeff(coeff)
    groups = [cohomology_group(G, coeff, n) for n in range(N + 1)]
    table = {}
    for d1 in range(0, N + 1):
        for d2 in range(0, N + 1 - d1):
            for i, x in enumerate(groups[d1].basis):
                for j, y in enumerate(groups[d2].basis):
                    z = cup_product(x, y)
                    table[(d1, i, d2, j)] = tuple(canonical_coords(G, z))
    return GradedRingSlice(G, m, N, groups, table, label=label)
