"""Canonical form bookkeeping for finite abelian groups given as direct
sums of cyclic groups with marked generators.

Cohomology groups come out of the UCT machinery as sums of cyclic pieces
whose orders need not form a divisibility chain (e.g. Z/2 + Z/3 from the
two primes of Z/6 coefficients).  This module recombines them into
invariant-factor form and converts coordinates both ways.
"""

from __future__ import annotations

from math import gcd


def factorize(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factor_form(orders) -> list[int]:
    """Invariant factors (ascending divisibility chain) of ⊕ Z/o."""
    orders = [o for o in orders if o > 1]
    primary: dict[int, list[int]] = {}
    for o in orders:
        for p, e in factorize(o).items():
            primary.setdefault(p, []).append(e)
    for p in primary:
        primary[p].sort(reverse=True)
    k = max((len(v) for v in primary.values()), default=0)
    factors = []
    for i in range(k):
        f = 1
        for p, es in primary.items():
            if i < len(es):
                f *= p ** es[i]
        factors.append(f)
    factors.reverse()  # ascending chain
    return factors


class FiniteAbelian:
    """⊕_i Z/orders[i] with generators b_i, canonicalized.

    ``canonical_factors`` is the invariant-factor chain (ascending) and
    ``canonical_combos[k]`` expresses the k-th canonical generator as
    integer multiples of the internal generators.
    """

    def __init__(self, orders):
        self.orders = [int(o) for o in orders]
        if any(o < 2 for o in self.orders):
            raise ValueError("cyclic orders must be >= 2")
        primary: dict[int, list[tuple[int, int, int]]] = {}
        # (exponent, internal index, multiplier to project onto the p-part)
        for i, o in enumerate(self.orders):
            for p, e in factorize(o).items():
                primary.setdefault(p, []).append((e, i, o // p**e))
        for p in primary:
            primary[p].sort(key=lambda t: (-t[0], t[1]))
        k = max((len(v) for v in primary.values()), default=0)
        combos = []
        factors = []
        slots = []  # slots[k] = list of (p, e, i, mult)
        for pos in range(k):
            f = 1
            combo = {}
            slot = []
            for p, lst in primary.items():
                if pos < len(lst):
                    e, i, mult = lst[pos]
                    f *= p**e
                    combo[i] = combo.get(i, 0) + mult
                    slot.append((p, e, i, mult))
            factors.append(f)
            combos.append(combo)
            slots.append(slot)
        # descending order of construction; present ascending
        order_idx = list(range(k))[::-1]
        self.canonical_factors = [factors[i] for i in order_idx]
        self.canonical_combos = [combos[i] for i in order_idx]
        self._slots = [slots[i] for i in order_idx]
        # CRT data for coordinate conversion
        self._lam = {}
        for i, o in enumerate(self.orders):
            for p, e in factorize(o).items():
                q = p**e
                rest = o // q
                # lambda with lambda*rest = 1 mod q
                self._lam[(i, p)] = pow(rest, -1, q) if q > 1 else 0

    def to_canonical(self, coords):
        """Convert internal coordinates (mod orders) to canonical ones."""
        if len(coords) != len(self.orders):
            raise ValueError("coordinate length mismatch")
        out = []
        for f, slot in zip(self.canonical_factors, self._slots):
            residues = []
            mods = []
            for (p, e, i, _mult) in slot:
                q = p**e
                a = coords[i] % self.orders[i]
                residues.append((a * self._lam[(i, p)]) % q)
                mods.append(q)
            x = _crt(residues, mods)
            out.append(x % f)
        return out

    def canonical_vectors(self, gen_vectors, modulus: int = 0):
        """Canonical generators as explicit vectors (linear combos of the
        internal generator vectors, entrywise)."""
        out = []
        for combo in self.canonical_combos:
            n = len(gen_vectors[0]) if gen_vectors else 0
            vec = [0] * n
            for i, mult in combo.items():
                gi = gen_vectors[i]
                for t in range(n):
                    vec[t] += mult * gi[t]
            if modulus:
                vec = [v % modulus for v in vec]
            out.append(vec)
        return out


def _crt(residues, mods):
    x, m = 0, 1
    for r, q in zip(residues, mods):
        g = gcd(m, q)
        if g != 1:
            raise ValueError("CRT moduli must be coprime")
        # x' = x mod m, r mod q
        inv = pow(m % q, -1, q)
        t = ((r - x) * inv) % q
        x = x + m * t
        m *= q
    return x % m
