"""Group cohomology over Z and Z/m on the normalized bar resolution.

Integral groups come straight out of the sparse factorization of the
incoming differential: in positive degrees H^n(G, Z) is finite (|G| kills
it), so it equals the torsion of coker(d^n), whose representatives are
certified cocycles.

For Z/m coefficients the universal coefficient sequence is made
constructive: a basis consists of reductions of integral classes together
with connecting-map sections built by exact solves, and every mod-m cocycle
gets canonical coordinates from two integral factorizations (degrees n and
n+1).  No mod-m linear algebra beyond vector reduction is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .abelian import FiniteAbelian, factorize, invariant_factor_form
from .errors import (DegreeZeroUnsupported, InternalCheckFailed,
                     ModulusMismatch, NotPrime)
from .groups import FiniteGroup
from .resolutions import bar_cochains


def normalize_coeff(coeff) -> int:
    """Accept "Z", 0, or an integer modulus >= 2; return 0 for Z."""
    if coeff in ("Z", "z", None, 0):
        return 0
    if isinstance(coeff, str):
        s = coeff.strip()
        if s.upper().startswith("Z/"):
            s = s[2:]
        coeff = int(s)
    coeff = int(coeff)
    if coeff < 2:
        raise ValueError(f"modulus must be 'Z' or an integer >= 2: {coeff}")
    return coeff


@dataclass(frozen=True)
class CohomologyClass:
    """Degree + modulus + cocycle vector on the normalized bar cochains."""

    group: FiniteGroup
    degree: int
    modulus: int  # 0 means Z
    vector: tuple

    def __post_init__(self):
        if self.modulus:
            object.__setattr__(
                self, "vector",
                tuple(int(v) % self.modulus for v in self.vector))
        else:
            object.__setattr__(self, "vector",
                               tuple(int(v) for v in self.vector))

    def is_zero_vector(self) -> bool:
        return all(v == 0 for v in self.vector)


@dataclass(frozen=True)
class CohomologyGroup:
    group: FiniteGroup
    degree: int
    modulus: int
    invariant_factors: tuple
    basis: tuple  # CohomologyClass for each invariant factor

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        parts = []
        for f in self.invariant_factors:
            parts.append("Z" if f == 0 else f"Z/{f}")
        return " + ".join(parts)


@dataclass(frozen=True)
class PrimaryPart:
    prime: int
    degree: int
    invariant_factors: tuple

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{f}" for f in self.invariant_factors)


class _UCTData:
    """Generators of H^n(G, Z/m) and the data to take coordinates."""

    __slots__ = ("orders", "gens", "theta_count", "int_orders",
                 "tor_scales", "abelian")

    def __init__(self, orders, gens, theta_count, int_orders, tor_scales):
        self.orders = orders            # cyclic order of each generator
        self.gens = gens                # mod-m cocycle vectors
        self.theta_count = theta_count  # first generators are theta-images
        self.int_orders = int_orders    # integral invariant factors used
        self.tor_scales = tor_scales    # (f', g') per torsion generator
        self.abelian = FiniteAbelian(orders) if orders else None


class CohomologySystem:
    """Per-group engine: factorizations, coordinates, coefficient maps."""

    def __init__(self, G: FiniteGroup):
        self.group = G
        self.bc = bar_cochains(G)
        self._uct: dict = {}
        self._int_basis: dict = {}

    # -- integral layer ----------------------------------------------------

    def rank(self, n: int) -> int:
        return self.bc.rank(n)

    def integral_basis(self, n: int):
        """[(invariant factor, cocycle vector)] for H^n(G, Z), n >= 1."""
        if n not in self._int_basis:
            fact = self.bc.fact(n, 0)
            reps = fact.torsion_reps()
            for f, w in reps:
                dw = self.bc.matvec(n + 1, w)
                if any(dw):
                    raise InternalCheckFailed(
                        f"torsion representative in degree {n} is not a cocycle")
            self._int_basis[n] = reps
        return self._int_basis[n]

    def integral_coords(self, n: int, vec):
        """Coordinates of an integral degree-n cocycle in the invariant
        factor basis; verifies the finiteness assumptions on the fly."""
        if n == 0:
            # H^0(G, Z) = Z spanned by the unit cochain
            return [int(vec[0])]
        fact = self.bc.fact(n, 0)
        vals, mods = fact.coords(list(vec))
        out = []
        for v, d in zip(vals, mods):
            if d == 0:
                if v != 0:
                    raise InternalCheckFailed(
                        "cocycle has a free cokernel coordinate; "
                        "H^n(G, Z) failed the finiteness assumption")
            elif d > 1:
                out.append(v % d)
        return out

    def integral_is_coboundary(self, n: int, vec) -> bool:
        return all(c == 0 for c in self.integral_coords(n, vec))

    def integral_solve(self, n: int, vec):
        """c with d(c) = vec over Z, or None."""
        return self.bc.fact(n, 0).solve(list(vec))

    # -- mod-m layer ---------------------------------------------------------

    def uct_data(self, n: int, m: int) -> _UCTData:
        key = (n, m)
        if key in self._uct:
            return self._uct[key]
        if n == 0:
            data = _UCTData([m], [[1]], 1, [0], [])
            self._uct[key] = data
            return data
        orders = []
        gens = []
        int_orders = []
        # theta part: reductions of integral classes
        for f, w in self.integral_basis(n):
            g = gcd(f, m)
            if g > 1:
                orders.append(g)
                gens.append([v % m for v in w])
                int_orders.append(f)
        theta_count = len(orders)
        # Tor part: sections of the connecting map
        tor_scales = []
        fact_up = self.bc.fact(n + 1, 0)
        for f2, w2 in self.integral_basis(n + 1):
            g2 = gcd(f2, m)
            if g2 == 1:
                continue
            scaled = [(m * (f2 // g2)) * v for v in w2]
            u = fact_up.solve(scaled)
            if u is None:
                raise InternalCheckFailed(
                    "connecting-map section solve failed; the scaled torsion "
                    "class should be a coboundary")
            orders.append(g2)
            gens.append([v % m for v in u])
            tor_scales.append((f2, g2))
        data = _UCTData(orders, gens, theta_count, int_orders, tor_scales)
        self._uct[key] = data
        return data

    def mod_coords(self, n: int, m: int, vec):
        """Coordinates of a mod-m degree-n cocycle in the UCT generator
        basis (internal order: theta generators, then Tor generators)."""
        if n == 0:
            return [int(vec[0]) % m]
        data = self.uct_data(n, m)
        lift = [int(v) % m for v in vec]
        dz = self.bc.matvec(n + 1, lift)
        if any(v % m for v in dz):
            raise ValueError("vector is not a mod-m cocycle")
        v_int = [v // m for v in dz]
        # Tor coordinates from the integral class of dz/m
        cvals = self.integral_coords(n + 1, v_int)
        int_up = self.integral_basis(n + 1)
        tor_coords = []
        pos = 0
        correction = None
        for (f2, w2), c in zip(int_up, cvals):
            g2 = gcd(f2, m)
            if g2 == 1:
                if c % f2:
                    # class must be killed by m within this factor
                    if (c * m) % f2:
                        raise InternalCheckFailed(
                            "connecting image is not m-torsion")
                continue
            scale = f2 // g2
            if c % scale:
                raise InternalCheckFailed(
                    "connecting image is not divisible by the Tor scale")
            s = (c // scale) % g2
            tor_coords.append(s)
            if s:
                u = data.gens[data.theta_count + pos]
                if correction is None:
                    correction = [0] * len(lift)
                for t, uv in enumerate(u):
                    correction[t] += s * uv
            pos += 1
        z2 = lift if correction is None else \
            [(a - b) % m for a, b in zip(lift, correction)]
        # now z2 is a theta-image: build an integral cocycle reducing to it
        dz2 = self.bc.matvec(n + 1, z2)
        v2 = [v // m for v in dz2]
        if any(v % m for v in dz2):
            raise InternalCheckFailed("Tor correction failed")
        E = self.bc.fact(n + 1, 0).solve(v2)
        if E is None:
            raise InternalCheckFailed(
                "theta-part lift failed; connecting class should vanish")
        Z = [a - m * e for a, e in zip(z2, E)]
        acoords = self.integral_coords(n, Z)
        theta_coords = []
        for (f, _w), a in zip(self.integral_basis(n), acoords):
            g = gcd(f, m)
            if g > 1:
                theta_coords.append(a % g)
        return theta_coords + tor_coords

    def mod_express(self, n: int, m: int, vec):
        """coords plus an explicit cochain e with
        vec = sum(coords * gens) + d(e) (mod m)."""
        coords = self.mod_coords(n, m, vec)
        data = self.uct_data(n, m)
        rest = [int(v) % m for v in vec]
        for c, g in zip(coords, data.gens):
            if c:
                rest = [(a - c * b) % m for a, b in zip(rest, g)]
        e = self.mod_solve_coboundary(n, m, rest)
        if e is None:
            raise InternalCheckFailed("expression residual is not a coboundary")
        return coords, e

    def mod_solve_coboundary(self, n: int, m: int, vec):
        """e with d(e) = vec (mod m) for a degree-n vector, or None.

        Solves the integral system d(e) = vec - m*h by lifting: vec must be
        a mod-m cocycle that vanishes in H^n(C/m)."""
        if all(v % m == 0 for v in vec):
            return [0] * self.rank(n - 1) if n >= 1 else []
        if n == 0:
            return None
        dz = self.bc.matvec(n + 1, [int(v) % m for v in vec])
        if any(v % m for v in dz):
            return None
        coords = self.mod_coords(n, m, vec)
        if any(coords):
            return None
        # peel the construction: vec = Z + m*E' with [Z] = 0 integrally
        lift = [int(v) % m for v in vec]
        dz2 = self.bc.matvec(n + 1, lift)
        v2 = [v // m for v in dz2]
        E = self.bc.fact(n + 1, 0).solve(v2)
        if E is None:
            return None
        Z = [a - m * e for a, e in zip(lift, E)]
        c = self.bc.fact(n, 0).solve(Z)
        if c is None:
            return None
        return [v % m for v in c]

    # -- public class helpers ----------------------------------------------

    def coords(self, x: CohomologyClass):
        if x.modulus:
            return self.mod_coords(x.degree, x.modulus, x.vector)
        return self.integral_coords(x.degree, x.vector)

    def is_zero(self, x: CohomologyClass) -> bool:
        return all(c == 0 for c in self.coords(x))

    def classes_equal(self, x: CohomologyClass, y: CohomologyClass) -> bool:
        if (x.degree != y.degree or x.modulus != y.modulus
                or x.group is not y.group):
            raise ModulusMismatch("classes live in different groups")
        if x.modulus:
            diff = [(a - b) % x.modulus for a, b in zip(x.vector, y.vector)]
        else:
            diff = [a - b for a, b in zip(x.vector, y.vector)]
        z = CohomologyClass(x.group, x.degree, x.modulus, tuple(diff))
        return self.is_zero(z)

    def verify_cocycle(self, x: CohomologyClass) -> bool:
        dz = self.bc.matvec(x.degree + 1, list(x.vector))
        if x.modulus:
            return all(v % x.modulus == 0 for v in dz)
        return not any(dz)

    def zero_class(self, degree: int, modulus: int) -> CohomologyClass:
        return CohomologyClass(self.group, degree, modulus,
                               tuple([0] * self.rank(degree)))

    def unit_class(self, modulus: int) -> CohomologyClass:
        return CohomologyClass(self.group, 0, modulus, (1,))


_SYS_CACHE: dict = {}


def cohomology_system(G: FiniteGroup) -> CohomologySystem:
    key = id(G)
    if key not in _SYS_CACHE or _SYS_CACHE[key].group is not G:
        _SYS_CACHE[key] = CohomologySystem(G)
    return _SYS_CACHE[key]


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def cohomology_group(G: FiniteGroup, coeff, n: int) -> CohomologyGroup:
    """H^n(G, Z) or H^n(G, Z/m) with explicit cocycle basis."""
    m = normalize_coeff(coeff)
    sys = cohomology_system(G)
    if n == 0:
        unit = sys.unit_class(m)
        return CohomologyGroup(G, 0, m, (m,), (unit,))
    if m == 0:
        reps = sys.integral_basis(n)
        factors = tuple(f for f, _ in reps)
        basis = tuple(CohomologyClass(G, n, 0, tuple(w)) for _, w in reps)
        return CohomologyGroup(G, n, 0, factors, basis)
    data = sys.uct_data(n, m)
    if not data.orders:
        return CohomologyGroup(G, n, m, (), ())
    ab = data.abelian
    factors = tuple(ab.canonical_factors)
    vecs = ab.canonical_vectors(data.gens, modulus=m)
    basis = tuple(CohomologyClass(G, n, m, tuple(v)) for v in vecs)
    return CohomologyGroup(G, n, m, factors, basis)


def canonical_coords(G: FiniteGroup, x: CohomologyClass):
    """Coordinates of x in the canonical basis of its cohomology group."""
    sys = cohomology_system(G)
    raw = sys.coords(x)
    if x.modulus == 0:
        return raw
    if x.degree == 0:
        return raw
    data = sys.uct_data(x.degree, x.modulus)
    if data.abelian is None:
        return []
    return data.abelian.to_canonical(raw)


def _prime_power(m: int):
    fac = factorize(m)
    if len(fac) != 1:
        raise ModulusMismatch(f"modulus {m} is not a prime power")
    [(p, i)] = fac.items()
    return p, i


def coefficient_map(kind: str, x: CohomologyClass,
                    modulus: int | None = None) -> CohomologyClass:
    """pi_i (mod p^i -> mod p^{i-1}), epsilon_i (mod p^i -> mod p), or
    theta_i (Z -> mod p^i, any modulus m >= 2 accepted)."""
    if kind in ("pi", "pi_i"):
        if x.modulus == 0:
            raise ModulusMismatch("pi_i needs a mod-p^i class")
        p, i = _prime_power(x.modulus)
        if i < 2:
            raise ModulusMismatch("pi_i needs i >= 2")
        target = p ** (i - 1)
        return CohomologyClass(x.group, x.degree, target,
                               tuple(v % target for v in x.vector))
    if kind in ("epsilon", "epsilon_i"):
        if x.modulus == 0:
            raise ModulusMismatch("epsilon_i needs a mod-p^i class")
        p, _ = _prime_power(x.modulus)
        return CohomologyClass(x.group, x.degree, p,
                               tuple(v % p for v in x.vector))
    if kind in ("theta", "theta_i"):
        if x.modulus != 0:
            raise ModulusMismatch("theta_i reduces an integral class")
        if modulus is None:
            raise ValueError("theta_i needs the target modulus")
        m = int(modulus)
        return CohomologyClass(x.group, x.degree, m,
                               tuple(v % m for v in x.vector))
    raise ValueError(f"unknown coefficient map {kind!r}")


def bockstein_delta(i: int, x: CohomologyClass) -> CohomologyClass:
    """Connecting map of 0 -> Z/p -> Z/p^{i+1} -> Z/p^i -> 0 by
    lift - differentiate - divide."""
    if x.modulus == 0:
        raise ModulusMismatch("bockstein_delta needs a mod-p^i class")
    p, level = _prime_power(x.modulus)
    if level != i:
        raise ModulusMismatch(
            f"class has modulus {x.modulus}, expected p^{i}")
    sys = cohomology_system(x.group)
    q = p**i
    lift = [int(v) % q for v in x.vector]
    dz = sys.bc.matvec(x.degree + 1, lift)
    if any(v % q for v in dz):
        raise ValueError("vector is not a cocycle mod p^i")
    u = [(v // q) % p for v in dz]
    return CohomologyClass(x.group, x.degree + 1, p, tuple(u))


def p_primary_part(G: FiniteGroup, p: int, n: int) -> PrimaryPart:
    """p-power invariant factors of H^n(G, Z), n >= 1."""
    if n == 0:
        raise DegreeZeroUnsupported("H^0(G, Z) = Z has no finite p-part")
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise NotPrime(f"{p} is not prime")
    sys = cohomology_system(G)
    out = []
    for f, _w in sys.integral_basis(n):
        e = 0
        while f % p == 0:
            f //= p
            e += 1
        if e:
            out.append(p**e)
    out.sort()
    return PrimaryPart(p, n, tuple(out))


def full_invariants_from_primary(G: FiniteGroup, n: int) -> list[int]:
    """Recombine p-primary parts over primes dividing |G| (consistency
    helper for tests)."""
    orders = []
    rest = G.order
    primes = sorted(factorize(rest))
    for p in primes:
        orders.extend(p_primary_part(G, p, n).invariant_factors)
    return invariant_factor_form(orders)
