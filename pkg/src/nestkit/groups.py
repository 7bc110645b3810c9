"""Exact arithmetic for finite additive groups, finite fields and product rings.

Groups are direct products of cyclic groups Z_n and additive groups of
finite fields GF(p^d).  Elements are plain ints for a single-factor group
and flat tuples of ints otherwise; each field coordinate is digit-encoded
(the element c_0 + c_1*x + ... + c_{d-1}*x^{d-1} is stored as the integer
c_0 + c_1*p + ... + c_{d-1}*p^{d-1}).  All values are immutable and every
operation is a pure function, so everything here is safe to share freely.

Descriptor grammar (also used in files and on the command line):

    Z<n>                      cyclic group of order n
    GF(<p>)                   prime field
    GF(<p>^<d>[;poly=c0,c1,...,1])   extension field, ascending coefficients
    <factor>x<factor>x...     direct product, e.g. Z2xZ2xGF(13)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence


class GroupError(ValueError):
    """Invalid descriptor, reducible polynomial or out-of-domain request."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (orders here are tiny)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# polynomial helpers over Z_p (coefficient lists in ascending degree)


def _poly_mod(num: list[int], den: Sequence[int], p: int) -> list[int]:
    num = [c % p for c in num]
    dd = len(den) - 1
    inv_lead = pow(den[-1], -1, p)
    while len(num) - 1 >= dd:
        if num[-1] == 0:
            num.pop()
            continue
        shift = len(num) - 1 - dd
        factor = num[-1] * inv_lead % p
        for i, c in enumerate(den):
            num[shift + i] = (num[shift + i] - factor * c) % p
        num.pop()
    return num


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return out


def poly_is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Test irreducibility over Z_p by searching for factors of degree <= d/2.

    Degrees in play never exceed 4, so trial factorization is exhaustive:
    roots catch linear factors, and for d = 4 we also scan the monic
    quadratics.
    """
    d = len(coeffs) - 1
    if d < 1 or coeffs[-1] % p == 0:
        return False
    if d == 1:
        return True
    for r in range(p):
        if sum(c * pow(r, i, p) for i, c in enumerate(coeffs)) % p == 0:
            return False
    if d <= 3:
        return True
    if d == 4:
        for b in range(p):
            for c in range(p):
                q = [c, b, 1]
                if _poly_mod(list(coeffs), q, p) == []:
                    return False
        return True
    raise GroupError(f"irreducibility test supports degree <= 4, got {d}")


@lru_cache(maxsize=None)
def default_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree d over Z_p.

    Polynomials are compared by their written form, i.e. by the coefficient
    tuple (c_{d-1}, ..., c_1, c_0) below the leading term.
    """
    if d == 1:
        return (0, 1)
    from itertools import product

    for upper in product(range(p), repeat=d):
        coeffs = tuple(reversed(upper)) + (1,)  # ascending degree
        if poly_is_irreducible(coeffs, p):
            return coeffs
    raise GroupError(f"no irreducible polynomial of degree {d} over Z_{p}")


# Representations for these orders are pinned so that the published
# 16-tuples land in the intended fields.
PINNED_POLYS = {
    25: (2, 1, 1),  # x^2 + x + 2 over Z_5
    49: (1, 0, 1),  # x^2 + 1 over Z_7
    121: (1, 0, 1),  # x^2 + 1 over Z_11
}


# ---------------------------------------------------------------------------
# factors


@dataclass(frozen=True)
class CyclicFactor:
    n: int

    @property
    def order(self) -> int:
        return self.n

    is_field = False

    def descriptor(self) -> str:
        return f"Z{self.n}"

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.n

    def neg(self, a: int) -> int:
        return (-a) % self.n


@dataclass(frozen=True)
class FiniteField:
    """GF(p^d) with digit-encoded elements 0..q-1.

    The irreducible polynomial is stored in ascending degree with leading
    coefficient 1.  Multiplication reduces modulo that polynomial; the
    encoding makes 0 and 1 the additive and multiplicative identities.
    """

    p: int
    d: int
    poly: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise GroupError(f"field characteristic {self.p} is not prime")
        if self.d < 1:
            raise GroupError("field degree must be >= 1")
        poly = self.poly
        if poly is None:
            poly = PINNED_POLYS.get(self.p**self.d, None)
            if poly is None:
                poly = default_irreducible(self.p, self.d)
        poly = tuple(c % self.p for c in poly)
        if len(poly) != self.d + 1 or poly[-1] != 1:
            raise GroupError(f"polynomial {poly} is not monic of degree {self.d}")
        if not poly_is_irreducible(poly, self.p):
            raise GroupError(f"polynomial {poly} is reducible over Z_{self.p}")
        object.__setattr__(self, "poly", poly)

    @property
    def q(self) -> int:
        return self.p**self.d

    @property
    def order(self) -> int:
        return self.q

    is_field = True

    def descriptor(self) -> str:
        if self.d == 1:
            return f"GF({self.p})"
        poly = ",".join(str(c) for c in self.poly)
        return f"GF({self.p}^{self.d};poly={poly})"

    # -- encoding

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.d):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def encode(self, digits: Iterable[int]) -> int:
        out = 0
        for c in reversed(list(digits)):
            out = out * self.p + (c % self.p)
        return out

    # -- arithmetic

    def add(self, a: int, b: int) -> int:
        if self.d == 1:
            return (a + b) % self.p
        return self.encode(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        if self.d == 1:
            return (-a) % self.p
        return self.encode(-x for x in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.d == 1:
            return (a * b) % self.p
        prod = _poly_mul(self.digits(a), self.digits(b), self.p)
        return self.encode(_poly_mod(prod, self.poly, self.p))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out, base = 1, a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.q - 2)

    def element_order(self, a: int) -> int:
        if a == 0:
            raise GroupError("0 has no multiplicative order")
        n, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            n += 1
        return n

    def multiplicative_generator(self) -> int:
        """Any generator of the cyclic group of units; existence is checked."""
        target = self.q - 1
        fac = factorize(target)
        for a in range(1, self.q):
            if all(self.pow(a, target // f) != 1 for f in fac):
                return a
        raise GroupError("multiplicative group is not cyclic (impossible)")

    def units(self) -> range:
        return range(1, self.q)


Factor = CyclicFactor | FiniteField
Element = int | tuple[int, ...]


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """Additive group presented as a direct product of factors.

    Elements are ints when there is a single factor and flat tuples of
    per-factor ints otherwise.  Enumeration order is mixed-radix
    lexicographic with the first factor most significant, which fixes the
    canonical choice wherever a construction says "smallest".
    """

    def __init__(self, factors: Sequence[Factor]):
        if not factors:
            raise GroupError("a group needs at least one factor")
        self.factors = tuple(factors)
        self.order = 1
        for f in self.factors:
            if f.order < 2:
                raise GroupError(f"factor of order {f.order} is not allowed")
            self.order *= f.order
        self._single = len(self.factors) == 1

    # -- structure

    def descriptor(self) -> str:
        return "x".join(f.descriptor() for f in self.factors)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.descriptor()})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    # -- elements

    def zero(self) -> Element:
        return 0 if self._single else (0,) * len(self.factors)

    def coords(self, a: Element) -> tuple[int, ...]:
        return (a,) if self._single else a  # type: ignore[return-value]

    def from_coords(self, coords: Sequence[int]) -> Element:
        return coords[0] if self._single else tuple(coords)

    def elements(self) -> list[Element]:
        out = [()]
        for f in self.factors:
            out = [prefix + (v,) for prefix in out for v in range(f.order)]
        if self._single:
            return [t[0] for t in out]
        return out

    def index(self, a: Element) -> int:
        idx = 0
        for f, c in zip(self.factors, self.coords(a)):
            idx = idx * f.order + c
        return idx

    def contains(self, a: Element) -> bool:
        if self._single:
            return isinstance(a, int) and 0 <= a < self.factors[0].order
        return (
            isinstance(a, tuple)
            and len(a) == len(self.factors)
            and all(isinstance(c, int) and 0 <= c < f.order for f, c in zip(self.factors, a))
        )

    # -- arithmetic

    def add(self, a: Element, b: Element) -> Element:
        if self._single:
            return self.factors[0].add(a, b)
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def neg(self, a: Element) -> Element:
        if self._single:
            return self.factors[0].neg(a)
        return tuple(f.neg(x) for f, x in zip(self.factors, a))

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.neg(b))


class ProductRing(FiniteGroup):
    """Direct product of finite fields with componentwise multiplication."""

    def __init__(self, fields: Sequence[FiniteField]):
        if not all(f.is_field for f in fields):
            raise GroupError("a product ring is built from fields only")
        super().__init__(fields)

    def one(self) -> Element:
        return 1 if self._single else (1,) * len(self.factors)

    def mul(self, a: Element, b: Element) -> Element:
        if self._single:
            return self.factors[0].mul(a, b)
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))


def product_ring_for(v: int) -> ProductRing:
    """The ring R_v: product of fields of order the maximal prime power
    factors of v, in ascending order."""
    if v < 2:
        raise GroupError(f"no product ring for v={v}")
    fac = factorize(v)
    orders = sorted(p**a for p, a in fac.items())
    return ProductRing([FiniteField(*_prime_power(q)) for q in orders])


def _prime_power(q: int) -> tuple[int, int]:
    fac = factorize(q)
    if len(fac) != 1:
        raise GroupError(f"{q} is not a prime power")
    (p, d), = fac.items()
    return p, d


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its element set; closure is checked on creation."""

    parent: FiniteGroup
    elements: frozenset

    def __post_init__(self) -> None:
        elems = self.elements
        g = self.parent
        if g.zero() not in elems:
            raise GroupError("subgroup must contain zero")
        for a in elems:
            if not g.contains(a):
                raise GroupError(f"{a!r} is not a group element")
            if g.neg(a) not in elems:
                raise GroupError(f"subgroup not closed under negation at {a!r}")
            for b in elems:
                if g.add(a, b) not in elems:
                    raise GroupError(f"subgroup not closed under addition at {a!r}+{b!r}")

    @property
    def order(self) -> int:
        return len(self.elements)

    def sorted_elements(self) -> list:
        g = self.parent
        return sorted(self.elements, key=g.index)

    def cosets(self) -> list[tuple]:
        """All cosets, each sorted, ordered by their minimal element."""
        g = self.parent
        seen: set = set()
        out = []
        for a in g.elements():
            if a in seen:
                continue
            coset = sorted((g.add(a, h) for h in self.elements), key=g.index)
            seen.update(coset)
            out.append(tuple(coset))
        return out


def subgroup(parent: FiniteGroup, elements: Iterable) -> Subgroup:
    return Subgroup(parent, frozenset(elements))


def trivial_subgroup(parent: FiniteGroup) -> Subgroup:
    return Subgroup(parent, frozenset([parent.zero()]))


# ---------------------------------------------------------------------------
# descriptors


_FACTOR_RE = re.compile(r"Z(\d+)$|GF\(([^)]*)\)$")


def make_group(spec: str | Sequence[Factor]) -> FiniteGroup:
    """Build a group from a descriptor string (or a factor sequence).

    A product of fields only is returned as a ProductRing, so ring helpers
    are available whenever they make sense.
    """
    if not isinstance(spec, str):
        factors = list(spec)
    else:
        factors = [_parse_factor(tok) for tok in _split_factors(spec)]
    if factors and all(f.is_field for f in factors):
        return ProductRing(factors)  # type: ignore[arg-type]
    return FiniteGroup(factors)


def _split_factors(spec: str) -> list[str]:
    toks = []
    depth = 0
    current = ""
    for ch in spec.strip():
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "x" and depth == 0:
            toks.append(current)
            current = ""
        else:
            current += ch
    toks.append(current)
    if any(not t for t in toks):
        raise GroupError(f"malformed group descriptor {spec!r}")
    return toks


def _parse_factor(tok: str) -> Factor:
    m = _FACTOR_RE.match(tok)
    if not m:
        raise GroupError(f"malformed factor {tok!r}")
    if m.group(1) is not None:
        n = int(m.group(1))
        if n < 2:
            raise GroupError(f"cyclic order must be >= 2, got {n}")
        return CyclicFactor(n)
    body = m.group(2)
    poly: tuple[int, ...] | None = None
    if ";" in body:
        body, opts = body.split(";", 1)
        if not opts.startswith("poly="):
            raise GroupError(f"unknown field option {opts!r}")
        poly = tuple(int(c) for c in opts[len("poly="):].split(","))
    if "^" in body:
        p_s, d_s = body.split("^", 1)
        p, d = int(p_s), int(d_s)
    else:
        q = int(body)
        fac = factorize(q)
        if len(fac) != 1:
            raise GroupError(f"GF({q}): order is not a prime power")
        (p, d), = fac.items()
    return FiniteField(p, d, poly)


# ---------------------------------------------------------------------------
# multiplicative helpers used by the constructions


def fourth_root(ring: ProductRing) -> Element:
    """Componentwise primitive fourth root of 1, i.e. x with x^2 = -1.

    Each constituent field must have order congruent to 1 mod 4.  The
    canonical choice is the smallest qualifying element per field in
    enumeration order.
    """
    roots = []
    for f in ring.factors:
        if f.order % 4 != 1:
            raise GroupError(f"field order {f.order} is not 1 mod 4")
        root = None
        for a in range(1, f.order):
            if f.mul(a, a) == f.neg(1):
                root = a
                break
        if root is None:  # unreachable for q = 1 mod 4
            raise GroupError(f"no fourth root of unity in GF({f.order})")
        roots.append(root)
    return ring.from_coords(roots)


def orbit_representatives(ring: ProductRing, x: Element) -> list[Element]:
    """Representatives of the orbits of U = {1, x, -1, -x} on nonzero elements.

    Picks the smallest element of each orbit in enumeration order and checks
    that the action is semiregular, i.e. every orbit has size exactly 4 and
    the orbits tile the nonzero elements.
    """
    u = [ring.one(), x, ring.neg(ring.one()), ring.neg(x)]
    if len(set(u)) != 4:
        raise GroupError(f"{x!r} does not generate a group of order 4")
    seen: set = set()
    reps = []
    for a in ring.elements():
        if a == ring.zero() or a in seen:
            continue
        orbit = {ring.mul(a, e) for e in u}
        if len(orbit) != 4 or orbit & seen:
            raise GroupError(f"action of U is not semiregular at {a!r}")
        reps.append(a)
        seen.update(orbit)
    return reps


def index6_cosets(fld: FiniteField) -> tuple[frozenset[int], list[frozenset[int]]]:
    """The subgroup C^6 of sixth powers and its 6 cosets in GF(q)*.

    Requires q = 1 mod 12, which also forces -1 into C^6.
    """
    q = fld.q
    if q % 12 != 1:
        raise GroupError(f"q={q} is not 1 mod 12")
    c6 = frozenset(fld.pow(a, 6) for a in fld.units())
    gen = fld.multiplicative_generator()
    cosets = []
    g_i = 1
    for _ in range(6):
        cosets.append(frozenset(fld.mul(g_i, c) for c in c6))
        g_i = fld.mul(g_i, gen)
    return c6, cosets


def coset_of(value: int, cosets: Sequence[frozenset[int]]) -> int:
    for i, coset in enumerate(cosets):
        if value in coset:
            return i
    raise GroupError(f"{value} lies in no coset (is it zero?)")


def coset_system_check(
    values: Sequence[int],
    c6: frozenset[int],
    cosets: Sequence[frozenset[int]],
    mode: str,
) -> tuple[bool, dict | None]:
    """Check a list of units against the coset system of C^6.

    mode="complete": the values hit each of the 6 cosets exactly once.
    mode="partial":  the values hit pairwise distinct cosets, none of which
    is C^6 itself.  Returns (ok, witness); the witness names the first
    offending value and its coset index.
    """
    if mode not in ("complete", "partial"):
        raise GroupError(f"unknown mode {mode!r}")
    if any(v == 0 for v in values):
        return False, {"value": 0, "reason": "zero is not a unit"}
    hit: dict[int, int] = {}
    for v in values:
        i = coset_of(v, cosets)
        if i in hit:
            return False, {"value": v, "coset": i, "reason": "coset hit twice"}
        hit[i] = v
    if mode == "complete":
        if len(hit) != 6:
            missing = next(i for i in range(6) if i not in hit)
            return False, {"coset": missing, "reason": "coset not represented"}
        return True, None
    c6_index = coset_of(next(iter(c6)), cosets)
    if c6_index in hit:
        return False, {"value": hit[c6_index], "coset": c6_index, "reason": "value lies in C6"}
    return True, None
