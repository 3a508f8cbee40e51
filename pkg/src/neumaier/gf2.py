"""Binary field arithmetic, Boolean-function Walsh analysis, bent
functions, and line spreads of F x F for F = GF(2^n).

The ambient group of a spread is the elementary abelian group C2^(2n)
with the coordinate layout fixed as index = x * 2^n + y (x bits major,
y bits minor), so element indices are stable for downstream consumers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NeumaierError, NotBentError
from .groups import FiniteGroup, make_group

# Fixed irreducible reduction polynomials per degree (low-weight, standard).
# Constructors verify irreducibility, so an override is checked too.
DEFAULT_POLYS = {
    1: 0b11,                 # x + 1
    2: 0b111,                # x^2 + x + 1
    3: 0b1011,               # x^3 + x + 1
    4: 0b10011,              # x^4 + x + 1
    5: 0b100101,             # x^5 + x^2 + 1
    6: 0b1000011,            # x^6 + x + 1
    7: 0b10000011,           # x^7 + x + 1
    8: 0b100011011,          # x^8 + x^4 + x^3 + x + 1
    9: 0b1000000011,         # x^9 + x + 1
    10: 0b10000001001,       # x^10 + x^3 + 1
    11: 0b100000000101,      # x^11 + x^2 + 1
    12: 0b1000000001001,     # x^12 + x^3 + 1
    13: 0b10000000011011,    # x^13 + x^4 + x^3 + x + 1
    14: 0b100000000100001,   # x^14 + x^5 + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0b10000000000101011, # x^16 + x^5 + x^3 + x + 1
}


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_mod(a: int, p: int) -> int:
    dp = _poly_degree(p)
    while a.bit_length() - 1 >= dp and a:
        a ^= p << (a.bit_length() - 1 - dp)
    return a


def _poly_mul_nomod(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def is_irreducible(p: int) -> bool:
    """Trial division by every polynomial of degree 1..deg(p)//2."""
    d = _poly_degree(p)
    if d < 1:
        return False
    for deg in range(1, d // 2 + 1):
        for low in range(1 << deg):
            q = (1 << deg) | low
            if _poly_divides(q, p):
                return False
    return True


def _poly_divides(q: int, p: int) -> bool:
    return _poly_mod(p, q) == 0


@dataclass(frozen=True)
class BinaryField:
    """GF(2^degree) with elements 0..2^degree-1 as polynomial bitmasks."""

    degree: int
    poly: int

    def __post_init__(self):
        if self.degree < 1 or self.degree > 16:
            raise NeumaierError(f"field degree {self.degree} out of range 1..16")
        if _poly_degree(self.poly) != self.degree:
            raise NeumaierError("reduction polynomial degree mismatch")
        if not is_irreducible(self.poly):
            raise NeumaierError(f"polynomial {bin(self.poly)} is reducible")

    @staticmethod
    def of_degree(degree: int, poly: int | None = None) -> "BinaryField":
        return BinaryField(degree, DEFAULT_POLYS[degree] if poly is None else poly)

    @property
    def size(self) -> int:
        return 1 << self.degree


def gf_mul(f: BinaryField, a: int, b: int) -> int:
    """Carryless product reduced modulo the field polynomial."""
    if not (0 <= a < f.size and 0 <= b < f.size):
        raise ValueError("field element out of range")
    return _poly_mod(_poly_mul_nomod(a, b), f.poly)


def gf_pow(f: BinaryField, a: int, e: int) -> int:
    out = 1
    while e:
        if e & 1:
            out = gf_mul(f, out, a)
        a = gf_mul(f, a, a)
        e >>= 1
    return out


@dataclass(frozen=True)
class BooleanFunction:
    """A Boolean function by its truth table; table[x] = f(x)."""

    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != 1 << self.arity:
            raise NeumaierError("truth table length is not 2^arity")
        if any(v not in (0, 1) for v in self.table):
            raise NeumaierError("truth table entries must be bits")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def to_hex(self) -> str:
        """Serialize as '<arity>:<hex>' with bit x of the integer = f(x)."""
        value = sum(v << x for x, v in enumerate(self.table))
        width = max(1, (1 << self.arity) // 4)
        return f"{self.arity}:{value:0{width}x}"

    @staticmethod
    def from_hex(text: str) -> "BooleanFunction":
        arity_s, _, hexpart = text.partition(":")
        arity = int(arity_s)
        value = int(hexpart, 16)
        table = tuple((value >> x) & 1 for x in range(1 << arity))
        return BooleanFunction(arity, table)

    @staticmethod
    def from_callable(arity: int, fn) -> "BooleanFunction":
        return BooleanFunction(arity, tuple(fn(x) & 1 for x in range(1 << arity)))


def walsh_spectrum(f: BooleanFunction) -> tuple[int, ...]:
    """W_f(u) = sum_x (-1)^(f(x) + u.x), computed by the fast transform."""
    if f.arity > 24:
        raise NeumaierError("arity too large for the spectrum")
    signs = 1 - 2 * np.array(f.table, dtype=np.int64)
    n = signs.size
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            a = signs[start:start + h].copy()
            b = signs[start + h:start + 2 * h].copy()
            signs[start:start + h] = a + b
            signs[start + h:start + 2 * h] = a - b
        h *= 2
    return tuple(int(v) for v in signs)


def is_bent(f: BooleanFunction) -> bool:
    """Flat Walsh spectrum: |W_f(u)| = 2^(n/2) for every u (n even)."""
    if f.arity % 2:
        raise NotBentError("bent functions need an even number of variables")
    target = 1 << (f.arity // 2)
    return all(abs(w) == target for w in walsh_spectrum(f))


def maiorana_mcfarland(half: int) -> BooleanFunction:
    """Inner-product function f(x, y) = x.y on 2*half variables.

    Variable x_i is bit (2*half - i) of the input index, so the x block
    occupies the high bits and pairs with the y block below it.
    """
    if half < 1:
        raise ValueError("half must be >= 1")
    n = 2 * half
    mask = (1 << half) - 1
    table = tuple(
        ((z >> half) & z & mask).bit_count() & 1 for z in range(1 << n))
    return BooleanFunction(n, table)


@dataclass(frozen=True)
class SpreadFamily:
    """Pairwise trivially-intersecting order-2^n subgroups of C2^(2n).

    Lines are given as index sets of the ambient group with the fixed
    x-major layout; the baseline A0 = {(a, 0)} is the slope-0 line and is
    never a member of the family.
    """

    n: int
    group: FiniteGroup
    lines: tuple[frozenset[int], ...]
    baseline: frozenset[int]

    @cached_property
    def descriptor(self) -> str:
        return self.group.descriptor

    def __post_init__(self):
        for i, a in enumerate(self.lines):
            if len(a & self.baseline) != 1:
                raise NeumaierError(f"line {i} meets the baseline nontrivially")
            for j in range(i + 1, len(self.lines)):
                if len(a & self.lines[j]) != 1:
                    raise NeumaierError(f"lines {i} and {j} meet nontrivially")


def spread_family(n: int, count: int,
                  field: BinaryField | None = None) -> SpreadFamily:
    """The first ``count`` lines of the standard spread of F x F.

    Lines are {(x, s*x) : x in F} for slopes s = 1, 2, ... in field-element
    order, followed by the vertical line {(0, y)} as the 2^n-th; all of
    them intersect the slope-0 baseline A0 = {(a, 0)} trivially.
    """
    if n < 1:
        raise ValueError("n must be positive")
    f = field if field is not None else BinaryField.of_degree(n)
    size = 1 << n
    if count < 1 or count > size:
        raise NeumaierError(f"count must be in 1..{size}")
    group = make_group(f"C2^{2 * n}")
    lines = []
    for slope in range(1, size):
        if len(lines) == count:
            break
        lines.append(frozenset((x << n) | gf_mul(f, slope, x) for x in range(size)))
    if len(lines) < count:
        lines.append(frozenset(y for y in range(size)))  # the vertical line x=0
    baseline = frozenset(x << n for x in range(size))
    return SpreadFamily(n, group, tuple(lines), baseline)
