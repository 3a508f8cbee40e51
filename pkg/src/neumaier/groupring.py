"""Integer group-ring arithmetic over a finite group.

A group-ring element is a length-v integer coefficient vector; products
are convolutions over the group multiplication.  Coefficients are exact
Python integers, so there is no overflow to guard against.
"""
from __future__ import annotations

from .groups import FiniteGroup

GroupRingVector = tuple


def indicator(g: FiniteGroup, xs) -> tuple[int, ...]:
    """Indicator vector of a subset of G."""
    coeffs = [0] * g.order
    for x in xs:
        coeffs[x] = 1
    return tuple(coeffs)


def delta(g: FiniteGroup, x: int) -> tuple[int, ...]:
    coeffs = [0] * g.order
    coeffs[x] = 1
    return tuple(coeffs)


def convolve(a, b, g: FiniteGroup) -> tuple[int, ...]:
    """Product of two group-ring vectors: out[x*y] += a[x]*b[y]."""
    v = g.order
    if len(a) != v or len(b) != v:
        raise ValueError("vector length does not match group order")
    out = [0] * v
    mul = g.mul
    bs = [(y, by) for y, by in enumerate(b) if by]
    for x, ax in enumerate(a):
        if not ax:
            continue
        row = mul[x]
        for y, by in bs:
            out[row[y]] += ax * by
    return tuple(out)


def add(a, b) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def scale(c: int, a) -> tuple[int, ...]:
    return tuple(c * x for x in a)


def difference_counts(g: FiniteGroup, t) -> tuple[int, ...]:
    """Counts of ordered differences t1*t2^-1 over pairs from t.

    Equals convolve(indicator(t), indicator(t^-1)); computed directly
    from the pair loop, which is faster for small sets.
    """
    out = [0] * g.order
    ts = sorted(t)
    mul, inv = g.mul, g.inv
    for t1 in ts:
        row = mul[t1]
        for t2 in ts:
            out[row[inv[t2]]] += 1
    return tuple(out)
