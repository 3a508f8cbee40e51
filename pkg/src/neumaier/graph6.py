"""Bit-exact graph6 encoding and decoding.

Follows the standard format: N(n) header, then the upper triangle of the
adjacency matrix in column order x(0,1), x(0,2), x(1,2), x(0,3), ...,
packed into 6-bit groups offset by 63.
"""
from __future__ import annotations

from .graphs import DenseGraph, from_edges


def _encode_n(n: int) -> bytes:
    if n < 0:
        raise ValueError("negative vertex count")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126, ((n >> 12) & 63) + 63, ((n >> 6) & 63) + 63,
                      (n & 63) + 63])
    raise ValueError("vertex count too large for this encoder")


def _decode_n(data: bytes) -> tuple[int, int]:
    if not data:
        raise ValueError("empty graph6 data")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) < 4:
        raise ValueError("truncated graph6 header")
    if data[1] == 126:
        raise ValueError("graph6 graphs beyond 258047 vertices unsupported")
    n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
    return n, 4


def encode_graph6(g: DenseGraph) -> bytes:
    n = g.vcount
    out = bytearray(_encode_n(n))
    bits: list[int] = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if g.adjacent(i, j) else 0)
    while len(bits) % 6:
        bits.append(0)
    for i in range(0, len(bits), 6):
        word = 0
        for b in bits[i:i + 6]:
            word = (word << 1) | b
        out.append(word + 63)
    return bytes(out)


def decode_graph6(data: bytes) -> DenseGraph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    n, pos = _decode_n(data)
    need = (n * (n - 1) // 2 + 5) // 6
    body = data[pos:pos + need]
    if len(body) < need:
        raise ValueError("truncated graph6 body")
    bits: list[int] = []
    for ch in body:
        word = ch - 63
        if word < 0 or word > 63:
            raise ValueError(f"invalid graph6 byte {ch}")
        bits.extend((word >> shift) & 1 for shift in range(5, -1, -1))
    edges = []
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if bits[idx]:
                edges.append((i, j))
            idx += 1
    return from_edges(n, edges)
