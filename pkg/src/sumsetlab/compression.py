"""Linear compressions along basis lines and the compressed-sumset formula.

Compressing a set along the lines parallel to a basis vector replaces each
line section by a left-justified run of lattice points of the same size;
composing both axes yields a staircase set whose per-line cardinalities form
a non-increasing profile.  The size of a sum of two staircases is a pure
function of the two profiles, which is what `compressed_sumset_size` computes.
"""
from __future__ import annotations

from fractions import Fraction

from .geometry import (
    OrderedBasis,
    Point,
    PointSet,
    STANDARD_BASIS,
    change_basis,
    inverse_change_basis,
)

__all__ = ["Profile", "compress_axis", "compress_full", "profile_of", "compressed_sumset_size"]


class Profile(tuple):
    """Non-increasing tuple of positive per-line cardinalities."""

    def __new__(cls, counts):
        vals = tuple(int(c) for c in counts)
        if not vals:
            raise ValueError("empty profile")
        if any(c < 1 for c in vals):
            raise ValueError("profile entries must be positive")
        if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
            raise ValueError("profile must be non-increasing")
        return super().__new__(cls, vals)

    def to_json(self) -> list[int]:
        return list(self)


def compress_axis(s: PointSet, b: OrderedBasis = STANDARD_BASIS, axis: int = 1) -> PointSet:
    """Compress s along lines parallel to basis vector x1 (axis=1) or x2.

    Each line section of r points becomes {0, 1, ..., r-1} in the compressed
    coordinate; cardinality and per-line counts are preserved.  The result is
    returned in original coordinates.
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    if len(s) == 0:
        raise ValueError("empty operand")
    coords = change_basis(s, b)
    lines: dict[Fraction, int] = {}
    for c1, c2 in coords:
        key = c2 if axis == 1 else c1
        lines[key] = lines.get(key, 0) + 1
    out = []
    for key, r in lines.items():
        for i in range(r):
            out.append(Point(Fraction(i), key) if axis == 1 else Point(key, Fraction(i)))
    return inverse_change_basis(PointSet(out), b)


def compress_full(s: PointSet, b: OrderedBasis = STANDARD_BASIS) -> PointSet:
    """Compress along x1 then x2, producing a staircase set."""
    return compress_axis(compress_axis(s, b, 1), b, 2)


def profile_of(s: PointSet, b: OrderedBasis = STANDARD_BASIS) -> Profile:
    """Non-increasing x1-line cardinalities of the fully compressed set."""
    coords = change_basis(compress_full(s, b), b)
    lines: dict[Fraction, int] = {}
    for _, c2 in coords:
        lines[c2] = lines.get(c2, 0) + 1
    return Profile(sorted(lines.values(), reverse=True))


def compressed_sumset_size(a, b) -> int:
    """Size of the sum of two staircase sets with profiles a and b.

    Equals sum over l = 2..m+n of max_i {a_i + b_{l-i}} minus (m+n-1).
    """
    a = Profile(a)
    b = Profile(b)
    m, n = len(a), len(b)
    total = 0
    for l in range(2, m + n + 1):
        lo = max(1, l - n)
        hi = min(m, l - 1)
        total += max(a[i - 1] + b[l - i - 1] for i in range(lo, hi + 1))
    return total - (m + n - 1)
