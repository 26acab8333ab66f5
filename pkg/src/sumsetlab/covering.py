"""Covering point sets by parallel lines: h1 and per-direction witnesses.

h1(A, B) is the least t such that A fits in t parallel lines and B in t
lines of the same direction; equivalently the minimum over directions of
max(line_count(A, d), line_count(B, d)).  Minimizing over the canonical
directions of intra-set pairwise differences is exact: any other direction
covers each set one point per line and is dominated by every candidate.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import (
    Direction,
    PointSet,
    difference_directions,
    direction,
    line_count,
)

__all__ = ["CoveringWitness", "candidate_directions", "h1"]


@dataclass(frozen=True)
class CoveringWitness:
    direction: Direction
    lines_a: int
    lines_b: int
    h: int

    def to_json(self) -> dict:
        return {
            "direction": [self.direction.dx, self.direction.dy],
            "lines_a": self.lines_a,
            "lines_b": self.lines_b,
            "h": self.h,
        }


def candidate_directions(a: PointSet, b: PointSet) -> list[Direction]:
    """Canonical directions of all pairwise differences within a and within b.

    Two singletons admit no differences; (1, 0) is returned as the sole
    candidate in that case.
    """
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty operand")
    dirs = difference_directions(a) | difference_directions(b)
    if not dirs:
        return [direction(1, 0)]
    return sorted(dirs)


def _span(coords) -> tuple[int, int]:
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    return max(xs) - min(xs), max(ys) - min(ys)


def _lines_lower_bound(n: int, span: tuple[int, int], d: Direction) -> int:
    # On an integer lattice, consecutive points of a line with primitive
    # direction d are exactly d apart, so a line holds at most K points
    # inside the bounding box; n points then need at least ceil(n/K) lines.
    sx, sy = span
    k = None
    if d.dx != 0:
        k = sx // abs(d.dx)
    if d.dy != 0:
        ky = sy // abs(d.dy)
        k = ky if k is None else min(k, ky)
    k = (k if k is not None else 0) + 1
    return -(-n // k)


def _line_count_ints(coords, d: Direction) -> int:
    return len({d.dy * x - d.dx * y for x, y in coords})


def h1(a: PointSet, b: PointSet) -> CoveringWitness:
    """Minimize max(line_count(a, d), line_count(b, d)) over candidates.

    Ties break toward the smallest canonical direction.
    """
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty operand")
    if len(a) == 1 and len(b) == 1:
        return CoveringWitness(direction(1, 0), 1, 1, 1)
    dirs = candidate_directions(a, b)
    ca = a.lattice_coords()
    cb = b.lattice_coords()
    span_a = _span(ca)
    span_b = _span(cb)
    best: CoveringWitness | None = None
    for d in dirs:
        if best is not None:
            lb = max(
                _lines_lower_bound(len(ca), span_a, d),
                _lines_lower_bound(len(cb), span_b, d),
            )
            if lb >= best.h:
                continue
        la = _line_count_ints(ca, d)
        if best is not None and la >= best.h:
            continue
        lb_count = _line_count_ints(cb, d)
        h = max(la, lb_count)
        if best is None or h < best.h:
            best = CoveringWitness(d, la, lb_count, h)
    assert best is not None
    return best


def line_counts_along(a: PointSet, b: PointSet, d: Direction) -> tuple[int, int]:
    """Convenience: (line_count(a, d), line_count(b, d))."""
    return line_count(a, d), line_count(b, d)
