"""Exact rational planar primitives.

Points, deduplicated point sets, Minkowski sums, parallel-line counts,
collinearity, convex hulls and basis changes.  Every coordinate is a
`fractions.Fraction` and every comparison is exact; floats are rejected
at the boundary so no verdict downstream can be corrupted by rounding.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "Point",
    "PointSet",
    "Direction",
    "OrderedBasis",
    "STANDARD_BASIS",
    "parse_rational",
    "format_rational",
    "point",
    "direction",
    "direction_between",
    "basis",
    "minkowski_sum",
    "line_count",
    "max_collinear",
    "convex_hull_vertices",
    "change_basis",
    "inverse_change_basis",
    "pointset_to_json",
    "pointset_from_json",
]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/[1-9]\d*)?$")


def parse_rational(value) -> Fraction:
    """Parse a decimal-free rational string ("3", "-7/2") into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floating-point input rejected; pass a rational string")
    text = str(value).strip()
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational string: {value!r}")
    return Fraction(text)


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Point(NamedTuple):
    x: Fraction
    y: Fraction


def point(x, y) -> Point:
    return Point(parse_rational(x), parse_rational(y))


class Direction(NamedTuple):
    """Primitive integer vector naming a family of parallel lines.

    Canonical sign: dx > 0, or dx = 0 and dy > 0; gcd(|dx|, |dy|) = 1.
    """

    dx: int
    dy: int


def direction(dx: int, dy: int) -> Direction:
    dx, dy = int(dx), int(dy)
    if dx == 0 and dy == 0:
        raise ValueError("zero vector has no direction")
    g = math.gcd(abs(dx), abs(dy))
    dx, dy = dx // g, dy // g
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    return Direction(dx, dy)


def direction_between(p: Point, q: Point) -> Direction:
    """Canonical direction of the segment pq (p != q); exact for rationals."""
    vx = q[0] - p[0]
    vy = q[1] - p[1]
    scale = _lcm(vx.denominator, vy.denominator)
    return direction(vx * scale, vy * scale)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class PointSet:
    """Finite set of rational points, deduplicated and sorted lexicographically.

    Set equality is representation equality.  Instances are immutable and
    hashable; no operation mutates its inputs.
    """

    __slots__ = ("points",)

    def __init__(self, pts: Iterable = ()):
        cleaned = set()
        for p in pts:
            if isinstance(p, Point):
                cleaned.add(p)
            else:
                x, y = p
                cleaned.add(point(x, y))
        object.__setattr__(self, "points", tuple(sorted(cleaned)))

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("PointSet is immutable")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return p in set(self.points)

    def __eq__(self, other):
        return isinstance(other, PointSet) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        inner = ", ".join(f"({format_rational(p.x)},{format_rational(p.y)})" for p in self.points[:6])
        tail = ", ..." if len(self.points) > 6 else ""
        return f"PointSet([{inner}{tail}], n={len(self.points)})"

    def translate(self, v) -> "PointSet":
        vx, vy = parse_rational(v[0]), parse_rational(v[1])
        return PointSet(Point(p.x + vx, p.y + vy) for p in self.points)

    def difference(self, other: "PointSet") -> "PointSet":
        drop = set(other.points)
        return PointSet(p for p in self.points if p not in drop)

    def union(self, other: "PointSet") -> "PointSet":
        return PointSet(self.points + other.points)

    def is_integral(self) -> bool:
        return all(p.x.denominator == 1 and p.y.denominator == 1 for p in self.points)

    def lattice_coords(self) -> list[tuple[int, int]]:
        """Coordinates scaled by the common denominator of the set.

        Scaling the whole plane leaves every direction, line count and
        collinearity relation unchanged, so integer coordinates can stand in
        for the rational ones wherever only incidences matter.
        """
        scale = 1
        for p in self.points:
            scale = _lcm(scale, _lcm(p.x.denominator, p.y.denominator))
        return [(int(p.x * scale), int(p.y * scale)) for p in self.points]


def _require_nonempty(*sets: PointSet):
    for s in sets:
        if len(s) == 0:
            raise ValueError("empty operand")


def minkowski_sum(a: PointSet, b: PointSet) -> PointSet:
    """All pairwise sums {p+q : p in a, q in b}, deduplicated."""
    _require_nonempty(a, b)
    return PointSet(Point(p.x + q.x, p.y + q.y) for p in a for q in b)


def line_count(s: PointSet, d: Direction) -> int:
    """Number of lines of direction d needed to cover s.

    Counts distinct values of the linear functional dy*x - dx*y.
    """
    _require_nonempty(s)
    return len({d.dy * p.x - d.dx * p.y for p in s})


def max_collinear(s: PointSet) -> int:
    """Maximum number of points of s lying on a single line."""
    _require_nonempty(s)
    pts = s.points
    n = len(pts)
    if n == 1:
        return 1
    # k collinear points contribute C(k,2) pairs to the same (direction, line) key
    pair_counts: dict = {}
    for i in range(n):
        pi = pts[i]
        for j in range(i + 1, n):
            d = direction_between(pi, pts[j])
            key = (d, d.dy * pi.x - d.dx * pi.y)
            pair_counts[key] = pair_counts.get(key, 0) + 1
    best = max(pair_counts.values())
    return (1 + math.isqrt(1 + 8 * best)) // 2


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def convex_hull_vertices(s: PointSet) -> list[Point]:
    """Convex hull vertices in counterclockwise order, collinear points excluded.

    A fully collinear set yields its two endpoints; a singleton yields itself.
    """
    _require_nonempty(s)
    pts = list(s.points)
    if len(pts) == 1:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if hull else [pts[0]]


class OrderedBasis(NamedTuple):
    x1: Point
    x2: Point


def basis(x1, x2) -> OrderedBasis:
    b = OrderedBasis(point(*x1), point(*x2))
    if _det(b) == 0:
        raise ValueError("degenerate basis")
    return b


def _det(b: OrderedBasis) -> Fraction:
    return b.x1.x * b.x2.y - b.x1.y * b.x2.x


STANDARD_BASIS = OrderedBasis(Point(Fraction(1), Fraction(0)), Point(Fraction(0), Fraction(1)))


def change_basis(s: PointSet, b: OrderedBasis) -> PointSet:
    """Rewrite each point in (x1, x2)-coordinates of the basis."""
    _require_nonempty(s)
    det = _det(b)
    if det == 0:
        raise ValueError("degenerate basis")
    if b == STANDARD_BASIS:
        return s
    out = []
    for p in s:
        c1 = (p.x * b.x2.y - p.y * b.x2.x) / det
        c2 = (b.x1.x * p.y - b.x1.y * p.x) / det
        out.append(Point(c1, c2))
    return PointSet(out)


def inverse_change_basis(s: PointSet, b: OrderedBasis) -> PointSet:
    """Map (c1, c2) basis coordinates back to the original plane."""
    _require_nonempty(s)
    if _det(b) == 0:
        raise ValueError("degenerate basis")
    if b == STANDARD_BASIS:
        return s
    return PointSet(
        Point(c1 * b.x1.x + c2 * b.x2.x, c1 * b.x1.y + c2 * b.x2.y) for c1, c2 in s
    )


def basis_direction(b: OrderedBasis, axis: int) -> Direction:
    """Canonical integer direction of the basis vector x1 (axis=1) or x2."""
    v = b.x1 if axis == 1 else b.x2
    scale = _lcm(v.x.denominator, v.y.denominator)
    return direction(v.x * scale, v.y * scale)


# ---------------------------------------------------------------------------
# JSON interface: {"points": [["n/d", "n/d"], ...]} with exact round-trip.

def pointset_to_json(s: PointSet) -> dict:
    return {"points": [[format_rational(p.x), format_rational(p.y)] for p in s.points]}


def pointset_from_json(obj) -> PointSet:
    if not isinstance(obj, dict) or "points" not in obj:
        raise ValueError('point-set JSON must be an object with a "points" field')
    raw = obj["points"]
    if not isinstance(raw, list):
        raise ValueError('field "points" must be a list')
    pts = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ValueError(f'field "points[{i}]" must be a pair of rational strings')
        try:
            pts.append(point(entry[0], entry[1]))
        except (ValueError, TypeError) as exc:
            raise ValueError(f'field "points[{i}]": {exc}') from exc
    return PointSet(pts)


# ---------------------------------------------------------------------------
# Integer fast paths shared with the covering module.

_NUMPY_PAIR_THRESHOLD = 160
_NUMPY_COORD_LIMIT = 1 << 30


def difference_directions(s: PointSet) -> set[Direction]:
    """Canonical directions of all pairwise differences within s."""
    coords = s.lattice_coords()
    n = len(coords)
    if n < 2:
        return set()
    maxabs = max(max(abs(x), abs(y)) for x, y in coords)
    if n > _NUMPY_PAIR_THRESHOLD and maxabs < _NUMPY_COORD_LIMIT:
        return _difference_directions_np(coords)
    dirs = set()
    for i in range(n):
        xi, yi = coords[i]
        for j in range(i + 1, n):
            dx = coords[j][0] - xi
            dy = coords[j][1] - yi
            g = math.gcd(abs(dx), abs(dy))
            dx, dy = dx // g, dy // g
            if dx < 0 or (dx == 0 and dy < 0):
                dx, dy = -dx, -dy
            dirs.add(Direction(dx, dy))
    return dirs


def _difference_directions_np(coords) -> set[Direction]:
    xs = np.array([c[0] for c in coords], dtype=np.int64)
    ys = np.array([c[1] for c in coords], dtype=np.int64)
    n = xs.shape[0]
    span = int(max(xs.max() - xs.min(), ys.max() - ys.min())) + 1
    packs: list[np.ndarray] = []
    chunk = max(1, (1 << 22) // n)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        dx = xs[lo:hi, None] - xs[None, :]
        dy = ys[lo:hi, None] - ys[None, :]
        dx = dx.ravel()
        dy = dy.ravel()
        keep = (dx != 0) | (dy != 0)
        dx, dy = dx[keep], dy[keep]
        g = np.gcd(np.abs(dx), np.abs(dy))
        dx //= g
        dy //= g
        flip = (dx < 0) | ((dx == 0) & (dy < 0))
        dx = np.where(flip, -dx, dx)
        dy = np.where(flip, -dy, dy)
        packs.append(np.unique(dx * (2 * span + 1) + dy))
    packed = np.unique(np.concatenate(packs))
    base = 2 * span + 1
    out = set()
    for v in packed.tolist():
        dx, dy = divmod(v, base)
        if dy > span:
            dy -= base
            dx += 1
        out.add(Direction(int(dx), int(dy)))
    return out
