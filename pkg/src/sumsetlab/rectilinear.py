"""Finite unions of axis-aligned rational rectangles.

The rectilinear class is closed under Minkowski sums and admits exact
area/projection arithmetic, which is all the continuous sumset inequality
needs.  Unions are stored in a canonical banded form: maximal horizontal
bands inside which the x-cross-section is constant, each band holding its
maximal disjoint x-intervals.  Two unions describing the same point set
normalize to identical representations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .geometry import format_rational, parse_rational
from .report import COUNTEREXAMPLE, CheckResult, SqrtExpr, TIGHT, VERIFIED

__all__ = ["Rect", "RectUnion", "mink_sum_rect", "check_thm22"]


class Rect(NamedTuple):
    x0: Fraction
    x1: Fraction
    y0: Fraction
    y1: Fraction


def _rect(x0, x1, y0, y1) -> Rect:
    r = Rect(parse_rational(x0), parse_rational(x1), parse_rational(y0), parse_rational(y1))
    if not (r.x0 < r.x1 and r.y0 < r.y1):
        raise ValueError("degenerate rectangle")
    return r


def _merge_intervals(intervals: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    # touching closed intervals merge: their union is a single interval
    intervals = sorted(intervals)
    out: list[tuple[Fraction, Fraction]] = []
    for lo, hi in intervals:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


class RectUnion:
    """Normalized union of axis-aligned rectangles with rational corners."""

    __slots__ = ("rects",)

    def __init__(self, rects: Iterable):
        parsed = [r if isinstance(r, Rect) else _rect(*r) for r in rects]
        if not parsed:
            raise ValueError("empty rectangle union")
        object.__setattr__(self, "rects", _normalize(parsed))

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("RectUnion is immutable")

    def __eq__(self, other):
        return isinstance(other, RectUnion) and self.rects == other.rects

    def __hash__(self):
        return hash(self.rects)

    def __len__(self):
        return len(self.rects)

    def __iter__(self):
        return iter(self.rects)

    def __repr__(self):
        return f"RectUnion(n={len(self.rects)}, area={format_rational(self.area())})"

    def area(self) -> Fraction:
        return sum(((r.x1 - r.x0) * (r.y1 - r.y0) for r in self.rects), Fraction(0))

    def proj_x_length(self) -> Fraction:
        merged = _merge_intervals([(r.x0, r.x1) for r in self.rects])
        return sum((hi - lo for lo, hi in merged), Fraction(0))

    def proj_y_length(self) -> Fraction:
        merged = _merge_intervals([(r.y0, r.y1) for r in self.rects])
        return sum((hi - lo for lo, hi in merged), Fraction(0))

    def translate(self, vx, vy) -> "RectUnion":
        vx, vy = parse_rational(vx), parse_rational(vy)
        return RectUnion(Rect(r.x0 + vx, r.x1 + vx, r.y0 + vy, r.y1 + vy) for r in self.rects)

    def to_json(self) -> dict:
        return {
            "rects": [
                [format_rational(r.x0), format_rational(r.x1), format_rational(r.y0), format_rational(r.y1)]
                for r in self.rects
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "RectUnion":
        if not isinstance(obj, dict) or "rects" not in obj:
            raise ValueError('rect-union JSON must be an object with a "rects" field')
        raw = obj["rects"]
        if not isinstance(raw, list) or not raw:
            raise ValueError('field "rects" must be a nonempty list')
        rects = []
        for i, entry in enumerate(raw):
            if not isinstance(entry, (list, tuple)) or len(entry) != 4:
                raise ValueError(f'field "rects[{i}]" must be [x0, x1, y0, y1]')
            try:
                rects.append(_rect(*entry))
            except (ValueError, TypeError) as exc:
                raise ValueError(f'field "rects[{i}]": {exc}') from exc
        return cls(rects)


def _normalize(rects: list[Rect]) -> tuple[Rect, ...]:
    cuts = sorted({r.y0 for r in rects} | {r.y1 for r in rects})
    bands: list[tuple[Fraction, Fraction, tuple[tuple[Fraction, Fraction], ...]]] = []
    for ylo, yhi in zip(cuts, cuts[1:]):
        xs = [(r.x0, r.x1) for r in rects if r.y0 <= ylo and r.y1 >= yhi]
        if not xs:
            continue
        merged = tuple(_merge_intervals(xs))
        if bands and bands[-1][1] == ylo and bands[-1][2] == merged:
            bands[-1] = (bands[-1][0], yhi, merged)
        else:
            bands.append((ylo, yhi, merged))
    out = []
    for ylo, yhi, merged in bands:
        for lo, hi in merged:
            out.append(Rect(lo, hi, ylo, yhi))
    return tuple(out)


def mink_sum_rect(a: RectUnion, b: RectUnion) -> RectUnion:
    """Minkowski sum: rectangle + rectangle is a rectangle; unions distribute."""
    sums = [
        Rect(ra.x0 + rb.x0, ra.x1 + rb.x1, ra.y0 + rb.y0, ra.y1 + rb.y1)
        for ra in a.rects
        for rb in b.rects
    ]
    return RectUnion(sums)


def brunn_minkowski_rhs(a: RectUnion, b: RectUnion) -> SqrtExpr:
    """(sqrt(area a) + sqrt(area b))^2 = areas summed plus 2*sqrt(product)."""
    ma, mb = a.area(), b.area()
    return SqrtExpr(ma + mb, Fraction(2), ma * mb)


def check_thm22(a: RectUnion, b: RectUnion) -> CheckResult:
    """Verify area(A+B) >= (areaA/projA + areaB/projB)(projA + projB) exactly.

    Also reports the Brunn-Minkowski comparison value and whether the
    projection bound dominates it, plus the rational equality
    characterization projA^2 * areaB = projB^2 * areaA.
    """
    lhs = mink_sum_rect(a, b).area()
    area_a, area_b = a.area(), b.area()
    proj_a, proj_b = a.proj_x_length(), b.proj_x_length()
    rhs = (area_a / proj_a + area_b / proj_b) * (proj_a + proj_b)
    bm = brunn_minkowski_rhs(a, b)
    inputs = {"a": a.to_json(), "b": b.to_json()}
    audit = {
        "area_a": area_a,
        "area_b": area_b,
        "proj_a": proj_a,
        "proj_b": proj_b,
        "sum_area": lhs,
        "rhs": rhs,
        "brunn_minkowski": bm,
        "sum_ge_bm": bm.test_ge(lhs),
        "rhs_ge_bm": bm.test_ge(rhs),
        "bm_equality_characterization": proj_a * proj_a * area_b == proj_b * proj_b * area_a,
    }
    if lhs < rhs or not audit["sum_ge_bm"] or not audit["rhs_ge_bm"]:
        return CheckResult("eq12", COUNTEREXAMPLE, inputs, audit)
    if lhs == rhs:
        return CheckResult("eq12", TIGHT, inputs, audit)
    return CheckResult("eq12", VERIFIED, inputs, audit)
