"""Report types shared by the bound evaluators and the verifier.

Irrational bound values are carried symbolically as p + q*sqrt(r) with
rational p, q, r and compared against rationals by sign analysis and
squaring, so every verdict stays exact; decimals appear only in optional
display output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .geometry import format_rational, parse_rational

__all__ = [
    "SqrtExpr",
    "BoundReport",
    "CheckResult",
    "VERIFIED",
    "TIGHT",
    "UNMET",
    "COUNTEREXAMPLE",
    "value_to_json",
]

VERIFIED = "verified"
TIGHT = "tight"
UNMET = "hypothesis-unmet"
COUNTEREXAMPLE = "COUNTEREXAMPLE"


@dataclass(frozen=True)
class SqrtExpr:
    """The real number p + q*sqrt(r) with rational p, q and r >= 0."""

    p: Fraction
    q: Fraction
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", parse_rational(self.p))
        object.__setattr__(self, "q", parse_rational(self.q))
        object.__setattr__(self, "r", parse_rational(self.r))
        if self.r < 0:
            raise ValueError("negative radicand")

    def test_ge(self, k) -> bool:
        """Decide k >= p + q*sqrt(r) exactly."""
        t = parse_rational(k) - self.p
        if self.q == 0 or self.r == 0:
            return t >= 0
        q2r = self.q * self.q * self.r
        if self.q > 0:
            return t >= 0 and t * t >= q2r
        return t >= 0 or t * t <= q2r

    def test_le(self, k) -> bool:
        """Decide k <= p + q*sqrt(r) exactly."""
        u = self.p - parse_rational(k)
        if self.q == 0 or self.r == 0:
            return u >= 0
        q2r = self.q * self.q * self.r
        if self.q > 0:
            return u >= 0 or u * u <= q2r
        return u >= 0 and u * u >= q2r

    def equals(self, k) -> bool:
        return self.test_ge(k) and self.test_le(k)

    def approx(self) -> float:
        return float(self.p) + float(self.q) * float(self.r) ** 0.5

    def to_json(self) -> dict:
        return {
            "p": format_rational(self.p),
            "q": format_rational(self.q),
            "r": format_rational(self.r),
        }


def value_to_json(v, approx: bool = False):
    """Serialize a bound value: rationals as "n/d", surds as {p, q, r}."""
    if v is None:
        return None
    if isinstance(v, SqrtExpr):
        out = v.to_json()
        if approx:
            out["approx"] = v.approx()
        return out
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        if approx:
            return {"exact": format_rational(v), "approx": float(v)}
        return format_rational(v)
    return v


@dataclass
class BoundReport:
    """Evaluated bound values with their hypothesis flags.

    `values` maps clause names to exact bound values (Fraction or SqrtExpr);
    `flags` maps hypothesis names to True/False, or None when a clause is
    not applicable or the flag must be injected by the caller.
    """

    theorem: str
    cardinality_a: int
    cardinality_b: int
    params: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def to_json(self, approx: bool = False) -> dict:
        return {
            "theorem": self.theorem,
            "cardinality_a": self.cardinality_a,
            "cardinality_b": self.cardinality_b,
            "params": {k: v for k, v in self.params.items()},
            "values": {k: value_to_json(v, approx) for k, v in self.values.items()},
            "flags": dict(self.flags),
        }


@dataclass
class CheckResult:
    """A theorem verdict together with the quantities that support it.

    COUNTEREXAMPLE requires every hypothesis flag true and the conclusion
    false; both are re-derivable from the echoed audit quantities.
    """

    theorem: str
    verdict: str
    inputs: dict = field(default_factory=dict)
    audit: dict = field(default_factory=dict)

    @property
    def is_counterexample(self) -> bool:
        return self.verdict == COUNTEREXAMPLE

    def to_json(self, approx: bool = False) -> dict:
        def conv(v: Any):
            if isinstance(v, (Fraction, SqrtExpr)):
                return value_to_json(v, approx)
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            return v

        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "inputs": conv(self.inputs),
            "audit": conv(self.audit),
        }
