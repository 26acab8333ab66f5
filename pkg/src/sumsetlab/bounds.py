"""Closed-form sumset lower bounds, evaluated exactly.

Pure arithmetic on cardinalities and line counts; geometric hypothesis
flags (covering numbers, collinearity) are computed by the verifier and
injected where a clause needs them.  Every returned value is a Fraction
or a SqrtExpr, never a float.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .geometry import format_rational, parse_rational
from .report import (
    COUNTEREXAMPLE,
    BoundReport,
    CheckResult,
    SqrtExpr,
    UNMET,
    VERIFIED,
)

__all__ = [
    "bound_lines",
    "bound_thm2",
    "bound_thm1",
    "bound_sqrt_estimate",
    "bound_thm4",
    "bound_thm3",
    "bound_monstrous",
    "lemma21_u",
    "lemma21_equality_expected",
    "lev_smeliansky_check",
    "normalize_lev_smeliansky",
    "bracket_l",
]


def _positive(name: str, v: int) -> int:
    v = int(v)
    if v < 1:
        raise ValueError(f"{name} must be positive")
    return v


def bound_lines(sa: int, sb: int, m: int, n: int) -> Fraction:
    """(sa/m + sb/n - 1)(m + n - 1), the per-direction line-count bound."""
    sa, sb, m, n = (_positive(x, v) for x, v in (("sa", sa), ("sb", sb), ("m", m), ("n", n)))
    if m > sa or n > sb:
        raise ValueError("infeasible line count")
    return (Fraction(sa, m) + Fraction(sb, n) - 1) * (m + n - 1)


def bracket_l(sa: int, sb: int, m: int) -> int:
    """Largest integer l >= 1 with l(l-1)(sa-m) <= sb*m*(m-1).

    Exact integer bracketing of the optimizer in the line-count bound; the
    floating closed form is never consulted.  Requires m = 1 or m < sa.
    """
    if m == 1:
        return 1
    if m >= sa:
        raise ValueError("l undefined for m >= sa unless m == 1")
    target = sb * m * (m - 1)
    denom = sa - m
    l = max(1, (1 + math.isqrt(1 + 4 * (target // denom))) // 2)
    while (l + 1) * l * denom <= target:
        l += 1
    while l > 1 and l * (l - 1) * denom > target:
        l -= 1
    return l


def thm2_iii_value(sa: int, sb: int, m: int, l: int) -> Fraction:
    return sa + sb + Fraction((l - 1) * sa, m) + Fraction((m - 1) * sb, l) - (m + l - 1)


def bound_thm2(sa: int, sb: int, m: int, n: int | None = None) -> BoundReport:
    """Parts (i)-(iv) of the line-count bound at m lines through A.

    Part (i)'s m >= n clause needs the line count of B; when the caller
    does not supply n the flag covers only the cardinality condition.
    """
    sa, sb, m = _positive("sa", sa), _positive("sb", sb), _positive("m", m)
    if m > sa:
        raise ValueError("infeasible line count")
    if n is not None:
        n = _positive("n", n)
        if n > sb:
            raise ValueError("infeasible line count")
    params: dict = {"m": m}
    if n is not None:
        params["n"] = n
    values: dict = {}
    flags: dict = {}

    values["i"] = Fraction(2 * m - 1, m) * (sa + sb) - 2 * m + 1
    flags["i"] = (sa <= sb + m) and (True if n is None else m >= n)

    values["ii"] = sa + Fraction(3 * m - 2, m) * sb - m
    flags["ii"] = sa >= sb + m

    if m == sa and m > 1:
        values["iii"] = None
        flags["iii"] = None
    else:
        l = bracket_l(sa, sb, m)
        params["l"] = l
        values["iii"] = thm2_iii_value(sa, sb, m, l)
        flags["iii"] = True

    # at m == sa the radicand vanishes and (iv) collapses to the trivial |B| bound
    values["iv"] = SqrtExpr(
        sa + sb - Fraction(sa, m) - m + 1,
        Fraction(2),
        Fraction(m - 1) * (Fraction(sa, m) - 1) * sb,
    )
    flags["iv"] = True

    return BoundReport("thm2", sa, sb, params, values, flags)


def bound_thm1(sa: int, sb: int, s: int) -> BoundReport:
    """Covering-parameter bounds: both regimes with their size floors."""
    sa, sb = _positive("sa", sa), _positive("sb", sb)
    s = int(s)
    if s < 2:
        raise ValueError("s must be at least 2")
    values = {
        "i": Fraction(2 * s - 1, s) * (sa + sb) - 2 * s + 1,
        "ii": sa + Fraction(3 * s - 2, s) * sb - s,
    }
    flags = {
        "i_regime": abs(sa - sb) <= s,
        "i_size": sa + sb >= 4 * s * s - 6 * s + 3,
        "ii_regime": sa >= sb + s,
        "ii_size": 2 * sb >= 4 * s * s - 7 * s + 3,
    }
    return BoundReport("thm1", sa, sb, {"s": s}, values, flags)


def bound_sqrt_estimate(sa: int, sb: int) -> SqrtExpr:
    """2sa + 2sb + 1/2 - 3*sqrt(1/4 + sa + sb) as an exact predicate."""
    sa, sb = _positive("sa", sa), _positive("sb", sb)
    if sa + sb < 14:
        raise ValueError("requires sa + sb >= 14")
    return SqrtExpr(
        2 * sa + 2 * sb + Fraction(1, 2),
        Fraction(-3),
        Fraction(1, 4) + sa + sb,
    )


def bound_thm4(sa: int, sb: int, s: int) -> BoundReport:
    """The large-|A| regime bound sa + s(sb - 1) with its gate flags.

    Clause (a)'s expression divides by 2(sb - 2) and is reported as
    not-applicable (None) for sb <= 2.
    """
    sa, sb = _positive("sa", sa), _positive("sb", sb)
    s = int(s)
    if s < 1:
        raise ValueError("s must be positive")
    values = {"conclusion": Fraction(sa + s * (sb - 1))}
    flags: dict = {"base": 2 * sa >= s * (s - 1) * sb + 2 * s}
    if sb <= 2:
        flags["a"] = None
    else:
        lhs = 8 * (sb - 2) * sa
        rhs = (2 * s - 1) ** 2 * sb * (sb - 2) - 2 * (2 * s - 1) * (sb - 2) + 4 * (s - 1) ** 2
        flags["a"] = lhs > rhs
    flags["b"] = 3 * sb >= 2 * s + 4
    return BoundReport("thm4", sa, sb, {"s": s}, values, flags)


def bound_thm3(sa: int, sb: int, s: int) -> BoundReport:
    """No-s-collinear bounds; the collinearity flags come from the caller."""
    sa, sb = _positive("sa", sa), _positive("sb", sb)
    s = int(s)
    if s < 3:
        raise ValueError("s must be at least 3")
    values = {
        "i": Fraction(2 * sa + 2 * sb - 6 * s + 7),
        "ii": Fraction(sa + 3 * sb - 5 * s + 7),
    }
    flags = {
        "i_regime": abs(sa - sb) <= s,
        "i_size": sa + sb >= (s - 1) * (4 * s - 6) + 1,
        "ii_regime": sa >= sb + s,
        "ii_size": 2 * sb >= (s - 1) * (4 * s - 7),
        "no_collinear_a": None,
        "no_collinear_b": None,
    }
    return BoundReport("thm3", sa, sb, {"s": s}, values, flags)


def bound_monstrous(sa: int, sb: int, s: int) -> BoundReport:
    """2sa + 2sb - 6s + 7 inside the narrow cardinality window.

    The structural flag (line counts m <= n = 2s-2 with a long section in A)
    is injected by the verifier from covering data.
    """
    sa, sb = _positive("sa", sa), _positive("sb", sb)
    s = int(s)
    if s < 2:
        raise ValueError("s must be at least 2")
    k = sa + sb
    values = {"value": Fraction(2 * sa + 2 * sb - 6 * s + 7)}
    flags = {
        "window": 4 * s * s - 6 * s + 3 <= k <= 4 * s * s - 5 * s - 1,
        "size_gap": abs(sa - sb) <= s,
        "structural": None,
    }
    return BoundReport("monstrous", sa, sb, {"s": s}, values, flags)


# ---------------------------------------------------------------------------
# The max-plus convolution average bound.

def lemma21_u(a, b) -> Fraction:
    """u(a, b) = sum over i = 2..m+n of max_j {a_j + b_{i-j}}."""
    av = [parse_rational(x) for x in a]
    bv = [parse_rational(x) for x in b]
    if not av or not bv:
        raise ValueError("empty operand")
    m, n = len(av), len(bv)
    total = Fraction(0)
    for i in range(2, m + n + 1):
        lo = max(1, i - n)
        hi = min(m, i - 1)
        total += max(av[j - 1] + bv[i - j - 1] for j in range(lo, hi + 1))
    return total


def _is_arithmetic(v) -> bool:
    return all(v[i + 1] - v[i] == v[1] - v[0] for i in range(len(v) - 1))


def lemma21_equality_expected(a, b) -> bool:
    """Equality case of u(a,b) >= (m+n-1)(mean a + mean b).

    Holds exactly when one vector has length 1 or both are arithmetic
    progressions with the same common difference.
    """
    av = [parse_rational(x) for x in a]
    bv = [parse_rational(x) for x in b]
    if len(av) == 1 or len(bv) == 1:
        return True
    return _is_arithmetic(av) and _is_arithmetic(bv) and av[1] - av[0] == bv[1] - bv[0]


# ---------------------------------------------------------------------------
# The one-dimensional small-doubling check.

def _norm_ints(values, name: str) -> list[int]:
    out = sorted({int(v) for v in values})
    if not out:
        raise ValueError(f"{name} is empty")
    return out


def normalize_lev_smeliansky(a, b) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Translate minima to 0, enforce max a >= max b, divide out gcd(a).

    Fails if gcd(a) does not divide every element of b, since the two sets
    would then live on incompatible progressions.
    """
    av = _norm_ints(a, "a")
    bv = _norm_ints(b, "b")
    av = [x - av[0] for x in av]
    bv = [x - bv[0] for x in bv]
    if av[-1] < bv[-1]:
        av, bv = bv, av
    g = 0
    for x in av:
        g = math.gcd(g, x)
    if g > 1:
        if any(x % g for x in bv):
            raise ValueError("unnormalized input")
        av = [x // g for x in av]
        bv = [x // g for x in bv]
    elif g == 0:
        raise ValueError("unnormalized input")
    return tuple(av), tuple(bv)


def lev_smeliansky_check(a, b) -> CheckResult:
    """Check max A <= |A| + r on a normalized 1-D pair.

    Requires 0 = min of both sets, gcd(a) = 1 and max a >= max b; the
    hypothesis is |A+B| = |A|+|B|+r <= |A|+2|B|-3-delta with delta = 1
    exactly when the maxima agree.
    """
    av = _norm_ints(a, "a")
    bv = _norm_ints(b, "b")
    g = 0
    for x in av:
        g = math.gcd(g, x)
    if av[0] != 0 or bv[0] != 0 or g != 1 or av[-1] < bv[-1]:
        raise ValueError("unnormalized input")
    sumset = sorted({x + y for x in av for y in bv})
    r = len(sumset) - len(av) - len(bv)
    delta = 1 if av[-1] == bv[-1] else 0
    inputs = {"a": list(av), "b": list(bv)}
    audit = {
        "sumset_size": len(sumset),
        "r": r,
        "delta": delta,
        "max_a": av[-1],
        "conclusion_bound": len(av) + r,
        "hypothesis_rhs": len(av) + 2 * len(bv) - 3 - delta,
    }
    if len(sumset) > audit["hypothesis_rhs"]:
        return CheckResult("lev-smeliansky", UNMET, inputs, audit)
    if av[-1] <= len(av) + r:
        return CheckResult("lev-smeliansky", VERIFIED, inputs, audit)
    return CheckResult("lev-smeliansky", COUNTEREXAMPLE, inputs, audit)
