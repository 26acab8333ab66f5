"""Theorem-level verification on exact rational point sets.

Every check computes the sumset, covering and collinearity data it needs,
evaluates the hypothesis flags and the conclusion exactly, and returns a
CheckResult whose audit dictionary is sufficient to re-derive the verdict.
The grid sweeps use the kernel lane; any interesting instance found there
is re-checked through this module.
"""
from __future__ import annotations

from fractions import Fraction

from . import bounds as B
from .compression import compress_full, profile_of
from .covering import CoveringWitness, candidate_directions, h1
from .geometry import (
    Direction,
    Point,
    PointSet,
    convex_hull_vertices,
    line_count,
    max_collinear,
    minkowski_sum,
    pointset_to_json,
)
from .report import COUNTEREXAMPLE, CheckResult, TIGHT, UNMET, VERIFIED

__all__ = ["THEOREM_IDS", "check", "check_lemma31", "witness", "WITNESS_NAMES"]

THEOREM_IDS = ("A", "eq3", "thm1", "thm2", "thm3", "thm4", "monstrous", "hullpeel", "lemma31")

_S_REQUIRED = {"thm1": 2, "thm3": 3, "thm4": 1, "monstrous": 2, "lemma31": 3}


def _inputs(a: PointSet, b: PointSet, s: int | None) -> dict:
    out = {"a": pointset_to_json(a), "b": pointset_to_json(b)}
    if s is not None:
        out["s"] = int(s)
    return out


def _verdict(applicable: bool, violated: bool, tight: bool) -> str:
    if not applicable:
        return UNMET
    if violated:
        return COUNTEREXAMPLE
    return TIGHT if tight else VERIFIED


def _is_ap_pair(a: PointSet, b: PointSet) -> bool:
    """min cardinality 1, or both arithmetic progressions with common step."""
    if min(len(a), len(b)) == 1:
        return True

    def step(s: PointSet):
        pts = s.points
        d = (pts[1].x - pts[0].x, pts[1].y - pts[0].y)
        for p, q in zip(pts, pts[1:]):
            if (q.x - p.x, q.y - p.y) != d:
                return None
        return d

    da = step(a)
    if da is None:
        return False
    db = step(b)
    return db is not None and da == db


def check(theorem: str, a: PointSet, b: PointSet, s: int | None = None) -> CheckResult:
    """Run one theorem check on a pair of point sets."""
    if theorem not in THEOREM_IDS:
        raise ValueError(f"unknown theorem id: {theorem}")
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty operand")
    smin = _S_REQUIRED.get(theorem)
    if smin is not None:
        if s is None:
            raise ValueError(f"theorem {theorem} requires --s")
        s = int(s)
        if s < smin:
            raise ValueError(f"theorem {theorem} requires s >= {smin}")
    if theorem == "lemma31":
        return check_lemma31(a, b, s)
    fn = {
        "A": _check_a,
        "eq3": _check_eq3,
        "thm1": _check_thm1,
        "thm2": _check_thm2,
        "thm3": _check_thm3,
        "thm4": _check_thm4,
        "monstrous": _check_monstrous,
        "hullpeel": _check_hullpeel,
    }[theorem]
    return fn(a, b, s)


def _check_a(a, b, s):
    k = len(minkowski_sum(a, b))
    bound = len(a) + len(b) - 1
    struct = _is_ap_pair(a, b)
    slack = k - bound
    violated = slack < 0 or (slack == 0) != struct
    audit = {
        "cardinality_a": len(a),
        "cardinality_b": len(b),
        "sumset_size": k,
        "bound": bound,
        "slack": Fraction(slack),
        "equality_structure": struct,
    }
    return CheckResult("A", _verdict(True, violated, slack == 0), _inputs(a, b, None), audit)


def _check_eq3(a, b, s):
    k = len(minkowski_sum(a, b))
    sa, sb = len(a), len(b)
    worst = None
    violated = False
    per_dir = []
    for d in candidate_directions(a, b):
        m = line_count(a, d)
        n = line_count(b, d)
        val = B.bound_lines(sa, sb, m, n)
        slack = k - val
        per_dir.append({"direction": [d.dx, d.dy], "m": m, "n": n, "bound": val, "slack": slack})
        if slack < 0:
            violated = True
        if worst is None or slack < worst["slack"]:
            worst = per_dir[-1]
    audit = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "sumset_size": k,
        "tightest": worst,
        "directions": per_dir,
    }
    return CheckResult(
        "eq3", _verdict(True, violated, worst["slack"] == 0), _inputs(a, b, None), audit
    )


def _check_thm1(a, b, s):
    k = len(minkowski_sum(a, b))
    sa, sb = len(a), len(b)
    wit = h1(a, b)
    rep = B.bound_thm1(sa, sb, s)
    hyp_i = rep.flags["i_regime"] and rep.flags["i_size"] and wit.h >= s
    hyp_ii = rep.flags["ii_regime"] and rep.flags["ii_size"] and wit.h >= s
    slacks = []
    violated = False
    for hyp, key in ((hyp_i, "i"), (hyp_ii, "ii")):
        if hyp:
            slack = k - rep.values[key]
            slacks.append(slack)
            violated = violated or slack < 0
    applicable = bool(slacks)
    tight = applicable and min(slacks) == 0
    audit = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "sumset_size": k,
        "h1": wit.to_json(),
        "bounds": rep.to_json(),
        "part_i_applies": hyp_i,
        "part_ii_applies": hyp_ii,
        "slack": min(slacks) if slacks else None,
    }
    return CheckResult("thm1", _verdict(applicable, violated, tight), _inputs(a, b, s), audit)


def _check_thm2(a, b, s):
    k = len(minkowski_sum(a, b))
    sa, sb = len(a), len(b)
    violated = False
    best_slack = None
    per_dir = []
    for d in candidate_directions(a, b):
        m = line_count(a, d)
        n = line_count(b, d)
        rep = B.bound_thm2(sa, sb, m, n)
        entry = {"direction": [d.dx, d.dy], "m": m, "n": n, "report": rep.to_json()}
        for key in ("i", "ii", "iii"):
            if rep.flags.get(key):
                slack = k - rep.values[key]
                entry[f"slack_{key}"] = slack
                if slack < 0:
                    violated = True
                if best_slack is None or slack < best_slack:
                    best_slack = slack
        if not rep.values["iv"].test_le(k):
            violated = True
        per_dir.append(entry)
    audit = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "sumset_size": k,
        "slack": best_slack,
        "directions": per_dir,
    }
    tight = best_slack is not None and best_slack == 0
    return CheckResult("thm2", _verdict(True, violated, tight), _inputs(a, b, None), audit)


def _check_thm3(a, b, s):
    k = len(minkowski_sum(a, b))
    sa, sb = len(a), len(b)
    mca, mcb = max_collinear(a), max_collinear(b)
    rep = B.bound_thm3(sa, sb, s)
    rep.flags["no_collinear_a"] = mca < s
    rep.flags["no_collinear_b"] = mcb < s
    nocol = mca < s and mcb < s
    hyp_i = nocol and rep.flags["i_regime"] and rep.flags["i_size"]
    hyp_ii = nocol and rep.flags["ii_regime"] and rep.flags["ii_size"]
    slacks = []
    violated = False
    for hyp, key in ((hyp_i, "i"), (hyp_ii, "ii")):
        if hyp:
            slack = k - rep.values[key]
            slacks.append(slack)
            violated = violated or slack < 0
    applicable = bool(slacks)
    audit = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "sumset_size": k,
        "max_collinear_a": mca,
        "max_collinear_b": mcb,
        "bounds": rep.to_json(),
        "part_i_applies": hyp_i,
        "part_ii_applies": hyp_ii,
        "slack": min(slacks) if slacks else None,
    }
    tight = applicable and min(slacks) == 0
    return CheckResult("thm3", _verdict(applicable, violated, tight), _inputs(a, b, s), audit)


def _check_thm4(a, b, s):
    k = len(minkowski_sum(a, b))
    sa, sb = len(a), len(b)
    wit = h1(a, b)
    rep = B.bound_thm4(sa, sb, s)
    applicable = (
        wit.h >= s and rep.flags["base"] and (bool(rep.flags["a"]) or rep.flags["b"])
    )
    slack = k - rep.values["conclusion"] if applicable else None
    violated = applicable and slack < 0
    audit = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "sumset_size": k,
        "h1": wit.to_json(),
        "bounds": rep.to_json(),
        "covering_ok": wit.h >= s,
        "slack": slack,
    }
    return CheckResult(
        "thm4", _verdict(applicable, violated, slack == 0 if slack is not None else False),
        _inputs(a, b, s), audit,
    )


def _check_monstrous(a, b, s):
    k = len(minkowski_sum(a, b))
    sa, sb = len(a), len(b)
    rep = B.bound_monstrous(sa, sb, s)
    structural = None
    for d in candidate_directions(a, b):
        m = line_count(a, d)
        n = line_count(b, d)
        if m <= n == 2 * s - 2 and _max_mult_along(a, d) >= 2 * s - 2:
            structural = {"direction": [d.dx, d.dy], "m": m, "n": n}
            break
    rep.flags["structural"] = structural is not None
    applicable = rep.flags["window"] and rep.flags["size_gap"] and structural is not None
    slack = k - rep.values["value"] if applicable else None
    violated = applicable and slack < 0
    audit = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "sumset_size": k,
        "bounds": rep.to_json(),
        "structural_witness": structural,
        "slack": slack,
    }
    return CheckResult(
        "monstrous", _verdict(applicable, violated, slack == 0 if slack is not None else False),
        _inputs(a, b, s), audit,
    )


def _max_mult_along(s: PointSet, d: Direction) -> int:
    counts: dict = {}
    for p in s:
        key = d.dy * p.x - d.dx * p.y
        counts[key] = counts.get(key, 0) + 1
    return max(counts.values())


def _check_hullpeel(a, b, s):
    k = len(minkowski_sum(a, b))
    applicable = len(a) >= 2
    violated = False
    worst = None
    vertices = []
    if applicable:
        for v in convex_hull_vertices(a):
            peeled = len(minkowski_sum(a.difference(PointSet([v])), b))
            delta = k - peeled
            vertices.append({"vertex": [str(v.x), str(v.y)], "peeled_size": peeled, "drop": delta})
            if worst is None or delta < worst:
                worst = delta
            if delta < 1:
                violated = True
    audit = {
        "cardinality_a": len(a),
        "cardinality_b": len(b),
        "sumset_size": k,
        "vertices": vertices,
        "min_drop": worst,
    }
    tight = applicable and worst == 1
    return CheckResult("hullpeel", _verdict(applicable, violated, tight), _inputs(a, b, None), audit)


def check_lemma31(a: PointSet, b: PointSet, s: int) -> CheckResult:
    """Deletion lemma: few covering lines, or a cheap collinear deletion.

    Branch (a) asks h1(a, b) <= 2s-3.  Branch (b) searches every collinear
    subset A0 of A with |A0| <= s-1 together with subsets B0 of B on a
    parallel line, |B0| <= |A0| (empty allowed), for a deletion satisfying
    |A'+B'| <= |A+B| - 2(|A0|+|B0|).
    """
    s = int(s)
    if s < 3:
        raise ValueError("lemma31 requires s >= 3")
    sa, sb = len(a), len(b)
    mca, mcb = max_collinear(a), max_collinear(b)
    inputs = _inputs(a, b, s)
    audit: dict = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "max_collinear_a": mca,
        "max_collinear_b": mcb,
    }
    if not (sa >= sb >= s and mca < s and mcb < s):
        return CheckResult("lemma31", UNMET, inputs, audit)
    wit = h1(a, b)
    audit["h1"] = wit.to_json()
    if wit.h <= 2 * s - 3:
        audit["branch"] = "a"
        return CheckResult("lemma31", VERIFIED, inputs, audit)
    k = len(minkowski_sum(a, b))
    audit["sumset_size"] = k
    found = _lemma31_deletion(a, b, s, k)
    if found is not None:
        audit["branch"] = "b"
        audit["deletion"] = found
        return CheckResult("lemma31", VERIFIED, inputs, audit)
    return CheckResult("lemma31", COUNTEREXAMPLE, inputs, audit)


def _subsets(items, max_size):
    n = len(items)
    for size in range(2, min(max_size, n) + 1):
        idx = list(range(size))
        while True:
            yield [items[i] for i in idx]
            for pos in range(size - 1, -1, -1):
                if idx[pos] != pos + n - size:
                    break
            else:
                return
            idx[pos] += 1
            for q in range(pos + 1, size):
                idx[q] = idx[q - 1] + 1


def _lemma31_deletion(a, b, s, k):
    def attempt(del_a, del_b):
        na, nb = len(del_a), len(del_b)
        a2 = a.difference(PointSet(del_a))
        b2 = b.difference(PointSet(del_b)) if del_b else b
        if len(minkowski_sum(a2, b2)) <= k - 2 * (na + nb):
            return {
                "a0": [[str(p.x), str(p.y)] for p in del_a],
                "b0": [[str(p.x), str(p.y)] for p in del_b],
            }
        return None

    for p in a:
        hit = attempt([p], [])
        if hit:
            return hit
    for p in a:
        for q in b:
            hit = attempt([p], [q])
            if hit:
                return hit
    for d in candidate_directions(a, b):
        groups_a: dict = {}
        for p in a:
            groups_a.setdefault(d.dy * p.x - d.dx * p.y, []).append(p)
        groups_b: dict = {}
        for q in b:
            groups_b.setdefault(d.dy * q.x - d.dx * q.y, []).append(q)
        for ga in groups_a.values():
            if len(ga) < 2:
                continue
            for sub_a in _subsets(ga, s - 1):
                hit = attempt(sub_a, [])
                if hit:
                    return hit
                for q in b:
                    hit = attempt(sub_a, [q])
                    if hit:
                        return hit
                for gb in groups_b.values():
                    if len(gb) < 2:
                        continue
                    for sub_b in _subsets(gb, len(sub_a)):
                        hit = attempt(sub_a, sub_b)
                        if hit:
                            return hit
    return None


# ---------------------------------------------------------------------------
# Witness families

WITNESS_NAMES = ("triangle", "rectangle_pair", "deleted_triangle_s34")


def _triangle(x: int) -> PointSet:
    return PointSet((i, j) for i in range(x) for j in range(x - i))


def witness(name: str, **params) -> tuple[PointSet, PointSet, dict]:
    """Construct a named extremal example with its claimed values."""
    if name == "triangle":
        x = int(params.get("x", 4))
        if x < 1:
            raise ValueError("triangle requires x >= 1")
        t = _triangle(x)
        expected = {
            "cardinality_a": x * (x + 1) // 2,
            "cardinality_b": x * (x + 1) // 2,
            "sumset_size": x * (2 * x - 1),
            "h1": x,
        }
        return t, t, expected
    if name == "rectangle_pair":
        s = int(params.get("s", 9))
        if s < 3 or s % 6 != 3:
            raise ValueError("rectangle_pair requires s congruent to 3 mod 6")
        bwid = (s + 3) // 6
        awid = (s * s + 3) // 6
        a = PointSet((i, j) for i in range(awid) for j in range(s + 2))
        b = PointSet((i, j) for i in range(bwid) for j in range(2))
        expected = {
            "cardinality_a": awid * (s + 2),
            "cardinality_b": 2 * bwid,
            "sumset_size": (awid + bwid - 1) * (s + 3),
            "h1": min(s + 2, awid),
            "thm4_conclusion": awid * (s + 2) + s * (2 * bwid - 1),
        }
        return a, b, expected
    if name == "deleted_triangle_s34":
        big = _triangle(82)
        a = big.difference(PointSet([(0, 81), (0, 80), (1, 80)]))
        b = _triangle(3)
        expected = {
            "cardinality_a": 3400,
            "cardinality_b": 6,
            "sumset_size": 3567,
            "h1": 80,
            "s": 34,
            "thm4_conclusion": 3570,
        }
        return a, b, expected
    raise ValueError(f"unknown witness name: {name} (choose from {', '.join(WITNESS_NAMES)})")
