"""Vectorized theorem evaluation over bitmask-encoded grid subset pairs.

The kernels (numba or numpy backend) produce exact integer quantities per
pair; this layer assembles hypothesis flags, conclusions and exact rational
slacks with elementwise integer arithmetic, so sweeps over hundreds of
thousands of pairs never touch Fractions or floats in a verdict.

Verdict codes: 0 hypothesis-unmet, 1 verified, 2 tight, 3 COUNTEREXAMPLE.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import PointSet
from .kernels import get_kernels, grid_tables

UNMET_CODE, VERIFIED_CODE, TIGHT_CODE, CEX_CODE = 0, 1, 2, 3
_BIG = np.int64(1) << 60

SWEEP_THEOREMS = ("A", "eq3", "thm1", "thm2", "thm3", "thm4", "monstrous", "hullpeel", "lemma31")
S_FREE_THEOREMS = ("A", "eq3", "thm2", "hullpeel")
MIN_S = {"thm1": 2, "thm3": 3, "thm4": 1, "monstrous": 2, "lemma31": 3}


def mask_popcounts(masks: np.ndarray) -> np.ndarray:
    out = np.zeros(masks.shape[0], dtype=np.int64)
    tmp = masks.copy()
    while tmp.any():
        out += tmp & 1
        tmp >>= 1
    return out


def mask_to_points(mask: int, w: int, h: int) -> list[tuple[int, int]]:
    return [(i % w, i // w) for i in range(w * h) if (mask >> i) & 1]


def mask_to_pointset(mask: int, w: int, h: int) -> PointSet:
    return PointSet(mask_to_points(mask, w, h))


def pointset_to_mask(s: PointSet, w: int, h: int) -> int:
    mask = 0
    for p in s:
        if p.x.denominator != 1 or p.y.denominator != 1:
            raise ValueError("point set is not on the integer lattice")
        x, y = int(p.x), int(p.y)
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError("point outside grid")
        mask |= 1 << (y * w + x)
    return mask


@lru_cache(maxsize=65536)
def hull_vertices_of_mask(mask: int, w: int, h: int) -> tuple[int, ...]:
    """Cell indices of the convex hull vertices (monotone chain on ints)."""
    pts = sorted(mask_to_points(mask, w, h))
    if len(pts) <= 2:
        return tuple(y * w + x for x, y in pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return tuple(y * w + x for x, y in hull)


class PairBatch:
    """Lazy per-pair quantities for a batch of subset pairs on one grid."""

    def __init__(self, masks_a: np.ndarray, masks_b: np.ndarray, w: int, h: int):
        self.ma = np.asarray(masks_a, dtype=np.int64)
        self.mb = np.asarray(masks_b, dtype=np.int64)
        self.w = int(w)
        self.h = int(h)
        self.tables = grid_tables(self.w, self.h)
        self.kern = get_kernels()
        self._cache: dict = {}

    def __len__(self):
        return self.ma.shape[0]

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def sa(self):
        return self._get("sa", lambda: mask_popcounts(self.ma))

    @property
    def sb(self):
        return self._get("sb", lambda: mask_popcounts(self.mb))

    @property
    def k(self):
        return self._get("k", lambda: self.kern.sumset_sizes(self.ma, self.mb, self.w, self.h))

    def _lines(self, which):
        t = self.tables
        masks = self.ma if which == "a" else self.mb
        return self.kern.line_counts(masks, t.line_id, t.n_lines)

    @property
    def lca(self):
        return self._get("lca", lambda: self._lines("a"))

    @property
    def lcb(self):
        return self._get("lcb", lambda: self._lines("b"))

    def _mult(self, which):
        t = self.tables
        masks = self.ma if which == "a" else self.mb
        return self.kern.max_line_multiplicity(masks, t.line_id, t.n_lines)

    @property
    def mult_a(self):
        return self._get("mult_a", lambda: self._mult("a"))

    @property
    def mult_b(self):
        return self._get("mult_b", lambda: self._mult("b"))

    @property
    def mc_a(self):
        return self._get("mc_a", lambda: np.maximum(self.mult_a.max(axis=1), 1) if self.tables.dirs.size else np.ones(len(self), np.int64))

    @property
    def mc_b(self):
        return self._get("mc_b", lambda: np.maximum(self.mult_b.max(axis=1), 1) if self.tables.dirs.size else np.ones(len(self), np.int64))

    def _presence(self, which):
        t = self.tables
        masks = self.ma if which == "a" else self.mb
        if t.pair_i.size == 0:
            return np.zeros((len(self), 0), dtype=bool)
        return self.kern.dir_presence(masks, t.pair_i, t.pair_j, t.pair_dir, t.dirs.shape[0])

    @property
    def pres_a(self):
        return self._get("pres_a", lambda: self._presence("a"))

    @property
    def pres_b(self):
        return self._get("pres_b", lambda: self._presence("b"))

    @property
    def eligible(self):
        return self._get("eligible", lambda: self.pres_a | self.pres_b)

    @property
    def common_ap(self):
        return self._get(
            "common_ap",
            lambda: self.kern.common_ap_step(self.ma, self.mb, self.tables.steps, self.w, self.h)
            if self.tables.steps.size
            else np.zeros(len(self), dtype=bool),
        )

    @property
    def h1(self):
        """(h, dir_index) tie-broken toward the smallest canonical direction."""

        def compute():
            n = len(self)
            if self.tables.dirs.size == 0:
                return np.ones(n, np.int64), np.full(n, -1, np.int64)
            maxed = np.maximum(self.lca, self.lcb)
            masked = np.where(self.eligible, maxed, _BIG)
            h = masked.min(axis=1)
            idx = masked.argmin(axis=1)
            lone = ~self.eligible.any(axis=1)
            h = np.where(lone, 1, h)
            idx = np.where(lone, -1, idx)
            return h, idx

        return self._get("h1", compute)

    @property
    def h1_value(self):
        return self.h1[0]


def _rat_min_update(best_num, best_den, num, den, mask):
    upd = mask & (num * best_den < best_num * den)
    best_num[upd] = num[upd]
    best_den[upd] = den[upd]


@dataclass
class TheoremOutcome:
    key: str
    codes: np.ndarray
    slack_num: np.ndarray | None = None
    slack_den: np.ndarray | None = None


def _finalize(applicable, violated, tight, slack_num=None, slack_den=None, key="") -> TheoremOutcome:
    codes = np.zeros(applicable.shape[0], dtype=np.int8)
    codes[applicable] = VERIFIED_CODE
    codes[applicable & tight] = TIGHT_CODE
    codes[applicable & violated] = CEX_CODE
    return TheoremOutcome(key, codes, slack_num, slack_den)


def theorem_a(batch: PairBatch) -> TheoremOutcome:
    sa, sb, k = batch.sa, batch.sb, batch.k
    slack = k - (sa + sb - 1)
    struct = (np.minimum(sa, sb) == 1) | batch.common_ap
    violated = (slack < 0) | ((slack == 0) & ~struct) | ((slack > 0) & struct)
    applicable = np.ones(len(batch), dtype=bool)
    return _finalize(applicable, violated, slack == 0, slack, np.ones_like(slack), "A")


def theorem_eq3(batch: PairBatch) -> TheoremOutcome:
    sa, sb, k = batch.sa, batch.sb, batch.k
    n = len(batch)
    best_num = np.full(n, _BIG, dtype=np.int64)
    best_den = np.ones(n, dtype=np.int64)
    violated = np.zeros(n, dtype=bool)
    ndirs = batch.tables.dirs.shape[0]
    for d in range(ndirs):
        elig = batch.eligible[:, d]
        if not elig.any():
            continue
        m = batch.lca[:, d]
        nn = batch.lcb[:, d]
        num = k * m * nn - (sa * nn + sb * m - m * nn) * (m + nn - 1)
        den = m * nn
        violated |= elig & (num < 0)
        _rat_min_update(best_num, best_den, num, den, elig)
    lone = ~batch.eligible.any(axis=1) if ndirs else np.ones(n, dtype=bool)
    if lone.any():
        # both sides singletons: every direction yields m = n = 1
        num = (k - (sa + sb - 1))[lone]
        violated[lone] |= num < 0
        best_num[lone] = num
        best_den[lone] = 1
    applicable = np.ones(n, dtype=bool)
    tight = best_num == 0
    return TheoremOutcome("eq3", _finalize(applicable, violated, tight).codes, best_num, best_den)


def theorem_thm1(batch: PairBatch, s: int) -> TheoremOutcome:
    sa, sb, k = batch.sa, batch.sb, batch.k
    hcov = batch.h1_value >= s
    hyp_i = (np.abs(sa - sb) <= s) & (sa + sb >= 4 * s * s - 6 * s + 3) & hcov
    hyp_ii = (sa >= sb + s) & (2 * sb >= 4 * s * s - 7 * s + 3) & hcov
    num_i = k * s - (2 * s - 1) * (sa + sb - s)
    num_ii = k * s - (s * sa + (3 * s - 2) * sb - s * s)
    return _two_part(f"thm1[s={s}]", hyp_i, hyp_ii, num_i, num_ii, np.int64(s))


def theorem_thm3(batch: PairBatch, s: int) -> TheoremOutcome:
    sa, sb, k = batch.sa, batch.sb, batch.k
    nocol = (batch.mc_a < s) & (batch.mc_b < s)
    hyp_i = nocol & (np.abs(sa - sb) <= s) & (sa + sb >= (s - 1) * (4 * s - 6) + 1)
    hyp_ii = nocol & (sa >= sb + s) & (2 * sb >= (s - 1) * (4 * s - 7))
    num_i = k - (2 * sa + 2 * sb - 6 * s + 7)
    num_ii = k - (sa + 3 * sb - 5 * s + 7)
    return _two_part(f"thm3[s={s}]", hyp_i, hyp_ii, num_i, num_ii, np.int64(1))


def _two_part(key, hyp_i, hyp_ii, num_i, num_ii, den) -> TheoremOutcome:
    applicable = hyp_i | hyp_ii
    violated = (hyp_i & (num_i < 0)) | (hyp_ii & (num_ii < 0))
    slack_num = np.where(hyp_i & hyp_ii, np.minimum(num_i, num_ii), np.where(hyp_i, num_i, num_ii))
    slack_num = np.where(applicable, slack_num, _BIG)
    slack_den = np.full(hyp_i.shape[0], den, dtype=np.int64)
    tight = applicable & (slack_num == 0)
    return _finalize(applicable, violated, tight, slack_num, slack_den, key)


def theorem_thm4(batch: PairBatch, s: int) -> TheoremOutcome:
    sa, sb, k = batch.sa, batch.sb, batch.k
    base = (batch.h1_value >= s) & (2 * sa >= s * (s - 1) * sb + 2 * s)
    clause_a = (sb >= 3) & (
        8 * (sb - 2) * sa
        > (2 * s - 1) ** 2 * sb * (sb - 2) - 2 * (2 * s - 1) * (sb - 2) + 4 * (s - 1) ** 2
    )
    clause_b = 3 * sb >= 2 * s + 4
    applicable = base & (clause_a | clause_b)
    num = k - (sa + s * (sb - 1))
    violated = applicable & (num < 0)
    slack_num = np.where(applicable, num, _BIG)
    return _finalize(
        applicable, violated, applicable & (slack_num == 0), slack_num,
        np.ones(len(batch), dtype=np.int64), f"thm4[s={s}]",
    )


def theorem_monstrous(batch: PairBatch, s: int) -> TheoremOutcome:
    sa, sb, k = batch.sa, batch.sb, batch.k
    n = len(batch)
    ksum = sa + sb
    window = (np.abs(sa - sb) <= s) & (4 * s * s - 6 * s + 3 <= ksum) & (ksum <= 4 * s * s - 5 * s - 1)
    structural = np.zeros(n, dtype=bool)
    ndirs = batch.tables.dirs.shape[0]
    for d in range(ndirs):
        m = batch.lca[:, d]
        nn = batch.lcb[:, d]
        structural |= batch.pres_a[:, d] & (m <= nn) & (nn == 2 * s - 2) & (batch.mult_a[:, d] >= 2 * s - 2)
    applicable = window & structural
    num = k - (2 * sa + 2 * sb - 6 * s + 7)
    violated = applicable & (num < 0)
    slack_num = np.where(applicable, num, _BIG)
    return _finalize(
        applicable, violated, applicable & (slack_num == 0), slack_num,
        np.ones(n, dtype=np.int64), f"monstrous[s={s}]",
    )


def theorem_thm2(batch: PairBatch) -> TheoremOutcome:
    sa, sb, k = batch.sa, batch.sb, batch.k
    n = len(batch)
    best_num = np.full(n, _BIG, dtype=np.int64)
    best_den = np.ones(n, dtype=np.int64)
    violated = np.zeros(n, dtype=bool)
    ndirs = batch.tables.dirs.shape[0]
    for d in range(ndirs):
        elig = batch.eligible[:, d]
        if not elig.any():
            continue
        m = batch.lca[:, d]
        hyp_i = elig & (m >= batch.lcb[:, d]) & (sa <= sb + m)
        num_i = k * m - (2 * m - 1) * (sa + sb - m)
        violated |= hyp_i & (num_i < 0)
        _rat_min_update(best_num, best_den, num_i, m, hyp_i)

        hyp_ii = elig & (sa >= sb + m)
        num_ii = k * m - (m * sa + (3 * m - 2) * sb - m * m)
        violated |= hyp_ii & (num_ii < 0)
        _rat_min_update(best_num, best_den, num_ii, m, hyp_ii)

        hyp_iii = elig & ((m == 1) | (m < sa))
        if hyp_iii.any():
            l = _bracket_l_vec(sa, sb, m, hyp_iii)
            num_iii = k * m * l - (
                m * l * (sa + sb) + l * (l - 1) * sa + m * (m - 1) * sb - m * l * (m + l - 1)
            )
            violated |= hyp_iii & (num_iii < 0)
            _rat_min_update(best_num, best_den, num_iii, m * l, hyp_iii)

        big_l = k * m - m * sa - m * sb + sa + m * m - m
        rad4 = 4 * m * (m - 1) * (sa - m) * sb
        violated |= elig & ~((big_l >= 0) & (big_l * big_l >= rad4))

    lone = ~batch.eligible.any(axis=1) if ndirs else np.ones(n, dtype=bool)
    if lone.any():
        num = (k - (sa + sb - 1))[lone]
        violated[lone] |= num < 0
        best_num[lone] = num
        best_den[lone] = 1
    applicable = np.ones(n, dtype=bool)
    return TheoremOutcome(
        "thm2", _finalize(applicable, violated, best_num == 0).codes, best_num, best_den
    )


def _bracket_l_vec(sa, sb, m, mask):
    """Vectorized largest l >= 1 with l(l-1)(sa-m) <= sb*m*(m-1)."""
    denom = np.where(mask, sa - m, 1)
    target = sb * m * (m - 1)
    safe_den = np.maximum(denom, 1)
    approx = np.sqrt(1.0 + 4.0 * (target / np.maximum(safe_den, 1)))
    l = np.maximum(((1.0 + approx) / 2.0).astype(np.int64), 1)
    l = np.where(mask & (denom == 0), 1, l)  # m == 1 forces l = 1
    active = mask & (denom > 0)
    for _ in range(4):
        grow = active & ((l + 1) * l * safe_den <= target)
        if not grow.any():
            break
        l = np.where(grow, l + 1, l)
    for _ in range(4):
        shrink = active & (l > 1) & (l * (l - 1) * safe_den > target)
        if not shrink.any():
            break
        l = np.where(shrink, l - 1, l)
    return np.where(mask, l, 1)


def theorem_hullpeel(batch: PairBatch) -> TheoremOutcome:
    n = len(batch)
    w, h = batch.w, batch.h
    applicable = batch.sa >= 2
    k = batch.k
    peel_a, peel_b, owner = [], [], []
    for p in np.nonzero(applicable)[0]:
        ma = int(batch.ma[p])
        for cell in hull_vertices_of_mask(ma, w, h):
            peel_a.append(ma & ~(1 << cell))
            peel_b.append(int(batch.mb[p]))
            owner.append(p)
    slack_num = np.full(n, _BIG, dtype=np.int64)
    violated = np.zeros(n, dtype=bool)
    if owner:
        ka = get_kernels().sumset_sizes(
            np.array(peel_a, dtype=np.int64), np.array(peel_b, dtype=np.int64), w, h
        )
        owner_arr = np.array(owner, dtype=np.int64)
        delta = k[owner_arr] - ka - 1  # strict decrease means delta >= 0
        np.minimum.at(slack_num, owner_arr, delta)
        violated = np.zeros(n, dtype=bool)
        violated_at = owner_arr[delta < 0]
        violated[violated_at] = True
    return _finalize(
        applicable, violated, applicable & (slack_num == 0), slack_num,
        np.ones(n, dtype=np.int64), "hullpeel",
    )


# ---------------------------------------------------------------------------
# The deletion lemma: either the pair is covered by few parallel lines, or
# some collinear chunk can be deleted while losing twice its size from A+B.

def _line_groups(mask: int, line_ids) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    i = 0
    m = mask
    while m:
        if m & 1:
            groups.setdefault(int(line_ids[i]), []).append(i)
        m >>= 1
        i += 1
    return [g for g in groups.values() if len(g) >= 2]


def _subsets_of(cells: list[int], max_size: int):
    n = len(cells)
    for size in range(2, min(max_size, n) + 1):
        idx = list(range(size))
        while True:
            yield [cells[i] for i in idx]
            for pos in range(size - 1, -1, -1):
                if idx[pos] != pos + n - size:
                    break
            else:
                return
            idx[pos] += 1
            for q in range(pos + 1, size):
                idx[q] = idx[q - 1] + 1


def lemma31_deletion_candidates(mask_a: int, mask_b: int, s: int, tables):
    """Yield (mask_a', mask_b', deleted_count) waves of increasing cost.

    Wave 1: single points of A.  Wave 2: point of A plus point of B.
    Wave 3: collinear subsets of A of size 2..s-1, paired with the empty
    set, single points of B, and collinear subsets of B along the same
    direction of size up to |A0|.
    """
    cells_a = [i for i in range(tables.ncells) if (mask_a >> i) & 1]
    cells_b = [i for i in range(tables.ncells) if (mask_b >> i) & 1]

    wave1 = [(mask_a & ~(1 << p), mask_b, 1) for p in cells_a]
    yield wave1

    wave2 = [
        (mask_a & ~(1 << p), mask_b & ~(1 << q), 2) for p in cells_a for q in cells_b
    ]
    yield wave2

    wave3 = []
    ndirs = tables.dirs.shape[0]
    for d in range(ndirs):
        groups_a = _line_groups(mask_a, tables.line_id[d])
        if not groups_a:
            continue
        groups_b = _line_groups(mask_b, tables.line_id[d])
        for ga in groups_a:
            for sub_a in _subsets_of(ga, s - 1):
                del_a = 0
                for c in sub_a:
                    del_a |= 1 << c
                na = len(sub_a)
                wave3.append((mask_a & ~del_a, mask_b, na))
                for q in cells_b:
                    wave3.append((mask_a & ~del_a, mask_b & ~(1 << q), na + 1))
                for gb in groups_b:
                    for sub_b in _subsets_of(gb, na):
                        del_b = 0
                        for c in sub_b:
                            del_b |= 1 << c
                        wave3.append((mask_a & ~del_a, mask_b & ~del_b, na + len(sub_b)))
    yield wave3


def theorem_lemma31(batch: PairBatch, s: int) -> TheoremOutcome:
    sa, sb = batch.sa, batch.sb
    pre = (sa >= sb) & (sb >= s) & (batch.mc_a < s) & (batch.mc_b < s)
    codes = np.zeros(len(batch), dtype=np.int8)
    branch_a = pre & (batch.h1_value <= 2 * s - 3)
    codes[branch_a] = VERIFIED_CODE
    survivors = np.nonzero(pre & ~branch_a)[0]
    if survivors.size:
        k = batch.k
        kern = get_kernels()
        pending = {int(p): lemma31_deletion_candidates(int(batch.ma[p]), int(batch.mb[p]), s, batch.tables) for p in survivors}
        unresolved = set(pending)
        for wave_index in range(3):
            if not unresolved:
                break
            cand_a, cand_b, cost, owner = [], [], [], []
            for p in sorted(unresolved):
                for ma2, mb2, deleted in next(pending[p]):
                    cand_a.append(ma2)
                    cand_b.append(mb2)
                    cost.append(deleted)
                    owner.append(p)
            if not owner:
                continue
            ks = kern.sumset_sizes(np.array(cand_a, dtype=np.int64), np.array(cand_b, dtype=np.int64), batch.w, batch.h)
            ok = ks <= k[np.array(owner)] - 2 * np.array(cost, dtype=np.int64)
            for p in {owner[i] for i in np.nonzero(ok)[0]}:
                codes[p] = VERIFIED_CODE
                unresolved.discard(p)
        for p in unresolved:
            codes[p] = CEX_CODE
    return TheoremOutcome(f"lemma31[s={s}]", codes, None, None)


def evaluate_theorem(batch: PairBatch, theorem: str, s: int | None) -> TheoremOutcome:
    if theorem == "A":
        return theorem_a(batch)
    if theorem == "eq3":
        return theorem_eq3(batch)
    if theorem == "thm2":
        return theorem_thm2(batch)
    if theorem == "hullpeel":
        return theorem_hullpeel(batch)
    if theorem in MIN_S:
        if s is None or s < MIN_S[theorem]:
            raise ValueError(f"theorem {theorem} requires s >= {MIN_S[theorem]}")
        fn = {
            "thm1": theorem_thm1,
            "thm3": theorem_thm3,
            "thm4": theorem_thm4,
            "monstrous": theorem_monstrous,
            "lemma31": theorem_lemma31,
        }[theorem]
        return fn(batch, int(s))
    raise ValueError(f"unknown theorem id: {theorem}")
