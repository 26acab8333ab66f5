"""Exhaustive and randomized sweeps over small lattice grids.

Pairs of grid subsets are enumerated as bitmasks (increasing popcount,
then mask value), pushed through the kernel lane in chunks, and every
verdict is aggregated into a deterministic summary.  The pair space is
statically partitioned into contiguous blocks of the A-enumeration; each
worker is pure, and results merge in block order, so the summary is
byte-identical for any worker count.  Counterexample candidates are
re-derived through the exact rational verifier before being reported.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from fractions import Fraction

import numpy as np

from .gridlane import (
    CEX_CODE,
    PairBatch,
    SWEEP_THEOREMS,
    MIN_S,
    TIGHT_CODE,
    UNMET_CODE,
    VERIFIED_CODE,
    evaluate_theorem,
    mask_popcounts,
    mask_to_pointset,
)
from .kernels import active_backend, validate_grid
from .report import COUNTEREXAMPLE, TIGHT, UNMET, VERIFIED
from .geometry import format_rational, pointset_to_json
from . import verify

__all__ = ["SearchSpec", "SearchSummary", "exhaustive_search", "random_search", "default_workers"]

_CODE_TO_VERDICT = {
    UNMET_CODE: UNMET,
    VERIFIED_CODE: VERIFIED,
    TIGHT_CODE: TIGHT,
    CEX_CODE: COUNTEREXAMPLE,
}

MAX_COUNTEREXAMPLES_EMBEDDED = 50


def default_workers() -> int:
    env = os.environ.get("SUMSETLAB_WORKERS", "").strip()
    if env:
        return max(1, int(env))
    return 1


@dataclass
class SearchSpec:
    width: int = 3
    height: int = 3
    size_a: tuple[int, int | None] = (1, None)
    size_b: tuple[int, int | None] = (1, None)
    theorems: tuple[str, ...] = ("A",)
    s_values: tuple[int, ...] = ()
    symmetry: bool = False
    workers: int = 1
    no_collinear: int | None = None
    chunk: int = 65536
    max_tight_instances: int | None = 20

    def __post_init__(self):
        self.width, self.height = validate_grid(self.width, self.height)
        self.theorems = tuple(self.theorems)
        for t in self.theorems:
            if t not in SWEEP_THEOREMS:
                raise ValueError(f"unknown theorem id: {t}")
        self.s_values = tuple(int(s) for s in self.s_values)
        needs_s = [t for t in self.theorems if t in MIN_S]
        if needs_s and not self.s_values:
            raise ValueError(f"theorems {needs_s} require --s values")
        for t in needs_s:
            for s in self.s_values:
                if s < MIN_S[t]:
                    raise ValueError(f"theorem {t} requires s >= {MIN_S[t]}")
        self.workers = max(1, int(self.workers))
        self.chunk = max(1024, int(self.chunk))

    def jobs(self) -> list[tuple[str, int | None]]:
        out: list[tuple[str, int | None]] = []
        for t in self.theorems:
            if t in MIN_S:
                out.extend((t, s) for s in self.s_values)
            else:
                out.append((t, None))
        return out

    def to_json(self) -> dict:
        d = asdict(self)
        d["size_a"] = list(self.size_a)
        d["size_b"] = list(self.size_b)
        d["theorems"] = list(self.theorems)
        d["s_values"] = list(self.s_values)
        return d


def _job_key(theorem: str, s: int | None) -> str:
    return theorem if s is None else f"{theorem}[s={s}]"


def subset_masks(spec: SearchSpec, which: str) -> np.ndarray:
    """Masks of one side, ordered by (popcount, value), filters applied."""
    w, h = spec.width, spec.height
    ncells = w * h
    lo, hi = spec.size_a if which == "a" else spec.size_b
    lo = max(1, int(lo))
    hi = ncells if hi is None else min(ncells, int(hi))
    cells = list(range(ncells))
    masks: list[int] = []
    for size in range(lo, hi + 1):
        level = []
        for combo in itertools.combinations(cells, size):
            m = 0
            for c in combo:
                m |= 1 << c
            level.append(m)
        masks.extend(sorted(level))
    arr = np.array(masks, dtype=np.int64)
    if spec.no_collinear is not None and arr.size:
        batch = PairBatch(arr, arr, w, h)
        keep = batch.mc_a < spec.no_collinear
        arr = arr[keep]
    return arr


def _symmetry_transforms(w: int, h: int) -> list[np.ndarray]:
    """Cell permutations of the grid's symmetry group (identity first)."""
    def perm(fn):
        out = np.zeros(w * h, dtype=np.int64)
        for i in range(w * h):
            x, y = i % w, i // w
            nx, ny = fn(x, y)
            out[i] = ny * w + nx
        return out

    maps = [
        lambda x, y: (x, y),
        lambda x, y: (w - 1 - x, y),
        lambda x, y: (x, h - 1 - y),
        lambda x, y: (w - 1 - x, h - 1 - y),
    ]
    if w == h:
        maps += [
            lambda x, y: (y, x),
            lambda x, y: (h - 1 - y, x),
            lambda x, y: (y, w - 1 - x),
            lambda x, y: (h - 1 - y, w - 1 - x),
        ]
    return [perm(fn) for fn in maps]


def _transform_masks(masks: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.zeros_like(masks)
    for i in range(perm.shape[0]):
        out |= ((masks >> i) & 1) << int(perm[i])
    return out


def _canonical_pairs(ma: np.ndarray, mb: np.ndarray, transforms) -> np.ndarray:
    keep = np.ones(ma.shape[0], dtype=bool)
    for perm in transforms[1:]:
        ta = _transform_masks(ma, perm)
        tb = _transform_masks(mb, perm)
        keep &= (ta > ma) | ((ta == ma) & (tb >= mb))
    return keep


@dataclass
class _KeyAccumulator:
    counts: dict = field(default_factory=lambda: {UNMET: 0, VERIFIED: 0, TIGHT: 0, COUNTEREXAMPLE: 0})
    min_slack: tuple[int, int] | None = None
    tightest: list = field(default_factory=list)
    cex: list = field(default_factory=list)

    def absorb_chunk(self, outcome, ma, mb):
        codes = outcome.codes
        for code, name in _CODE_TO_VERDICT.items():
            self.counts[name] += int((codes == code).sum())
        for t in np.nonzero(codes == CEX_CODE)[0]:
            self.cex.append((int(ma[t]), int(mb[t])))
        if outcome.slack_num is None:
            return
        defined = codes != UNMET_CODE
        if not defined.any():
            return
        num = np.where(defined, outcome.slack_num, 0)
        den = np.where(defined, outcome.slack_den, 1)
        # float shortlist, then exact confirmation by cross-multiplication
        vals = np.where(defined, num / den, np.inf)
        approx_min = vals.min()
        margin = 1e-9 * (1.0 + abs(approx_min))
        shortlist = np.nonzero(defined & (vals <= approx_min + margin))[0]
        bn, bd = None, None
        for t in shortlist:
            nt, dt = int(num[t]), int(den[t])
            if bn is None or nt * bd < bn * dt:
                bn, bd = nt, dt
        if self.min_slack is None or bn * self.min_slack[1] < self.min_slack[0] * bd:
            self.min_slack = (bn, bd)
            self.tightest = []
        gn, gd = self.min_slack
        ties = defined & (num * gd == gn * den)
        for t in np.nonzero(ties)[0]:
            self.tightest.append((int(ma[t]), int(mb[t])))

    def merge(self, other: "_KeyAccumulator"):
        for k, v in other.counts.items():
            self.counts[k] += v
        if other.min_slack is not None:
            if self.min_slack is None:
                self.min_slack = other.min_slack
                self.tightest = list(other.tightest)
            else:
                a, b = self.min_slack
                c, d = other.min_slack
                if c * b < a * d:
                    self.min_slack = other.min_slack
                    self.tightest = list(other.tightest)
                elif c * b == a * d:
                    self.tightest.extend(other.tightest)
        self.cex.extend(other.cex)


def _pair_chunks(a_masks, b_masks, chunk):
    n_b = b_masks.shape[0]
    if n_b == 0:
        return
    rows_per_chunk = max(1, chunk // n_b)
    for lo in range(0, a_masks.shape[0], rows_per_chunk):
        rows = a_masks[lo : lo + rows_per_chunk]
        ma = np.repeat(rows, n_b)
        mb = np.tile(b_masks, rows.shape[0])
        yield ma, mb


def _run_block(spec: SearchSpec, a_masks, b_masks, transforms, collect_codes: bool):
    accs = {_job_key(t, s): _KeyAccumulator() for t, s in spec.jobs()}
    pairs = 0
    code_blobs: dict[str, list[np.ndarray]] = {k: [] for k in accs} if collect_codes else {}
    pair_blobs: list[np.ndarray] = []
    for ma, mb in _pair_chunks(a_masks, b_masks, spec.chunk):
        if spec.symmetry:
            keep = _canonical_pairs(ma, mb, transforms)
            ma, mb = ma[keep], mb[keep]
        if ma.size == 0:
            continue
        pairs += int(ma.size)
        batch = PairBatch(ma, mb, spec.width, spec.height)
        for theorem, s in spec.jobs():
            outcome = evaluate_theorem(batch, theorem, s)
            key = _job_key(theorem, s)
            accs[key].absorb_chunk(outcome, ma, mb)
            if collect_codes:
                code_blobs[key].append(outcome.codes.copy())
        if collect_codes:
            pair_blobs.append(np.stack([ma, mb], axis=1))
    return pairs, accs, code_blobs, pair_blobs


def _block_worker(payload):
    spec = SearchSpec(**payload["spec"])
    a_masks = np.array(payload["a_masks"], dtype=np.int64)
    b_masks = np.array(payload["b_masks"], dtype=np.int64)
    transforms = _symmetry_transforms(spec.width, spec.height) if spec.symmetry else []
    pairs, accs, code_blobs, pair_blobs = _run_block(
        spec, a_masks, b_masks, transforms, payload["collect_codes"]
    )
    return {
        "pairs": pairs,
        "accs": {
            k: {
                "counts": acc.counts,
                "min_slack": acc.min_slack,
                "tightest": acc.tightest,
                "cex": acc.cex,
            }
            for k, acc in accs.items()
        },
        "codes": {k: [blob.tolist() for blob in blobs] for k, blobs in code_blobs.items()},
        "pair_blobs": [blob.tolist() for blob in pair_blobs],
    }


@dataclass
class SearchSummary:
    spec: SearchSpec
    pairs: int
    keys: dict
    backend: str
    mode: str = "exhaustive"
    seed: int | None = None

    @property
    def counterexample_count(self) -> int:
        return sum(v["counterexamples"] for v in self.keys.values())

    @property
    def exit_code(self) -> int:
        return 2 if self.counterexample_count else 0

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "spec": self.spec.to_json(),
            "seed": self.seed,
            "backend": self.backend,
            "pairs": self.pairs,
            "theorems": self.keys,
            "counterexamples": self.counterexample_count,
            "exit_code": self.exit_code,
        }


def _render_instance(ma: int, mb: int, spec: SearchSpec) -> dict:
    return {
        "a": pointset_to_json(mask_to_pointset(ma, spec.width, spec.height)),
        "b": pointset_to_json(mask_to_pointset(mb, spec.width, spec.height)),
    }


def _rederive_counterexample(theorem: str, s, ma: int, mb: int, spec: SearchSpec) -> dict:
    a = mask_to_pointset(ma, spec.width, spec.height)
    b = mask_to_pointset(mb, spec.width, spec.height)
    result = verify.check(theorem, a, b, s)
    if result.verdict != COUNTEREXAMPLE:
        raise RuntimeError(
            f"kernel lane flagged a counterexample for {theorem} that the exact lane "
            f"does not reproduce (verdict {result.verdict}); backends disagree"
        )
    return result.to_json()


def _finalize_summary(spec: SearchSpec, pairs, merged, mode, seed) -> SearchSummary:
    keys = {}
    for (theorem, s) in spec.jobs():
        key = _job_key(theorem, s)
        acc = merged[key]
        entry = {
            "counts": acc.counts,
            "counterexamples": acc.counts[COUNTEREXAMPLE],
        }
        if acc.min_slack is not None:
            slack = Fraction(acc.min_slack[0], acc.min_slack[1])
            entry["min_slack"] = format_rational(slack)
            entry["tight_count"] = len(acc.tightest)
            cap = spec.max_tight_instances
            shown = acc.tightest if cap is None else acc.tightest[:cap]
            entry["tightest"] = [_render_instance(ma, mb, spec) for ma, mb in shown]
            entry["tightest_truncated"] = len(shown) < len(acc.tightest)
        else:
            entry["min_slack"] = None
            entry["tight_count"] = 0
            entry["tightest"] = []
            entry["tightest_truncated"] = False
        entry["examples"] = [
            _rederive_counterexample(theorem, s, ma, mb, spec)
            for ma, mb in acc.cex[:MAX_COUNTEREXAMPLES_EMBEDDED]
        ]
        keys[key] = entry
    return SearchSummary(spec, pairs, keys, active_backend(), mode, seed)


def _merge_and_finalize(spec, blocks, mode, seed, emit=None):
    total = 0
    merged = {_job_key(t, s): _KeyAccumulator() for t, s in spec.jobs()}
    for block in blocks:
        total += block["pairs"]
        for key, payload in block["accs"].items():
            other = _KeyAccumulator()
            other.counts = payload["counts"]
            other.min_slack = tuple(payload["min_slack"]) if payload["min_slack"] else None
            other.tightest = [tuple(t) for t in payload["tightest"]]
            other.cex = [tuple(t) for t in payload["cex"]]
            merged[key].merge(other)
    if emit is not None:
        for block in blocks:
            pair_blobs = [np.array(b, dtype=np.int64).reshape(-1, 2) for b in block["pair_blobs"]]
            code_blobs = {k: [np.array(c, dtype=np.int8) for c in blobs] for k, blobs in block["codes"].items()}
            for ci, pair_blob in enumerate(pair_blobs):
                for row in range(pair_blob.shape[0]):
                    ma, mb = int(pair_blob[row, 0]), int(pair_blob[row, 1])
                    for (theorem, s) in spec.jobs():
                        key = _job_key(theorem, s)
                        code = int(code_blobs[key][ci][row])
                        record = {
                            "theorem": key,
                            "verdict": _CODE_TO_VERDICT[code],
                            "inputs": _render_instance(ma, mb, spec),
                        }
                        emit(record)
    return _finalize_summary(spec, total, merged, mode, seed)


def _run_partitioned(spec: SearchSpec, a_masks, b_masks, mode, seed, emit=None) -> SearchSummary:
    collect_codes = emit is not None
    transforms = _symmetry_transforms(spec.width, spec.height) if spec.symmetry else []
    if spec.workers == 1:
        pairs, accs, code_blobs, pair_blobs = _run_block(spec, a_masks, b_masks, transforms, collect_codes)
        block = {
            "pairs": pairs,
            "accs": {
                k: {
                    "counts": acc.counts,
                    "min_slack": acc.min_slack,
                    "tightest": acc.tightest,
                    "cex": acc.cex,
                }
                for k, acc in accs.items()
            },
            "codes": {k: [b.tolist() for b in blobs] for k, blobs in code_blobs.items()},
            "pair_blobs": [b.tolist() for b in pair_blobs],
        }
        return _merge_and_finalize(spec, [block], mode, seed, emit)
    nblocks = min(spec.workers, max(1, a_masks.shape[0]))
    bounds = np.linspace(0, a_masks.shape[0], nblocks + 1).astype(int)
    payloads = []
    for i in range(nblocks):
        payloads.append(
            {
                "spec": _spec_payload(spec),
                "a_masks": a_masks[bounds[i] : bounds[i + 1]].tolist(),
                "b_masks": b_masks.tolist(),
                "collect_codes": collect_codes,
            }
        )
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        blocks = list(pool.map(_block_worker, payloads))
    return _merge_and_finalize(spec, blocks, mode, seed, emit)


def _spec_payload(spec: SearchSpec) -> dict:
    return {
        "width": spec.width,
        "height": spec.height,
        "size_a": tuple(spec.size_a),
        "size_b": tuple(spec.size_b),
        "theorems": spec.theorems,
        "s_values": spec.s_values,
        "symmetry": spec.symmetry,
        "workers": 1,
        "no_collinear": spec.no_collinear,
        "chunk": spec.chunk,
        "max_tight_instances": spec.max_tight_instances,
    }


def exhaustive_search(spec: SearchSpec, emit=None) -> SearchSummary:
    """Check every (A, B) pair in range; deterministic for any worker count."""
    a_masks = subset_masks(spec, "a")
    b_masks = subset_masks(spec, "b")
    return _run_partitioned(spec, a_masks, b_masks, "exhaustive", None, emit)


def random_search(spec: SearchSpec, trials: int, seed: int, emit=None) -> SearchSummary:
    """Check seeded random nonempty pairs drawn uniformly within size ranges."""
    rng = np.random.default_rng(seed)
    ncells = spec.width * spec.height
    lo_a, hi_a = spec.size_a
    lo_b, hi_b = spec.size_b
    hi_a = ncells if hi_a is None else hi_a
    hi_b = ncells if hi_b is None else hi_b

    def draw(lo, hi, count):
        out = np.empty(count, dtype=np.int64)
        filled = 0
        while filled < count:
            cand = rng.integers(1, 1 << ncells, size=count - filled, dtype=np.int64)
            pc = mask_popcounts(cand)
            cand = cand[(pc >= lo) & (pc <= hi)]
            out[filled : filled + cand.size] = cand
            filled += cand.size
        return out

    a_masks = draw(lo_a, hi_a, trials)
    b_masks = draw(lo_b, hi_b, trials)
    spec_pairs = SearchSpec(**{**_spec_payload(spec), "workers": spec.workers})
    summary = _run_paired(spec_pairs, a_masks, b_masks, seed, emit)
    return summary


def _run_paired(spec: SearchSpec, a_masks, b_masks, seed, emit=None) -> SearchSummary:
    """Run aligned (not crossed) pair arrays through the same machinery."""
    collect_codes = emit is not None
    nblocks = min(spec.workers, max(1, a_masks.shape[0]))
    bounds = np.linspace(0, a_masks.shape[0], nblocks + 1).astype(int)
    blocks = []
    if nblocks == 1:
        blocks.append(_aligned_block(spec, a_masks, b_masks, collect_codes))
    else:
        payloads = [
            {
                "spec": _spec_payload(spec),
                "a_masks": a_masks[bounds[i] : bounds[i + 1]].tolist(),
                "b_masks": b_masks[bounds[i] : bounds[i + 1]].tolist(),
                "collect_codes": collect_codes,
            }
            for i in range(nblocks)
        ]
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            blocks = list(pool.map(_aligned_worker, payloads))
    return _merge_and_finalize(spec, blocks, "random", seed, emit)


def _aligned_block(spec: SearchSpec, a_masks, b_masks, collect_codes):
    accs = {_job_key(t, s): _KeyAccumulator() for t, s in spec.jobs()}
    pairs = 0
    code_blobs: dict[str, list] = {k: [] for k in accs} if collect_codes else {}
    pair_blobs: list = []
    for lo in range(0, a_masks.shape[0], spec.chunk):
        ma = a_masks[lo : lo + spec.chunk]
        mb = b_masks[lo : lo + spec.chunk]
        pairs += int(ma.size)
        batch = PairBatch(ma, mb, spec.width, spec.height)
        for theorem, s in spec.jobs():
            outcome = evaluate_theorem(batch, theorem, s)
            key = _job_key(theorem, s)
            accs[key].absorb_chunk(outcome, ma, mb)
            if collect_codes:
                code_blobs[key].append(outcome.codes.copy())
        if collect_codes:
            pair_blobs.append(np.stack([ma, mb], axis=1))
    return {
        "pairs": pairs,
        "accs": {
            k: {
                "counts": acc.counts,
                "min_slack": acc.min_slack,
                "tightest": acc.tightest,
                "cex": acc.cex,
            }
            for k, acc in accs.items()
        },
        "codes": {k: [b.tolist() for b in blobs] for k, blobs in code_blobs.items()},
        "pair_blobs": [b.tolist() for b in pair_blobs],
    }


def _aligned_worker(payload):
    spec = SearchSpec(**payload["spec"])
    a_masks = np.array(payload["a_masks"], dtype=np.int64)
    b_masks = np.array(payload["b_masks"], dtype=np.int64)
    return _aligned_block(spec, a_masks, b_masks, payload["collect_codes"])
