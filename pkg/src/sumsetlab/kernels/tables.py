"""Precomputed tables for bitmask subsets of a small lattice grid.

Cells of a W x H grid are indexed idx = y*W + x and subsets are encoded as
integer bitmasks.  Both kernel backends consume the same tables, so the
direction ordering (canonical, sorted) and hence every tie-break is
backend-independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_GRID_SIDE = 5
MAX_GRID_CELLS = 25


@dataclass(frozen=True)
class GridTables:
    W: int
    H: int
    ncells: int
    dirs: np.ndarray        # (D, 2) canonical primitive directions, sorted
    line_id: np.ndarray     # (D, ncells) 0-based line index per direction
    n_lines: np.ndarray     # (D,) number of distinct lines per direction
    pair_i: np.ndarray      # (P,) first cell of each unordered cell pair
    pair_j: np.ndarray      # (P,) second cell
    pair_dir: np.ndarray    # (P,) direction index of the pair difference
    steps: np.ndarray       # (V, 2) nonzero step vectors, canonical half
    dir_10: int             # index of direction (1, 0), or -1 on a 1-wide grid


def validate_grid(w: int, h: int) -> tuple[int, int]:
    w, h = int(w), int(h)
    if not (1 <= w <= MAX_GRID_SIDE and 1 <= h <= MAX_GRID_SIDE):
        raise ValueError(f"grid must be between 1x1 and {MAX_GRID_SIDE}x{MAX_GRID_SIDE}")
    return w, h


@lru_cache(maxsize=None)
def grid_tables(w: int, h: int) -> GridTables:
    w, h = validate_grid(w, h)
    ncells = w * h

    dirs = []
    for dx in range(0, w):
        for dy in range(-(h - 1), h):
            if dx == 0 and dy <= 0:
                continue
            if math.gcd(dx, abs(dy)) != 1:
                continue
            dirs.append((dx, dy))
    dirs.sort()
    dirs_arr = np.array(dirs, dtype=np.int64).reshape(len(dirs), 2)

    line_id = np.zeros((len(dirs), ncells), dtype=np.int64)
    n_lines = np.zeros(len(dirs), dtype=np.int64)
    for di, (dx, dy) in enumerate(dirs):
        vals = sorted({dy * (i % w) - dx * (i // w) for i in range(ncells)})
        rank = {v: r for r, v in enumerate(vals)}
        for i in range(ncells):
            line_id[di, i] = rank[dy * (i % w) - dx * (i // w)]
        n_lines[di] = len(vals)

    pair_i, pair_j, pair_dir = [], [], []
    dir_index = {d: i for i, d in enumerate(dirs)}
    for i in range(ncells):
        xi, yi = i % w, i // w
        for j in range(i + 1, ncells):
            dx = j % w - xi
            dy = j // w - yi
            g = math.gcd(abs(dx), abs(dy))
            dx, dy = dx // g, dy // g
            if dx < 0 or (dx == 0 and dy < 0):
                dx, dy = -dx, -dy
            pair_i.append(i)
            pair_j.append(j)
            pair_dir.append(dir_index[(dx, dy)])

    steps = []
    for vx in range(0, w):
        for vy in range(-(h - 1), h):
            if vx == 0 and vy <= 0:
                continue
            steps.append((vx, vy))
    steps.sort()

    return GridTables(
        W=w,
        H=h,
        ncells=ncells,
        dirs=dirs_arr,
        line_id=line_id,
        n_lines=n_lines,
        pair_i=np.array(pair_i, dtype=np.int64),
        pair_j=np.array(pair_j, dtype=np.int64),
        pair_dir=np.array(pair_dir, dtype=np.int64),
        steps=np.array(steps, dtype=np.int64).reshape(len(steps), 2),
        dir_10=dir_index.get((1, 0), -1),
    )
