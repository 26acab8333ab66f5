"""Pure-numpy fallback kernels, vectorized across pairs.

Same signatures and same exact integer outputs as the numba backend;
selected via SUMSETLAB_BACKEND=numpy or when numba is unavailable.
"""
from __future__ import annotations

import numpy as np

NAME = "numpy"


def _bits(masks, ncells):
    return (masks[:, None] >> np.arange(ncells, dtype=np.int64)[None, :]) & 1


def sumset_sizes(masks_a, masks_b, w, h):
    ncells = w * h
    tw = 2 * w - 1
    tcells = tw * (2 * h - 1)
    abits = _bits(masks_a, ncells).astype(bool)
    bbits = _bits(masks_b, ncells).astype(bool)
    n = masks_a.shape[0]
    target = np.zeros((n, tcells), dtype=bool)
    xs = np.arange(ncells) % w
    ys = np.arange(ncells) // w
    for i in range(ncells):
        ai = abits[:, i]
        if not ai.any():
            continue
        for j in range(ncells):
            t = (ys[i] + ys[j]) * tw + xs[i] + xs[j]
            np.logical_or(target[:, t], ai & bbits[:, j], out=target[:, t])
    return target.sum(axis=1).astype(np.int64)


def line_counts(masks, line_id, n_lines):
    ncells = line_id.shape[1]
    ndirs = line_id.shape[0]
    bits = _bits(masks, ncells).astype(np.int64)
    n = masks.shape[0]
    out = np.zeros((n, ndirs), dtype=np.int64)
    for d in range(ndirs):
        onehot = np.zeros((ncells, n_lines[d]), dtype=np.int64)
        onehot[np.arange(ncells), line_id[d]] = 1
        occ = bits @ onehot
        out[:, d] = (occ > 0).sum(axis=1)
    return out


def max_line_multiplicity(masks, line_id, n_lines):
    ncells = line_id.shape[1]
    ndirs = line_id.shape[0]
    bits = _bits(masks, ncells).astype(np.int64)
    n = masks.shape[0]
    out = np.zeros((n, ndirs), dtype=np.int64)
    for d in range(ndirs):
        onehot = np.zeros((ncells, n_lines[d]), dtype=np.int64)
        onehot[np.arange(ncells), line_id[d]] = 1
        occ = bits @ onehot
        out[:, d] = occ.max(axis=1)
    return out


def dir_presence(masks, pair_i, pair_j, pair_dir, ndirs):
    ncells = int(max(pair_j.max(), pair_i.max())) + 1 if pair_i.size else 1
    bits = _bits(masks, ncells).astype(bool)
    n = masks.shape[0]
    out = np.zeros((n, ndirs), dtype=bool)
    for k in range(pair_i.shape[0]):
        d = pair_dir[k]
        np.logical_or(out[:, d], bits[:, pair_i[k]] & bits[:, pair_j[k]], out=out[:, d])
    return out


def common_ap_step(masks_a, masks_b, steps, w, h):
    ncells = w * h
    abits = _bits(masks_a, ncells).astype(bool)
    bbits = _bits(masks_b, ncells).astype(bool)
    ka = abits.sum(axis=1)
    kb = bbits.sum(axis=1)
    n = masks_a.shape[0]
    out = np.zeros(n, dtype=bool)
    xs = np.arange(ncells) % w
    ys = np.arange(ncells) // w
    for vx, vy in steps:
        x2 = xs + vx
        y2 = ys + vy
        valid = (0 <= x2) & (x2 < w) & (0 <= y2) & (y2 < h)
        perm = np.where(valid, y2 * w + x2, 0)
        ca = (abits & np.where(valid[None, :], abits[:, perm], False)).sum(axis=1)
        cb = (bbits & np.where(valid[None, :], bbits[:, perm], False)).sum(axis=1)
        out |= (ca == ka - 1) & (cb == kb - 1)
    return out
