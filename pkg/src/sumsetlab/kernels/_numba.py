"""Numba-compiled bulk kernels over bitmask-encoded grid subsets.

Each function loops over an array of subset pairs and computes one exact
integer quantity per pair.  All arithmetic is small-integer (coordinates
below 5, cardinalities below 26), so int64 never overflows.
"""
from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True, nogil=True)
def sumset_sizes(masks_a, masks_b, w, h):
    n = masks_a.shape[0]
    tw = 2 * w - 1
    tcells = tw * (2 * h - 1)
    ncells = w * h
    out = np.empty(n, np.int64)
    stamp = np.zeros(tcells, np.int64)
    for p in range(n):
        token = p + 1
        count = 0
        ma = masks_a[p]
        mb = masks_b[p]
        for i in range(ncells):
            if not (ma >> i) & 1:
                continue
            xi = i % w
            yi = i // w
            for j in range(ncells):
                if not (mb >> j) & 1:
                    continue
                t = (yi + j // w) * tw + xi + j % w
                if stamp[t] != token:
                    stamp[t] = token
                    count += 1
        out[p] = count
    return out


@njit(cache=True, nogil=True)
def line_counts(masks, line_id, n_lines):
    n = masks.shape[0]
    ndirs = line_id.shape[0]
    ncells = line_id.shape[1]
    out = np.zeros((n, ndirs), np.int64)
    maxlines = 0
    for d in range(ndirs):
        if n_lines[d] > maxlines:
            maxlines = n_lines[d]
    stamp = np.zeros(maxlines, np.int64)
    token = 0
    for p in range(n):
        m = masks[p]
        for d in range(ndirs):
            token += 1
            c = 0
            for i in range(ncells):
                if not (m >> i) & 1:
                    continue
                lid = line_id[d, i]
                if stamp[lid] != token:
                    stamp[lid] = token
                    c += 1
            out[p, d] = c
    return out


@njit(cache=True, nogil=True)
def max_line_multiplicity(masks, line_id, n_lines):
    n = masks.shape[0]
    ndirs = line_id.shape[0]
    ncells = line_id.shape[1]
    out = np.zeros((n, ndirs), np.int64)
    maxlines = 0
    for d in range(ndirs):
        if n_lines[d] > maxlines:
            maxlines = n_lines[d]
    stamp = np.zeros(maxlines, np.int64)
    count = np.zeros(maxlines, np.int64)
    token = 0
    for p in range(n):
        m = masks[p]
        for d in range(ndirs):
            token += 1
            best = 0
            for i in range(ncells):
                if not (m >> i) & 1:
                    continue
                lid = line_id[d, i]
                if stamp[lid] != token:
                    stamp[lid] = token
                    count[lid] = 0
                count[lid] += 1
                if count[lid] > best:
                    best = count[lid]
            out[p, d] = best
    return out


@njit(cache=True, nogil=True)
def dir_presence(masks, pair_i, pair_j, pair_dir, ndirs):
    n = masks.shape[0]
    npairs = pair_i.shape[0]
    out = np.zeros((n, ndirs), np.bool_)
    for p in range(n):
        m = masks[p]
        for k in range(npairs):
            if (m >> pair_i[k]) & 1 and (m >> pair_j[k]) & 1:
                out[p, pair_dir[k]] = True
    return out


@njit(cache=True, nogil=True)
def common_ap_step(masks_a, masks_b, steps, w, h):
    n = masks_a.shape[0]
    nsteps = steps.shape[0]
    ncells = w * h
    out = np.zeros(n, np.bool_)
    for p in range(n):
        ma = masks_a[p]
        mb = masks_b[p]
        ka = 0
        kb = 0
        for i in range(ncells):
            ka += (ma >> i) & 1
            kb += (mb >> i) & 1
        for si in range(nsteps):
            vx = steps[si, 0]
            vy = steps[si, 1]
            ca = 0
            for i in range(ncells):
                if not (ma >> i) & 1:
                    continue
                x2 = i % w + vx
                y2 = i // w + vy
                if 0 <= x2 < w and 0 <= y2 < h and (ma >> (y2 * w + x2)) & 1:
                    ca += 1
            if ca != ka - 1:
                continue
            cb = 0
            for i in range(ncells):
                if not (mb >> i) & 1:
                    continue
                x2 = i % w + vx
                y2 = i // w + vy
                if 0 <= x2 < w and 0 <= y2 < h and (mb >> (y2 * w + x2)) & 1:
                    cb += 1
            if cb == kb - 1:
                out[p] = True
                break
    return out
