"""Pure numpy implementations of the compiled kernels in ``_core.pyx``.

Signatures and integer outputs match the compiled versions exactly; the
benchmark in ``benchmarks/bench_kernels.py`` compares the two.
"""
from __future__ import annotations

from math import comb

import numpy as np

_CHUNK = 1 << 20


def _compositions(L: int, Np: int) -> np.ndarray:
    if L == 1:
        return np.array([[Np]], dtype=np.uint8)
    blocks = []
    for v in range(Np, -1, -1):
        tail = _compositions(L - 1, Np - v)
        head = np.full((tail.shape[0], 1), v, dtype=np.uint8)
        blocks.append(np.hstack([head, tail]))
    return np.vstack(blocks)


def _composition_blocks(L: int, Np: int, limit: int = _CHUNK):
    """Yield the descending-lex enumeration in contiguous chunks of bounded size."""
    if L == 1 or comb(Np + L - 1, L - 1) <= limit:
        yield _compositions(L, Np)
        return
    for v in range(Np, -1, -1):
        for tail in _composition_blocks(L - 1, Np - v, limit):
            head = np.full((tail.shape[0], 1), v, dtype=np.uint8)
            yield np.hstack([head, tail])


def enumerate_compositions(L: int, Np: int, D: int) -> np.ndarray:
    if D == 0:
        return np.zeros((0, L), dtype=np.uint8)
    out = _compositions(L, Np)
    assert out.shape[0] == D
    return np.ascontiguousarray(out)


def rank_states(states: np.ndarray, table: np.ndarray, Np: int) -> np.ndarray:
    states = np.asarray(states)
    M, L = states.shape
    remaining = np.full(M, Np, dtype=np.int64)
    out = np.zeros(M, dtype=np.int64)
    for j in range(L):
        n = states[:, j].astype(np.int64)
        out += table[j, remaining, n]
        remaining -= n
    return out


def _hop_factor(model: int, left: bool, ns: np.ndarray, nd: np.ndarray) -> np.ndarray:
    ns = ns.astype(np.float64)
    nd = nd.astype(np.float64)
    if model == 0:
        f = nd if left else ns - 1
    elif model == 1:
        f = nd + 1 if left else ns
    elif model == 2:
        f = nd * (ns - 1)
    elif model == 3:
        f = nd * nd if left else (ns - 1) ** 2
    elif model == 4:
        f = (nd > 0).astype(np.float64) if left else (ns > 1).astype(np.float64)
    else:
        f = np.ones_like(ns)
    return f * np.sqrt(ns * (nd + 1))


def hop_ranks(states, model, periodic, table, Np):
    states = np.asarray(states)
    M, L = states.shape
    src_parts, dst_parts, amp_parts, order_parts = [], [], [], []
    for s in range(L):
        for side in (0, 1):
            d = s - 1 if side == 0 else s + 1
            if d < 0 or d >= L:
                if not periodic:
                    continue
                d %= L
            if d == s:
                continue
            ns = states[:, s]
            nd = states[:, d]
            f = np.zeros(M)
            occ = ns > 0
            f[occ] = _hop_factor(model, side == 0, ns[occ], nd[occ])
            rows = np.nonzero(f != 0.0)[0]
            if rows.size == 0:
                continue
            moved = states[rows].copy()
            moved[:, s] -= 1
            moved[:, d] += 1
            src_parts.append(rows.astype(np.int64))
            dst_parts.append(rank_states(moved, table, Np))
            amp_parts.append(f[rows])
            # compiled kernel emits hops ordered by (src, site, side)
            order_parts.append(rows * (2 * L) + 2 * s + side)
    if not src_parts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), np.zeros(0)
    order = np.argsort(np.concatenate(order_parts), kind="stable")
    return (
        np.concatenate(src_parts)[order],
        np.concatenate(dst_parts)[order],
        np.concatenate(amp_parts)[order],
    )


def orbit_data(states, table, Np):
    states = np.asarray(states)
    M, L = states.shape
    own = rank_states(states, table, Np)
    best = own.copy()
    rmin = np.zeros(M, dtype=np.int64)
    period = np.full(M, L, dtype=np.int32)
    for r in range(1, L):
        rot = np.ascontiguousarray(np.roll(states, r, axis=1))
        rk = rank_states(rot, table, Np)
        hit = (rk == own) & (period == L)
        period[hit] = r
        better = rk < best
        best[better] = rk[better]
        rmin[better] = r
    shift = ((L - rmin) % L).astype(np.int32)
    return best, shift, period


def colors(states, Np, periodic):
    states = np.asarray(states)
    M, L = states.shape
    if periodic and L % 2 == 1 and Np == L:
        S = np.cumsum(states.astype(np.int64) - 1, axis=1)
        mn = np.minimum(S.min(axis=1), 0)
        return ((S.sum(axis=1) - L * mn) & 1).astype(np.uint8)
    sign = np.where(np.arange(L) % 2 == 1, 1, -1)
    x = states.astype(np.int64) @ sign + (Np & 1)
    return ((np.abs(x) // 2) & 1).astype(np.uint8)


def census(L, Np, D):
    g = rd = g0 = r0 = 0
    seen = 0
    for block in _composition_blocks(L, Np):
        seen += block.shape[0]
        c = colors(block, Np, True)
        is_rep = np.ones(block.shape[0], dtype=bool)
        for r in range(1, L):
            rot = np.roll(block, -r, axis=1)
            diff = rot.astype(np.int16) - block.astype(np.int16)
            nz = diff != 0
            first = np.argmax(nz, axis=1)
            lead = diff[np.arange(block.shape[0]), first]
            is_rep &= ~(nz.any(axis=1) & (lead > 0))
        red = c.astype(bool)
        g += int((~red).sum())
        rd += int(red.sum())
        g0 += int((~red & is_rep).sum())
        r0 += int((red & is_rep).sum())
    assert seen == D
    return g, rd, g0, r0


def csr_matvec(indptr, indices, data, x, out, nthreads=1):
    from scipy.sparse import csr_matrix

    n = indptr.shape[0] - 1
    A = csr_matrix((data, indices, indptr), shape=(n, x.shape[0]))
    pair = np.ascontiguousarray(x).view(np.float64).reshape(-1, 2)
    out[:] = np.ascontiguousarray(A @ pair).view(np.complex128).ravel()
    return out
