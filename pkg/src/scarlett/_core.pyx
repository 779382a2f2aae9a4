# cython: language_level=3
"""Compiled kernels: Fock-state enumeration, ranking, hopping, orbits, census, SpMV.

Every function here has a numpy twin in :mod:`scarlett._fallback` with the
same signature and bitwise-identical integer results.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sqrt
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

cnp.import_array()

ctypedef cnp.uint8_t u8
ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32

ctypedef fused index_t:
    cnp.int32_t
    cnp.int64_t


cdef inline double _hop_factor(int model, bint left, int ns, int nd) noexcept nogil:
    # ns: source occupancy (>= 1), nd: destination occupancy, both before the hop
    cdef double f
    if model == 0:      # H1
        f = nd if left else ns - 1
    elif model == 1:    # H2
        f = nd + 1 if left else ns
    elif model == 2:    # H3
        f = nd * (ns - 1)
    elif model == 3:    # H1a
        f = nd * nd if left else (ns - 1) * (ns - 1)
    elif model == 4:    # H1b
        f = (nd > 0) if left else (ns > 1)
    else:               # bare hopping
        f = 1.0
    if f == 0.0:
        return 0.0
    return f * sqrt(<double>(ns * (nd + 1)))


cdef inline i64 _rank(const u8* s, int L, int Np, const i64[:, :, ::1] table) noexcept nogil:
    cdef i64 r = 0
    cdef int R = Np
    cdef int j, n
    for j in range(L):
        n = s[j]
        r += table[j, R, n]
        R -= n
    return r


cdef inline int _color(const u8* s, int L, int Np, bint periodic) noexcept nogil:
    cdef int p, v
    cdef i64 x = 0, S = 0, tot = 0, mn = 0
    if periodic and (L & 1) and Np == L:
        # parity of the minimal net current that builds s from |11...1>
        for p in range(L):
            S += s[p] - 1
            tot += S
            if S < mn:
                mn = S
        return <int>((tot - L * mn) & 1)
    for p in range(L):
        v = s[p]
        if p & 1:
            x += v
        else:
            x -= v
    x += Np & 1
    if x < 0:
        x = -x
    return <int>((x // 2) & 1)


def enumerate_compositions(int L, int Np, Py_ssize_t D):
    """All compositions of ``Np`` into ``L`` parts, lexicographically descending."""
    out_arr = np.zeros((D, L), dtype=np.uint8)
    cdef u8[:, ::1] out = out_arr
    cdef u8* cur = <u8*> malloc(L * sizeof(u8))
    cdef Py_ssize_t i
    cdef int j, tail, k
    if D == 0:
        free(cur)
        return out_arr
    for j in range(L):
        cur[j] = 0
    cur[0] = Np
    with nogil:
        for i in range(D):
            memcpy(&out[i, 0], cur, L)
            if i == D - 1:
                break
            j = L - 2
            while j >= 0 and cur[j] == 0:
                j -= 1
            tail = 0
            for k in range(j + 1, L):
                tail += cur[k]
                cur[k] = 0
            cur[j] -= 1
            cur[j + 1] = tail + 1
    free(cur)
    return out_arr


def rank_states(const u8[:, ::1] states, const i64[:, :, ::1] table, int Np):
    cdef Py_ssize_t M = states.shape[0], i
    cdef int L = states.shape[1]
    out_arr = np.empty(M, dtype=np.int64)
    cdef i64[::1] out = out_arr
    with nogil:
        for i in range(M):
            out[i] = _rank(&states[i, 0], L, Np, table)
    return out_arr


def hop_ranks(const u8[:, ::1] states, int model, bint periodic,
              const i64[:, :, ::1] table, int Np):
    """Every nonzero single-particle hop out of every state.

    Returns ``(src, dst_rank, amp)`` with ``amp`` the positive hopping factor
    (the caller applies ``-J``).
    """
    cdef Py_ssize_t M = states.shape[0], i, pos
    cdef int L = states.shape[1]
    cdef int s, d, side, ns, nd
    cdef double f
    cdef Py_ssize_t total = 0
    counts_arr = np.zeros(M, dtype=np.int64)
    cdef i64[::1] counts = counts_arr
    with nogil:
        for i in range(M):
            for s in range(L):
                ns = states[i, s]
                if ns == 0:
                    continue
                for side in range(2):
                    d = s - 1 if side == 0 else s + 1
                    if d < 0 or d >= L:
                        if not periodic:
                            continue
                        d = (d + L) % L
                    if d == s:
                        continue
                    nd = states[i, d]
                    if _hop_factor(model, side == 0, ns, nd) != 0.0:
                        counts[i] += 1
            total += counts[i]
    src_arr = np.empty(total, dtype=np.int64)
    dst_arr = np.empty(total, dtype=np.int64)
    amp_arr = np.empty(total, dtype=np.float64)
    cdef i64[::1] src = src_arr
    cdef i64[::1] dst = dst_arr
    cdef double[::1] amp = amp_arr
    cdef u8* buf = <u8*> malloc(L * sizeof(u8))
    pos = 0
    with nogil:
        for i in range(M):
            for s in range(L):
                ns = states[i, s]
                if ns == 0:
                    continue
                for side in range(2):
                    d = s - 1 if side == 0 else s + 1
                    if d < 0 or d >= L:
                        if not periodic:
                            continue
                        d = (d + L) % L
                    if d == s:
                        continue
                    nd = states[i, d]
                    f = _hop_factor(model, side == 0, ns, nd)
                    if f == 0.0:
                        continue
                    memcpy(buf, &states[i, 0], L)
                    buf[s] -= 1
                    buf[d] += 1
                    src[pos] = i
                    dst[pos] = _rank(buf, L, Np, table)
                    amp[pos] = f
                    pos += 1
    free(buf)
    return src_arr, dst_arr, amp_arr


def orbit_data(const u8[:, ::1] states, const i64[:, :, ::1] table, int Np):
    """Translation-orbit representative rank, shift and period for each state.

    ``shift`` is the ``l`` with ``translate(rep, l) == state``; the
    representative is the orbit member of smallest rank.
    """
    cdef Py_ssize_t M = states.shape[0], i
    cdef int L = states.shape[1]
    cdef int r, j, rmin, per
    cdef i64 rk, own, best
    rep_arr = np.empty(M, dtype=np.int64)
    shift_arr = np.empty(M, dtype=np.int32)
    period_arr = np.empty(M, dtype=np.int32)
    cdef i64[::1] rep = rep_arr
    cdef i32[::1] shift = shift_arr
    cdef i32[::1] period = period_arr
    cdef u8* buf = <u8*> malloc(L * sizeof(u8))
    with nogil:
        for i in range(M):
            own = _rank(&states[i, 0], L, Np, table)
            best = own
            rmin = 0
            per = L
            for r in range(1, L):
                for j in range(L):
                    buf[j] = states[i, (j - r + L) % L]
                rk = _rank(buf, L, Np, table)
                if rk == own and per == L:
                    per = r
                if rk < best:
                    best = rk
                    rmin = r
            rep[i] = best
            shift[i] = (L - rmin) % L
            period[i] = per
    free(buf)
    return rep_arr, shift_arr, period_arr


def colors(const u8[:, ::1] states, int Np, bint periodic):
    """Bipartite color per state: 0 green (even), 1 red (odd)."""
    cdef Py_ssize_t M = states.shape[0], i
    cdef int L = states.shape[1]
    out_arr = np.empty(M, dtype=np.uint8)
    cdef u8[::1] out = out_arr
    with nogil:
        for i in range(M):
            out[i] = _color(&states[i, 0], L, Np, periodic)
    return out_arr


def census(int L, int Np, Py_ssize_t D):
    """Stream all ``D`` states once; count colors overall and per translation orbit.

    Returns ``(green, red, green_orbits, red_orbits)``.
    """
    cdef i64 g = 0, rd = 0, g0 = 0, r0 = 0
    cdef u8* cur = <u8*> malloc(L * sizeof(u8))
    cdef Py_ssize_t i
    cdef int j, k, tail, r, c
    cdef bint is_rep
    if D == 0:
        free(cur)
        return 0, 0, 0, 0
    for j in range(L):
        cur[j] = 0
    cur[0] = Np
    with nogil:
        for i in range(D):
            c = _color(cur, L, Np, True)
            if c == 0:
                g += 1
            else:
                rd += 1
            # representative == lexicographic maximum over rotations
            is_rep = True
            for r in range(1, L):
                for j in range(L):
                    k = cur[(j + r) % L]
                    if k > cur[j]:
                        is_rep = False
                        break
                    if k < cur[j]:
                        break
                if not is_rep:
                    break
            if is_rep:
                if c == 0:
                    g0 += 1
                else:
                    r0 += 1
            if i == D - 1:
                break
            j = L - 2
            while j >= 0 and cur[j] == 0:
                j -= 1
            tail = 0
            for k in range(j + 1, L):
                tail += cur[k]
                cur[k] = 0
            cur[j] -= 1
            cur[j + 1] = tail + 1
    free(cur)
    return int(g), int(rd), int(g0), int(r0)


def csr_matvec(const index_t[::1] indptr, const index_t[::1] indices,
               const double[::1] data, const double complex[::1] x,
               double complex[::1] out, int nthreads=1):
    """``out = A @ x`` for real CSR ``A`` and complex ``x``; row-parallel, fixed order per row."""
    cdef Py_ssize_t n = indptr.shape[0] - 1, i
    cdef index_t p
    cdef double re, im, a
    for i in prange(n, nogil=True, num_threads=nthreads, schedule="static"):
        re = 0.0
        im = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            a = data[p]
            re = re + a * x[indices[p]].real
            im = im + a * x[indices[p]].imag
        out[i] = re + 1j * im
    return out
