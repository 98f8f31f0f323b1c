# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same contracts and random-stream consumption as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

NAME = "cython"


cdef class _Uniforms:
    cdef object rng
    cdef Py_ssize_t block
    cdef double[::1] buf
    cdef Py_ssize_t pos

    def __init__(self, rng, Py_ssize_t block):
        self.rng = rng
        self.block = block
        self.buf = np.empty(0, dtype=np.float64)
        self.pos = 0

    cdef double next(self) except? -1.0:
        cdef double u
        if self.pos >= self.buf.shape[0]:
            self.buf = self.rng.random(self.block)
            self.pos = 0
        u = self.buf[self.pos]
        self.pos += 1
        return u


def pa_edges(int m, double delta, Py_ssize_t t, rng, Py_ssize_t block=4096):
    cdef Py_ssize_t n_edges = m * (t - 1) if t >= 2 else 0
    src_a = np.zeros(n_edges, dtype=np.int64)
    tgt_a = np.zeros(n_edges, dtype=np.int64)
    deg_a = np.zeros(t, dtype=np.int64)
    ends_a = np.zeros(2 * n_edges, dtype=np.int64)
    cdef int64_t[::1] src = src_a
    cdef int64_t[::1] tgt = tgt_a
    cdef int64_t[::1] deg = deg_a
    cdef int64_t[::1] ends = ends_a
    cdef _Uniforms draw = _Uniforms(rng, block)
    cdef Py_ssize_t e = 0, L = 0, v, j, idx, c
    cdef double d, total
    if t >= 2:
        for j in range(m):
            src[e] = 1
            e += 1
            ends[L] = 0
            L += 1
        for j in range(m):
            ends[L] = 1
            L += 1
        deg[0] = m
        deg[1] = m
    for v in range(2, t):
        for j in range(m):
            if delta < 0:
                while True:
                    idx = <Py_ssize_t>(draw.next() * L)
                    if idx >= L:
                        idx = L - 1
                    c = ends[idx]
                    d = <double>deg[c]
                    if draw.next() * d < d + delta:
                        break
            elif delta == 0:
                idx = <Py_ssize_t>(draw.next() * L)
                if idx >= L:
                    idx = L - 1
                c = ends[idx]
            else:
                total = L + v * delta
                if draw.next() * total < L:
                    idx = <Py_ssize_t>(draw.next() * L)
                    if idx >= L:
                        idx = L - 1
                    c = ends[idx]
                else:
                    c = <Py_ssize_t>(draw.next() * v)
                    if c >= v:
                        c = v - 1
            src[e] = v
            tgt[e] = c
            e += 1
            deg[c] += 1
            ends[L] = c
            L += 1
        deg[v] = m
        for j in range(m):
            ends[L] = v
            L += 1
    return src_a, tgt_a, deg_a


def greedy_colors(Py_ssize_t n, const int64_t[::1] out_ptr, const int64_t[::1] out_idx,
                  const int64_t[::1] order):
    colors_a = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] colors = colors_a
    cdef Py_ssize_t maxdeg = 0, i, v, q, c
    for i in range(n):
        if out_ptr[i + 1] - out_ptr[i] > maxdeg:
            maxdeg = out_ptr[i + 1] - out_ptr[i]
    stamp_a = np.zeros(maxdeg + 2, dtype=np.int64)
    cdef int64_t[::1] stamp = stamp_a
    for i in range(n):
        v = order[i]
        for q in range(out_ptr[v], out_ptr[v + 1]):
            c = colors[out_idx[q]]
            if c <= maxdeg + 1:
                stamp[c] = i + 1
        c = 1
        while stamp[c] == i + 1:
            c += 1
        colors[v] = c
    return colors_a


cdef inline Py_ssize_t _find(const int64_t[::1] idx, Py_ssize_t lo, Py_ssize_t hi, int64_t x) noexcept:
    cdef Py_ssize_t mid
    cdef int64_t y
    while lo < hi:
        mid = (lo + hi) >> 1
        y = idx[mid]
        if y < x:
            lo = mid + 1
        elif y > x:
            hi = mid
        else:
            return mid
    return -1


def count_embeddings(host, plan, long long budget, bint weighted):
    n_py, out_ptr_a, out_idx_a, out_w_a, in_ptr_a, in_idx_a, in_w_a = host
    cdef const int64_t[::1] optr = out_ptr_a
    cdef const int64_t[::1] oidx = out_idx_a
    cdef const int64_t[::1] ow = out_w_a
    cdef const int64_t[::1] iptr = in_ptr_a
    cdef const int64_t[::1] iidx = in_idx_a
    cdef const int64_t[::1] iw = in_w_a
    cdef Py_ssize_t k = plan.size
    cdef int64_t[::1] anchor = np.asarray(plan.anchor, dtype=np.int64)
    cdef int64_t[::1] anchor_dir = np.asarray(plan.anchor_dir, dtype=np.int64)
    cdef int64_t[::1] check_ptr = np.asarray(plan.check_ptr, dtype=np.int64)
    cdef int64_t[::1] check_step = np.asarray(list(plan.check_step) + [0], dtype=np.int64)
    cdef int64_t[::1] check_dir = np.asarray(list(plan.check_dir) + [0], dtype=np.int64)
    cdef int64_t[::1] lo_step = np.asarray(plan.lo_step, dtype=np.int64)
    cdef int64_t[::1] hi_step = np.asarray(plan.hi_step, dtype=np.int64)
    cdef int64_t[::1] min_out = np.asarray(plan.min_out, dtype=np.int64)
    cdef int64_t[::1] min_in = np.asarray(plan.min_in, dtype=np.int64)
    cdef int64_t[::1] img = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] wp = np.ones(k, dtype=np.int64)
    cdef int64_t[::1] pos = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] end = np.zeros(k, dtype=np.int64)
    cdef long long count = 0, nodes = 0
    cdef long long limit = (1LL << 62)
    cdef Py_ssize_t depth = 0, p, q, ls, hs, f
    cdef int64_t h, w, other, a
    cdef bint ok
    pos[0] = plan.root_lo
    end[0] = plan.root_hi + 1
    while depth >= 0:
        p = pos[depth]
        if p >= end[depth]:
            depth -= 1
            continue
        pos[depth] = p + 1
        if depth == 0:
            h = p
            w = 1
        elif anchor_dir[depth] == 0:
            h = oidx[p]
            w = ow[p]
        else:
            h = iidx[p]
            w = iw[p]
        ls = lo_step[depth]
        if ls >= 0 and h <= img[ls]:
            continue
        hs = hi_step[depth]
        if hs >= 0 and h >= img[hs]:
            pos[depth] = end[depth]
            continue
        if optr[h + 1] - optr[h] < min_out[depth] or iptr[h + 1] - iptr[h] < min_in[depth]:
            continue
        ok = True
        for q in range(check_ptr[depth], check_ptr[depth + 1]):
            other = img[check_step[q]]
            if check_dir[q] == 0:
                f = _find(oidx, optr[other], optr[other + 1], h)
            else:
                f = _find(oidx, optr[h], optr[h + 1], other)
            if f < 0:
                ok = False
                break
            w *= ow[f]
        if not ok:
            continue
        nodes += 1
        if budget >= 0 and nodes > budget:
            return count, nodes - 1, False
        img[depth] = h
        if weighted:
            wp[depth] = wp[depth - 1] * w if depth else w
            if wp[depth] > limit:
                raise OverflowError("weighted embedding count exceeds 2**62; use the python backend")
        if depth == k - 1:
            count += wp[depth] if weighted else 1
            if count > limit:
                raise OverflowError("embedding count exceeds 2**62; use the python backend")
            continue
        depth += 1
        a = img[anchor[depth]]
        if anchor_dir[depth] == 0:
            pos[depth] = optr[a]
            end[depth] = optr[a + 1]
        else:
            pos[depth] = iptr[a]
            end[depth] = iptr[a + 1]
    return count, nodes, True
