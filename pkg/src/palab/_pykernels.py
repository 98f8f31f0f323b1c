"""Pure-Python kernels.

Reference twins of the routines in ``_ckernels.pyx``. Both consume the random
stream in exactly the same order and perform the same floating-point
operations, so for equal inputs they return identical arrays.
"""

import numpy as np

NAME = "python"


class _Uniforms:
    def __init__(self, rng, block):
        self.rng = rng
        self.block = block
        self.buf = []
        self.pos = 0

    def next(self):
        if self.pos >= len(self.buf):
            self.buf = self.rng.random(self.block).tolist()
            self.pos = 0
        u = self.buf[self.pos]
        self.pos += 1
        return u


def pa_edges(m, delta, t, rng, block=4096):
    """Sample the edge list of PA_t(m, delta); vertices are 0-based birth indices.

    Returns ``(sources, targets, degrees)`` as int64 arrays.
    """
    n_edges = m * (t - 1) if t >= 2 else 0
    src = [0] * n_edges
    tgt = [0] * n_edges
    deg = [0] * t
    ends = [0] * (2 * n_edges)
    draw = _Uniforms(rng, block).next
    e = 0
    L = 0
    if t >= 2:
        for _ in range(m):
            src[e] = 1
            e += 1
            ends[L] = 0
            L += 1
        for _ in range(m):
            ends[L] = 1
            L += 1
        deg[0] = m
        deg[1] = m
    for v in range(2, t):
        for _ in range(m):
            if delta < 0:
                while True:
                    idx = int(draw() * L)
                    if idx >= L:
                        idx = L - 1
                    c = ends[idx]
                    d = float(deg[c])
                    if draw() * d < d + delta:
                        break
            elif delta == 0:
                idx = int(draw() * L)
                if idx >= L:
                    idx = L - 1
                c = ends[idx]
            else:
                total = L + v * delta
                if draw() * total < L:
                    idx = int(draw() * L)
                    if idx >= L:
                        idx = L - 1
                    c = ends[idx]
                else:
                    c = int(draw() * v)
                    if c >= v:
                        c = v - 1
            src[e] = v
            tgt[e] = c
            e += 1
            deg[c] += 1
            ends[L] = c
            L += 1
        deg[v] = m
        for _ in range(m):
            ends[L] = v
            L += 1
    return (
        np.array(src, dtype=np.int64),
        np.array(tgt, dtype=np.int64),
        np.array(deg, dtype=np.int64),
    )


def greedy_colors(n, out_ptr, out_idx, order):
    """Colour vertices in ``order``; each takes the least colour absent among its out-neighbours."""
    ptr = out_ptr.tolist()
    idx = out_idx.tolist()
    colors = [0] * n
    for v in order.tolist():
        used = {colors[u] for u in idx[ptr[v]:ptr[v + 1]]}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return np.array(colors, dtype=np.int64)


def _find(idx, lo, hi, x):
    # binary search for x in idx[lo:hi]; returns position or -1
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


def count_embeddings(host, plan, budget, weighted):
    """Count order-preserving embeddings described by ``plan`` in ``host``.

    ``host`` is ``(n, out_ptr, out_idx, out_w, in_ptr, in_idx, in_w)`` with
    vertex ids equal to host ranks and sorted neighbour lists. Returns
    ``(count, nodes, complete)``; when ``complete`` is false the budget ran
    out and ``count`` is partial.
    """
    n, out_ptr, out_idx, out_w, in_ptr, in_idx, in_w = host
    optr, oidx, ow = out_ptr.tolist(), out_idx.tolist(), out_w.tolist()
    iptr, iidx, iw = in_ptr.tolist(), in_idx.tolist(), in_w.tolist()
    k = plan.size
    anchor, anchor_dir = plan.anchor, plan.anchor_dir
    check_ptr, check_step, check_dir = plan.check_ptr, plan.check_step, plan.check_dir
    lo_step, hi_step = plan.lo_step, plan.hi_step
    min_out, min_in = plan.min_out, plan.min_in

    img = [0] * k
    wp = [1] * k
    pos = [0] * k
    end = [0] * k
    count = 0
    nodes = 0
    pos[0] = plan.root_lo
    end[0] = plan.root_hi + 1
    depth = 0
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
            pos[depth] = end[depth]  # candidates ascend; none further can fit
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
        wp[depth] = (wp[depth - 1] * w if depth else w) if weighted else 1
        if depth == k - 1:
            count += wp[depth] if weighted else 1
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
