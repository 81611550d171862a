"""Compiled inner loops for packing, the micro-kernel, and C updates.

Every function takes stacked per-operand scatter data as plain int64/float64
arrays so it can be jitted; the Python-facing wrappers live in kernels.py and
driver.py.  Accumulation orders are fixed (operand order in packing, p
outermost in the micro-kernel), which makes forced-slow-path runs bitwise
identical to mixed fast/slow runs.
"""

import numpy as np
from numba import njit

from .scatter import PAD

__all__ = [
    "accum_dense",
    "macro_kernel",
    "microtile",
    "microtile_mats",
    "pack_a_block",
    "pack_b_block",
    "store_tile",
    "unpack_sum",
]


@njit(cache=True, nogil=True)
def pack_a_block(out, data, rscat, cscat, rbs, cbs, coeffs, r0, rcount, k0, kcount, mr, kr, force_slow):
    """Pack sum_t coeffs[t] * view_t over rows [r0, r0+rcount) x cols [k0, k0+kcount)
    into mr-row slivers: out[s, p, i] = element (r0 + s*mr + i, k0 + p).

    Returns (fast_blocks, slow_blocks) counted per (mr x kr) sub-block.
    """
    nviews = coeffs.shape[0]
    nslivers = (rcount + mr - 1) // mr
    nchunks = (kcount + kr - 1) // kr
    fast = 0
    slow = 0
    for s in range(nslivers):
        i0 = s * mr
        ilim = min(mr, rcount - i0)
        for p in range(kcount):
            for i in range(mr):
                out[s, p, i] = 0.0
        for c in range(nchunks):
            p0 = c * kr
            plim = min(kr, kcount - p0)
            regular = not force_slow
            if regular:
                for t in range(nviews):
                    if rbs[t, (r0 + i0) // mr] == 0 or cbs[t, (k0 + p0) // kr] == 0:
                        regular = False
                        break
            if regular:
                fast += 1
                for t in range(nviews):
                    co = coeffs[t]
                    rbase = rscat[t, r0 + i0]
                    cbase = cscat[t, k0 + p0]
                    rstep = rbs[t, (r0 + i0) // mr]
                    cstep = cbs[t, (k0 + p0) // kr]
                    for p in range(plim):
                        off = cbase + p * cstep
                        for i in range(ilim):
                            out[s, p0 + p, i] += co * data[rbase + i * rstep + off]
            else:
                slow += 1
                for t in range(nviews):
                    co = coeffs[t]
                    for p in range(plim):
                        cc = cscat[t, k0 + p0 + p]
                        if cc == PAD:
                            continue
                        for i in range(ilim):
                            rr = rscat[t, r0 + i0 + i]
                            if rr == PAD:
                                continue
                            out[s, p0 + p, i] += co * data[rr + cc]
    return fast, slow


@njit(cache=True, nogil=True)
def pack_b_block(out, data, rscat, cscat, rbs, cbs, coeffs, k0, kcount, c0, ccount, kr, nr, force_slow):
    """Mirror of pack_a_block with nr-column slivers: out[s, p, j] =
    element (k0 + p, c0 + s*nr + j); sub-blocks are kr x nr."""
    nviews = coeffs.shape[0]
    nslivers = (ccount + nr - 1) // nr
    nchunks = (kcount + kr - 1) // kr
    fast = 0
    slow = 0
    for s in range(nslivers):
        j0 = s * nr
        jlim = min(nr, ccount - j0)
        for p in range(kcount):
            for j in range(nr):
                out[s, p, j] = 0.0
        for c in range(nchunks):
            p0 = c * kr
            plim = min(kr, kcount - p0)
            regular = not force_slow
            if regular:
                for t in range(nviews):
                    if rbs[t, (k0 + p0) // kr] == 0 or cbs[t, (c0 + j0) // nr] == 0:
                        regular = False
                        break
            if regular:
                fast += 1
                for t in range(nviews):
                    co = coeffs[t]
                    rbase = rscat[t, k0 + p0]
                    cbase = cscat[t, c0 + j0]
                    rstep = rbs[t, (k0 + p0) // kr]
                    cstep = cbs[t, (c0 + j0) // nr]
                    for p in range(plim):
                        off = rbase + p * rstep
                        for j in range(jlim):
                            out[s, p0 + p, j] += co * data[off + cbase + j * cstep]
            else:
                slow += 1
                for t in range(nviews):
                    co = coeffs[t]
                    for p in range(plim):
                        rr = rscat[t, k0 + p0 + p]
                        if rr == PAD:
                            continue
                        for j in range(jlim):
                            cc = cscat[t, c0 + j0 + j]
                            if cc == PAD:
                                continue
                            out[s, p0 + p, j] += co * data[rr + cc]
    return fast, slow


@njit(cache=True, nogil=True)
def microtile(acc, a_buf, s_a, b_buf, s_b, k):
    """acc += sliver product as k rank-1 updates, p outermost (fixed order)."""
    mr = acc.shape[0]
    nr = acc.shape[1]
    for p in range(k):
        for i in range(mr):
            av = a_buf[s_a, p, i]
            for j in range(nr):
                acc[i, j] += av * b_buf[s_b, p, j]


@njit(cache=True, nogil=True)
def microtile_mats(acc, a_sliver, b_sliver, k):
    """Same accumulation order as microtile over (mr, k) x (k, nr) matrices."""
    mr = acc.shape[0]
    nr = acc.shape[1]
    for p in range(k):
        for i in range(mr):
            av = a_sliver[i, p]
            for j in range(nr):
                acc[i, j] += av * b_sliver[p, j]


@njit(cache=True, nogil=True)
def store_tile(acc, cdata, rscat, cscat, rbs, cbs, coeff, i0, ilim, j0, jlim, mr, nr, force_slow):
    """cview[i0:i0+ilim, j0:j0+jlim] += coeff * acc; returns 1 on the fast path.

    The fast path needs both block scatter entries of the target tile nonzero;
    otherwise elements are scattered one by one and PAD positions dropped.
    """
    bi = i0 // mr
    bj = j0 // nr
    if not force_slow and rbs[bi] != 0 and cbs[bj] != 0:
        rbase = rscat[i0]
        cbase = cscat[j0]
        rstep = rbs[bi]
        cstep = cbs[bj]
        for i in range(ilim):
            off = rbase + i * rstep + cbase
            for j in range(jlim):
                cdata[off + j * cstep] += coeff * acc[i, j]
        return 1
    for i in range(ilim):
        rr = rscat[i0 + i]
        if rr == PAD:
            continue
        for j in range(jlim):
            cc = cscat[j0 + j]
            if cc == PAD:
                continue
            cdata[rr + cc] += coeff * acc[i, j]
    return 0


@njit(cache=True, nogil=True)
def macro_kernel(a_buf, b_buf, kcount, cdata, rscat, cscat, rbs, cbs, coeffs,
                 ic, mcount, jc, jr0, jr1, mr, nr, force_slow):
    """Loop jr/ir over one packed block pair, updating every C target per tile.

    Columns [jr0, jr1) are a sub-range of the packed B panel (thread split).
    Returns (fast_updates, slow_updates, tiles).
    """
    ntargets = coeffs.shape[0]
    fast = 0
    slow = 0
    tiles = 0
    acc = np.empty((mr, nr))
    for jr in range(jr0, jr1, nr):
        jlim = min(nr, jr1 - jr)
        s_b = jr // nr
        for ir in range(0, mcount, mr):
            ilim = min(mr, mcount - ir)
            s_a = ir // mr
            for i in range(mr):
                for j in range(nr):
                    acc[i, j] = 0.0
            microtile(acc, a_buf, s_a, b_buf, s_b, kcount)
            tiles += 1
            for t in range(ntargets):
                hit = store_tile(acc, cdata, rscat[t], cscat[t], rbs[t], cbs[t], coeffs[t],
                                 ic + ir, ilim, jc + jr, jlim, mr, nr, force_slow)
                if hit == 1:
                    fast += 1
                else:
                    slow += 1
    return fast, slow, tiles


@njit(cache=True, nogil=True)
def accum_dense(mat, cdata, rscat, cscat, rbs, cbs, coeff, rb, cb, force_slow):
    """cview += coeff * mat blockwise with the same fast/slow gate as store_tile."""
    m, n = mat.shape
    fast = 0
    slow = 0
    for bj in range((n + cb - 1) // cb):
        j0 = bj * cb
        jlim = min(cb, n - j0)
        for bi in range((m + rb - 1) // rb):
            i0 = bi * rb
            ilim = min(rb, m - i0)
            if not force_slow and rbs[bi] != 0 and cbs[bj] != 0:
                fast += 1
                rbase = rscat[i0]
                cbase = cscat[j0]
                rstep = rbs[bi]
                cstep = cbs[bj]
                for i in range(ilim):
                    off = rbase + i * rstep + cbase
                    for j in range(jlim):
                        cdata[off + j * cstep] += coeff * mat[i0 + i, j0 + j]
            else:
                slow += 1
                for i in range(ilim):
                    rr = rscat[i0 + i]
                    if rr == PAD:
                        continue
                    for j in range(jlim):
                        cc = cscat[j0 + j]
                        if cc == PAD:
                            continue
                        cdata[rr + cc] += coeff * mat[i0 + i, j0 + j]
    return fast, slow


@njit(cache=True, nogil=True)
def unpack_sum(out, data, rscat, cscat, rbs, cbs, coeffs, rb, cb, force_slow):
    """out = sum_t coeffs[t] * view_t as a dense matrix; PAD reads as zero.

    Blockwise fast/slow selection mirrors the packing kernels.
    """
    nviews = coeffs.shape[0]
    m, n = out.shape
    fast = 0
    slow = 0
    for i in range(m):
        for j in range(n):
            out[i, j] = 0.0
    for bj in range((n + cb - 1) // cb):
        j0 = bj * cb
        jlim = min(cb, n - j0)
        for bi in range((m + rb - 1) // rb):
            i0 = bi * rb
            ilim = min(rb, m - i0)
            regular = not force_slow
            if regular:
                for t in range(nviews):
                    if rbs[t, bi] == 0 or cbs[t, bj] == 0:
                        regular = False
                        break
            if regular:
                fast += 1
                for t in range(nviews):
                    co = coeffs[t]
                    rbase = rscat[t, i0]
                    cbase = cscat[t, j0]
                    rstep = rbs[t, bi]
                    cstep = cbs[t, bj]
                    for i in range(ilim):
                        off = rbase + i * rstep + cbase
                        for j in range(jlim):
                            out[i0 + i, j0 + j] += co * data[off + j * cstep]
            else:
                slow += 1
                for t in range(nviews):
                    co = coeffs[t]
                    for i in range(ilim):
                        rr = rscat[t, i0 + i]
                        if rr == PAD:
                            continue
                        for j in range(jlim):
                            cc = cscat[t, j0 + j]
                            if cc == PAD:
                                continue
                            out[i0 + i, j0 + j] += co * data[rr + cc]
    return fast, slow
