"""Five-loop blocked driver for the fused primitive C_t += (sum A_t)(sum B_t).

Loop order follows the classical cache-blocked GEMM: jc over nc panels of B
(packed once per (k, n) block), pc over kc, ic over mc blocks of A (packed
once per (m, k) block), then jr/ir register tiles.  The same driver serves
plain GEMM (singleton sides over dense matrix views) and every Strassen term
(multi-view sides with +/-1 coefficients and multiple C targets).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _jit
from .kernels import BlockingParams, OperandTermSide, PackedBuffer, pack_a, pack_b
from .oracle import RunStats
from .scatter import PAD, matrix_view
from .tensor import DenseTensor

__all__ = ["FusedPrimitive", "run_fused", "run_gemm_dense"]


@dataclass(eq=False)
class FusedPrimitive:
    """One fused multiply: c_side targets += (a_side sum) * (b_side sum)."""

    a_side: OperandTermSide
    b_side: OperandTermSide
    c_side: OperandTermSide

    def __post_init__(self):
        m, k = self.a_side.m, self.a_side.n
        n = self.b_side.n
        if self.b_side.m != k:
            raise ValueError(f"A is {m}x{k} but B is {self.b_side.m}x{n}")
        if (self.c_side.m, self.c_side.n) != (m, n):
            raise ValueError(f"C is {self.c_side.m}x{self.c_side.n}, expected {m}x{n}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.a_side.m, self.b_side.n, self.a_side.n


def _offsets_of(view) -> set:
    rows = view.rscat[view.rscat != PAD]
    cols = view.cscat[view.cscat != PAD]
    return set((rows[:, None] + cols[None, :]).ravel().tolist())


def _check_c_targets(c_side: OperandTermSide) -> None:
    """Targets must write pairwise-disjoint offset sets (or be identical views)."""
    offsets = [_offsets_of(v) for v in c_side.views]
    for i in range(len(offsets)):
        for j in range(i + 1, len(offsets)):
            if offsets[i] == offsets[j]:
                continue
            if offsets[i] & offsets[j]:
                raise ValueError(f"C targets {i} and {j} overlap without being identical")


def _jr_chunks(ncount: int, nr: int, threads: int):
    slivers = -(-ncount // nr)
    nchunks = min(threads, slivers)
    per = slivers // nchunks
    extra = slivers % nchunks
    start = 0
    for t in range(nchunks):
        take = per + (1 if t < extra else 0)
        yield start * nr, min((start + take) * nr, ncount)
        start += take


def run_fused(prim: FusedPrimitive, params: BlockingParams, stats: RunStats | None = None,
              threads: int = 1, force_slow: bool = False, workspace=None,
              validate: bool = False) -> RunStats:
    """Execute the fused primitive over cache blocks; counts one leaf multiply."""
    if stats is None:
        stats = RunStats()
    m, n, k = prim.shape
    a_side, b_side, c_side = prim.a_side, prim.b_side, prim.c_side
    if (c_side.rb, c_side.cb) != (params.mr, params.nr):
        raise ValueError(f"C-side views need block geometry ({params.mr},{params.nr})")
    if validate:
        _check_c_targets(c_side)
    if workspace is None:
        a_buf = PackedBuffer.a_panel(params, m, k)
        b_buf = PackedBuffer.b_panel(params, n, k)
    else:
        a_buf, b_buf = workspace
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for jc in range(0, n, params.nc):
            ncount = min(params.nc, n - jc)
            for pc in range(0, k, params.kc):
                kcount = min(params.kc, k - pc)
                pack_b(b_side, (pc, pc + kcount), (jc, jc + ncount), params, b_buf, stats, force_slow)
                for ic in range(0, m, params.mc):
                    mcount = min(params.mc, m - ic)
                    pack_a(a_side, (ic, ic + mcount), (pc, pc + kcount), params, a_buf, stats, force_slow)
                    if pool is None:
                        results = [_jit.macro_kernel(
                            a_buf.data, b_buf.data, kcount, c_side.data,
                            c_side.rscat2, c_side.cscat2, c_side.rbs2, c_side.cbs2,
                            c_side.coeff_arr, ic, mcount, jc, 0, ncount,
                            params.mr, params.nr, force_slow)]
                    else:
                        futures = [pool.submit(
                            _jit.macro_kernel,
                            a_buf.data, b_buf.data, kcount, c_side.data,
                            c_side.rscat2, c_side.cscat2, c_side.rbs2, c_side.cbs2,
                            c_side.coeff_arr, ic, mcount, jc, jr0, jr1,
                            params.mr, params.nr, force_slow)
                            for jr0, jr1 in _jr_chunks(ncount, params.nr, threads)]
                        results = [f.result() for f in futures]
                    for fast, slow, tiles in results:
                        stats.fast_updates += fast
                        stats.slow_updates += slow
                        stats.total_flops += 2.0 * params.mr * params.nr * kcount * tiles
    finally:
        if pool is not None:
            pool.shutdown()
    stats.leaf_multiplies += 1
    return stats


def _as_tensor(mat: np.ndarray, name: str) -> DenseTensor:
    if mat.ndim != 2 or mat.dtype != np.float64:
        raise ValueError(f"{name} must be a 2-D float64 array")
    if not mat.flags.f_contiguous:
        raise ValueError(f"{name} must be column-major (order='F')")
    flat = mat.ravel(order="F")
    assert flat.base is not None  # view, never a copy
    return DenseTensor(mat.shape, (1, mat.shape[0]), flat)


def run_gemm_dense(c: np.ndarray, a: np.ndarray, b: np.ndarray, params: BlockingParams,
                   stats: RunStats | None = None, threads: int = 1, force_slow: bool = False,
                   workspace=None) -> RunStats:
    """C += A @ B through the same loop structure with trivial unit/ld scatter."""
    m, k = a.shape
    n = b.shape[1]
    if b.shape[0] != k or c.shape != (m, n):
        raise ValueError(f"shape mismatch: C{c.shape} += A{a.shape} @ B{b.shape}")
    prim = FusedPrimitive(
        OperandTermSide([matrix_view(_as_tensor(a, "a"), params.mr, params.kr)], [1]),
        OperandTermSide([matrix_view(_as_tensor(b, "b"), params.kr, params.nr)], [1]),
        OperandTermSide([matrix_view(_as_tensor(c, "c"), params.mr, params.nr)], [1]),
    )
    return run_fused(prim, params, stats, threads=threads, force_slow=force_slow, workspace=workspace)
