"""Packing kernels, the register-blocked micro-kernel, and C-update kernels.

Packing fuses the +/- combination of up to 2^L operand quadrant views into
sliver-major buffers; the micro-kernel multiplies one packed sliver pair into
an mr x nr accumulator and scatters the update into one or more C targets.
Per sub-block, the fast strided path is taken only when the block scatter
entries of every participating view are nonzero; otherwise elements go
through the scatter vectors one by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _jit
from .oracle import RunStats
from .scatter import BlockScatterView

__all__ = [
    "DEFAULT_BLOCKING",
    "BlockingParams",
    "OperandTermSide",
    "PackedBuffer",
    "accumulate_dense_to_view",
    "microkernel",
    "pack_a",
    "pack_b",
    "unpack_to_dense",
]


@dataclass(frozen=True)
class BlockingParams:
    """Cache blocking (mc, nc, kc) and register blocking (mr, nr, kr) in elements."""

    mc: int = 96
    nc: int = 4096
    kc: int = 256
    mr: int = 8
    nr: int = 4
    kr: int = 4

    def __post_init__(self):
        for name in ("mc", "nc", "kc", "mr", "nr", "kr"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.mc % self.mr or self.nc % self.nr or self.kc % self.kr:
            raise ValueError(
                f"cache blocks must be multiples of register blocks: "
                f"mc={self.mc} mr={self.mr} nc={self.nc} nr={self.nr} kc={self.kc} kr={self.kr}"
            )


DEFAULT_BLOCKING = BlockingParams()


def _aligned_zeros(shape) -> np.ndarray:
    """float64 array aligned to 64 bytes (cache line)."""
    n = int(np.prod(shape))
    raw = np.zeros(n + 8, dtype=np.float64)
    off = (-raw.ctypes.data % 64) // 8
    return raw[off : off + n].reshape(shape)


@dataclass(eq=False)
class PackedBuffer:
    """Sliver-major packed panel.

    A-side layout: element (i, p) of sliver s at ``s*(width*depth) + p*width + i``
    with width = mr; B-side mirrors it with width = nr, element (p, j).
    ``data`` is indexed as ``data[s, p, i_or_j]``.
    """

    data: np.ndarray
    width: int
    depth: int

    @property
    def n_slivers(self) -> int:
        return self.data.shape[0]

    def element(self, s: int, p: int, i: int) -> float:
        return float(self.data[s, p, i])

    @classmethod
    def a_panel(cls, params: BlockingParams, m: int | None = None, k: int | None = None) -> "PackedBuffer":
        rows = params.mc if m is None else min(params.mc, m)
        depth = params.kc if k is None else min(params.kc, k)
        slivers = -(-rows // params.mr)
        return cls(_aligned_zeros((slivers, depth, params.mr)), params.mr, depth)

    @classmethod
    def b_panel(cls, params: BlockingParams, n: int | None = None, k: int | None = None) -> "PackedBuffer":
        cols = params.nc if n is None else min(params.nc, n)
        depth = params.kc if k is None else min(params.kc, k)
        slivers = -(-cols // params.nr)
        return cls(_aligned_zeros((slivers, depth, params.nr)), params.nr, depth)


@dataclass(eq=False)
class OperandTermSide:
    """Views of one term's operand side with their +/-1 coefficients.

    All views must share one parent tensor and one matrix/block geometry.
    """

    views: tuple
    coeffs: tuple
    rscat2: np.ndarray = field(init=False, repr=False)
    cscat2: np.ndarray = field(init=False, repr=False)
    rbs2: np.ndarray = field(init=False, repr=False)
    cbs2: np.ndarray = field(init=False, repr=False)
    coeff_arr: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.views = tuple(self.views)
        self.coeffs = tuple(int(c) for c in self.coeffs)
        if not self.views or len(self.views) != len(self.coeffs):
            raise ValueError("need equally many views and coefficients, at least one each")
        if any(c not in (-1, 1) for c in self.coeffs):
            raise ValueError(f"coefficients must be +/-1, got {self.coeffs}")
        v0 = self.views[0]
        for v in self.views:
            if (v.m, v.n, v.rb, v.cb) != (v0.m, v0.n, v0.rb, v0.cb):
                raise ValueError("views of one side must share matrix and block geometry")
            if v.base.data is not v0.base.data:
                raise ValueError("views of one side must share one parent tensor")
        self.rscat2 = np.vstack([v.rscat for v in self.views])
        self.cscat2 = np.vstack([v.cscat for v in self.views])
        self.rbs2 = np.vstack([v.rbs for v in self.views])
        self.cbs2 = np.vstack([v.cbs for v in self.views])
        self.coeff_arr = np.asarray(self.coeffs, dtype=np.float64)

    @property
    def m(self) -> int:
        return self.views[0].m

    @property
    def n(self) -> int:
        return self.views[0].n

    @property
    def rb(self) -> int:
        return self.views[0].rb

    @property
    def cb(self) -> int:
        return self.views[0].cb

    @property
    def data(self) -> np.ndarray:
        return self.views[0].base.data


def _check_interval(name, lo, hi, limit, cap, align):
    if not (0 <= lo < hi <= limit):
        raise ValueError(f"{name} interval [{lo},{hi}) out of bounds for size {limit}")
    if hi - lo > cap:
        raise ValueError(f"{name} interval [{lo},{hi}) exceeds cache block {cap}")
    if lo % align:
        raise ValueError(f"{name} interval must start at a multiple of {align}")


def pack_a(side: OperandTermSide, row_block, k_block, params: BlockingParams,
           out: PackedBuffer, stats: RunStats, force_slow: bool = False) -> None:
    """Pack the A-side term sum over row_block x k_block into mr-row slivers."""
    if (side.rb, side.cb) != (params.mr, params.kr):
        raise ValueError(f"A-side views need block geometry ({params.mr},{params.kr}), got ({side.rb},{side.cb})")
    r0, r1 = row_block
    k0, k1 = k_block
    _check_interval("row", r0, r1, side.m, params.mc, params.mr)
    _check_interval("k", k0, k1, side.n, params.kc, params.kr)
    if out.width != params.mr or out.depth < k1 - k0 or out.n_slivers < -(-(r1 - r0) // params.mr):
        raise ValueError("packed buffer too small for the requested block")
    fast, slow = _jit.pack_a_block(
        out.data, side.data, side.rscat2, side.cscat2, side.rbs2, side.cbs2,
        side.coeff_arr, r0, r1 - r0, k0, k1 - k0, params.mr, params.kr, force_slow,
    )
    stats.fast_blocks += fast
    stats.slow_blocks += slow


def pack_b(side: OperandTermSide, k_block, col_block, params: BlockingParams,
           out: PackedBuffer, stats: RunStats, force_slow: bool = False) -> None:
    """Pack the B-side term sum over k_block x col_block into nr-column slivers."""
    if (side.rb, side.cb) != (params.kr, params.nr):
        raise ValueError(f"B-side views need block geometry ({params.kr},{params.nr}), got ({side.rb},{side.cb})")
    k0, k1 = k_block
    c0, c1 = col_block
    _check_interval("k", k0, k1, side.m, params.kc, params.kr)
    _check_interval("col", c0, c1, side.n, params.nc, params.nr)
    if out.width != params.nr or out.depth < k1 - k0 or out.n_slivers < -(-(c1 - c0) // params.nr):
        raise ValueError("packed buffer too small for the requested block")
    fast, slow = _jit.pack_b_block(
        out.data, side.data, side.rscat2, side.cscat2, side.rbs2, side.cbs2,
        side.coeff_arr, k0, k1 - k0, c0, c1 - c0, params.kr, params.nr, force_slow,
    )
    stats.fast_blocks += fast
    stats.slow_blocks += slow


def microkernel(a_sliver: np.ndarray, b_sliver: np.ndarray, k: int, targets,
                stats: RunStats, force_slow: bool = False) -> None:
    """Compute the mr x nr tile product once, then add coeff * tile into every target.

    ``targets`` is a list of ``(view, i0, j0, coeff)`` naming an mr x nr region
    of a C view (i0/j0 block-aligned; fringe regions are clipped to the view).
    """
    if k == 0:
        return
    a_sliver = np.ascontiguousarray(a_sliver, dtype=np.float64)
    b_sliver = np.ascontiguousarray(b_sliver, dtype=np.float64)
    mr, nr = a_sliver.shape[0], b_sliver.shape[1]
    if a_sliver.shape[1] < k or b_sliver.shape[0] < k:
        raise ValueError("slivers shorter than the requested accumulation depth")
    acc = np.zeros((mr, nr))
    _jit.microtile_mats(acc, a_sliver, b_sliver, k)
    for view, i0, j0, coeff in targets:
        if view.rb != mr or view.cb != nr:
            raise ValueError(f"target blocks ({view.rb},{view.cb}) do not match tile ({mr},{nr})")
        if i0 % mr or j0 % nr:
            raise ValueError("tile origin must be block-aligned")
        hit = _jit.store_tile(
            acc, view.base.data, view.rscat, view.cscat, view.rbs, view.cbs,
            float(coeff), i0, min(mr, view.m - i0), j0, min(nr, view.n - j0),
            mr, nr, force_slow,
        )
        if hit:
            stats.fast_updates += 1
        else:
            stats.slow_updates += 1


def accumulate_dense_to_view(mat: np.ndarray, coeff: int, target: BlockScatterView,
                             stats: RunStats, force_slow: bool = False) -> None:
    """target += coeff * mat through the scatter offsets, blockwise fast/slow."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.shape != (target.m, target.n):
        raise ValueError(f"matrix shape {mat.shape} does not match view {target.m}x{target.n}")
    fast, slow = _jit.accum_dense(
        mat, target.base.data, target.rscat, target.cscat, target.rbs, target.cbs,
        float(coeff), target.rb, target.cb, force_slow,
    )
    stats.fast_updates += fast
    stats.slow_updates += slow


def unpack_to_dense(side: OperandTermSide, out: np.ndarray | None = None,
                    stats: RunStats | None = None, force_slow: bool = False) -> np.ndarray:
    """Materialize the term sum as a dense column-major matrix (PAD reads as 0)."""
    if out is None:
        out = np.zeros((side.m, side.n), order="F")
    elif out.shape != (side.m, side.n) or out.dtype != np.float64:
        raise ValueError(f"out must be a float64 {side.m}x{side.n} matrix")
    fast, slow = _jit.unpack_sum(
        out, side.data, side.rscat2, side.cscat2, side.rbs2, side.cbs2,
        side.coeff_arr, side.rb, side.cb, force_slow,
    )
    if stats is not None:
        stats.fast_blocks += fast
        stats.slow_blocks += slow
    return out
