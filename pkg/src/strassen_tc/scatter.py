"""Matricized tensor views through scatter vectors and block scatter vectors.

A view presents a strided tensor as an m x n matrix: element (i, j) lives at
``base.data[rscat[i] + cscat[j]]``.  Scatter vectors are summarized per block
of ``rb`` rows / ``cb`` columns: the block scatter entry is the block's
constant stride when it has one, else 0, which is what lets packing and
micro-kernels choose between a two-stride fast path and per-element gathers.

The sentinel ``PAD`` marks implicit zero rows/columns (reads yield 0.0,
writes are dropped); any block containing PAD gets block scatter entry 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import DenseTensor

__all__ = ["PAD", "BlockScatterView", "make_view", "matrix_view", "pad_view", "split_view"]

PAD = int(np.iinfo(np.int64).min)


def _block_vector(scat: np.ndarray, blk: int, unit_stride: int) -> np.ndarray:
    nblocks = -(-scat.size // blk)
    bs = np.zeros(nblocks, dtype=np.int64)
    for b in range(nblocks):
        seg = scat[b * blk : b * blk + blk]
        if np.any(seg == PAD):
            continue
        if seg.size == 1:
            # a one-entry block is vacuously strided; keep the originating stride
            bs[b] = unit_stride if unit_stride > 0 else 0
            continue
        d = int(seg[1]) - int(seg[0])
        if d > 0 and np.all(np.diff(seg) == d):
            bs[b] = d
    return bs


@dataclass(eq=False)
class BlockScatterView:
    """m x n matrix view of ``base`` with per-block stride summaries."""

    base: DenseTensor
    m: int
    n: int
    rscat: np.ndarray
    cscat: np.ndarray
    rb: int
    cb: int
    rbs: np.ndarray
    cbs: np.ndarray
    row_unit_stride: int = 1
    col_unit_stride: int = 1

    @classmethod
    def from_scatter(cls, base, rscat, cscat, rb, cb, row_unit_stride=1, col_unit_stride=1):
        rscat = np.asarray(rscat, dtype=np.int64)
        cscat = np.asarray(cscat, dtype=np.int64)
        if rb < 1 or cb < 1:
            raise ValueError("block sizes must be >= 1")
        return cls(
            base=base,
            m=rscat.size,
            n=cscat.size,
            rscat=rscat,
            cscat=cscat,
            rb=rb,
            cb=cb,
            rbs=_block_vector(rscat, rb, row_unit_stride),
            cbs=_block_vector(cscat, cb, col_unit_stride),
            row_unit_stride=row_unit_stride,
            col_unit_stride=col_unit_stride,
        )

    def get(self, i: int, j: int) -> float:
        """Element (i, j); PAD positions read as 0.0."""
        r, c = self.rscat[i], self.cscat[j]
        if r == PAD or c == PAD:
            return 0.0
        return float(self.base.data[r + c])

    def set(self, i: int, j: int, value: float) -> None:
        """Write element (i, j); writes to PAD positions are dropped."""
        r, c = self.rscat[i], self.cscat[j]
        if r == PAD or c == PAD:
            return
        self.base.data[r + c] = value

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BlockScatterView)
            and self.base is other.base
            and (self.m, self.n, self.rb, self.cb) == (other.m, other.n, other.rb, other.cb)
            and np.array_equal(self.rscat, other.rscat)
            and np.array_equal(self.cscat, other.cscat)
            and np.array_equal(self.rbs, other.rbs)
            and np.array_equal(self.cbs, other.cbs)
        )


def _bundle_scatter(t: DenseTensor, bundle, label_axes) -> np.ndarray:
    """Offsets of the bundle's linearized index, first bundle label fastest."""
    scat = np.zeros(1, dtype=np.int64)
    for lab in bundle:
        ax = label_axes[lab]
        contrib = np.arange(t.extents[ax], dtype=np.int64) * t.strides[ax]
        scat = (scat[:, None] + contrib[None, :]).ravel(order="F")
    return scat


def make_view(t: DenseTensor, row_bundle, col_bundle, label_axes, rb: int, cb: int) -> BlockScatterView:
    """Matricize ``t``: rows linearize ``row_bundle``, columns ``col_bundle``.

    The tensor's base_offset is folded into every cscat entry, so addressing
    is always ``rscat[i] + cscat[j]`` with no third term.
    """
    row_axes = [label_axes[l] for l in row_bundle]
    col_axes = [label_axes[l] for l in col_bundle]
    if set(row_axes) & set(col_axes):
        raise ValueError("row and column bundles overlap")
    if sorted(row_axes + col_axes) != list(range(t.ndim)):
        raise ValueError("bundles must cover every axis of the tensor exactly once")
    rscat = _bundle_scatter(t, row_bundle, label_axes)
    cscat = _bundle_scatter(t, col_bundle, label_axes) + t.base_offset
    row_unit = t.strides[label_axes[row_bundle[0]]] if len(row_bundle) else 1
    col_unit = t.strides[label_axes[col_bundle[0]]] if len(col_bundle) else 1
    return BlockScatterView.from_scatter(t, rscat, cscat, rb, cb, row_unit, col_unit)


def matrix_view(t: DenseTensor, rb: int, cb: int) -> BlockScatterView:
    """View of a 2-axis tensor as itself (rows = axis 0, columns = axis 1)."""
    if t.ndim != 2:
        raise ValueError(f"matrix_view needs a 2-axis tensor, got {t.ndim}")
    rscat = np.arange(t.extents[0], dtype=np.int64) * t.strides[0]
    cscat = np.arange(t.extents[1], dtype=np.int64) * t.strides[1] + t.base_offset
    return BlockScatterView.from_scatter(t, rscat, cscat, rb, cb, t.strides[0], t.strides[1])


def split_view(v: BlockScatterView, row_range, col_range) -> BlockScatterView:
    """Sub-view over half-open ranges; block scatter vectors are recomputed
    with blocks re-aligned to the range start."""
    r0, r1 = row_range
    c0, c1 = col_range
    if not (0 <= r0 < r1 <= v.m and 0 <= c0 < c1 <= v.n):
        raise ValueError(f"empty or out-of-bounds range ({row_range}, {col_range}) for {v.m}x{v.n} view")
    return BlockScatterView.from_scatter(
        v.base, v.rscat[r0:r1], v.cscat[c0:c1], v.rb, v.cb, v.row_unit_stride, v.col_unit_stride
    )


def pad_view(v: BlockScatterView, m_target: int, n_target: int) -> BlockScatterView:
    """Extend a view with PAD rows/columns up to the target dimensions."""
    if m_target < v.m or n_target < v.n:
        raise ValueError("pad targets must not shrink the view")
    if m_target == v.m and n_target == v.n:
        return v
    rscat = np.concatenate([v.rscat, np.full(m_target - v.m, PAD, dtype=np.int64)])
    cscat = np.concatenate([v.cscat, np.full(n_target - v.n, PAD, dtype=np.int64)])
    return BlockScatterView.from_scatter(
        v.base, rscat, cscat, v.rb, v.cb, v.row_unit_stride, v.col_unit_stride
    )
