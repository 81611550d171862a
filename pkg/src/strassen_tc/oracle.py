"""Ground-truth contraction, accuracy metric, and run statistics.

The reference path is deliberately independent of the blocked GEMM machinery:
it enumerates per-bundle element offsets with plain stride arithmetic and runs
a bare loop nest (P innermost), so it can serve as the oracle for everything
else in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .tensor import ContractionSpec, DenseTensor

__all__ = ["RunStats", "contract_reference", "effective_gflops", "relative_error"]


@dataclass
class RunStats:
    """Timing, flop accounting, and instrumentation counters for one run.

    ``total_flops`` counts micro-kernel multiply-adds actually executed (2 per
    MAC), while ``effective_gflops`` is always normalized to the classical
    ``2 * N_I * N_J * N_P`` count, so Strassen's savings show up as a higher
    effective rate.
    """

    seconds: float = 0.0
    total_flops: float = 0.0
    effective_gflops: float = 0.0
    rel_error: float | None = None
    fast_blocks: int = 0
    slow_blocks: int = 0
    fast_updates: int = 0
    slow_updates: int = 0
    leaf_multiplies: int = 0

    def total_gflops(self) -> float:
        return self.total_flops / self.seconds / 1e9 if self.seconds > 0 else 0.0


def effective_gflops(n_i: int, n_j: int, n_p: int, seconds: float) -> float:
    """2 * N_I * N_J * N_P / time / 1e9, the classical-flop-normalized rate."""
    if seconds <= 0:
        raise ValueError(f"seconds must be positive, got {seconds}")
    return 2.0 * n_i * n_j * n_p / seconds / 1e9


def _bundle_offsets(bundle: str, labels: str, t: DenseTensor, with_base: bool) -> np.ndarray:
    """Offsets of one bundle's multi-indices into t.data, first bundle label fastest."""
    offs = [t.base_offset if with_base else 0]
    for lab in bundle:
        ax = labels.index(lab)
        offs = [o + i * t.strides[ax] for i in range(t.extents[ax]) for o in offs]
    return np.asarray(offs, dtype=np.int64)


@njit(cache=True, nogil=True)
def _ref_loop_nest(cdata, adata, bdata, c_ri, c_cj, a_ri, a_cp, b_rp, b_cj):
    ni = c_ri.size
    nj = c_cj.size
    nk = a_cp.size
    for j in range(nj):
        for i in range(ni):
            acc = 0.0
            for p in range(nk):
                acc += adata[a_ri[i] + a_cp[p]] * bdata[b_rp[p] + b_cj[j]]
            cdata[c_ri[i] + c_cj[j]] += acc


def _check_conformance(spec: ContractionSpec, t: DenseTensor, labels: str, name: str) -> None:
    want = spec.tensor_extents(labels)
    if t.extents != want:
        raise ValueError(f"tensor {name} extents {t.extents} do not match spec {want}")


def contract_reference(spec: ContractionSpec, a: DenseTensor, b: DenseTensor, c: DenseTensor) -> None:
    """C += contraction, looping every (I, J, P) multi-index with P innermost."""
    _check_conformance(spec, a, spec.labels_a, "A")
    _check_conformance(spec, b, spec.labels_b, "B")
    _check_conformance(spec, c, spec.labels_c, "C")
    c_ri = _bundle_offsets(spec.bundle_i, spec.labels_c, c, with_base=True)
    c_cj = _bundle_offsets(spec.bundle_j, spec.labels_c, c, with_base=False)
    a_ri = _bundle_offsets(spec.bundle_i, spec.labels_a, a, with_base=True)
    a_cp = _bundle_offsets(spec.bundle_p, spec.labels_a, a, with_base=False)
    b_rp = _bundle_offsets(spec.bundle_p, spec.labels_b, b, with_base=True)
    b_cj = _bundle_offsets(spec.bundle_j, spec.labels_b, b, with_base=False)
    _ref_loop_nest(c.data, a.data, b.data, c_ri, c_cj, a_ri, a_cp, b_rp, b_cj)


def _all_offsets(t: DenseTensor) -> np.ndarray:
    offs = np.full(1, t.base_offset, dtype=np.int64)
    for e, s in zip(t.extents, t.strides):
        offs = (offs[:, None] + (np.arange(e, dtype=np.int64) * s)[None, :]).ravel(order="F")
    return offs


@njit(cache=True, nogil=True)
def _seq_sum_sq(x):
    acc = 0.0
    for i in range(x.size):
        acc += x[i] * x[i]
    return acc


def relative_error(t: DenseTensor, t_ref: DenseTensor) -> float:
    """Frobenius norm of (t - t_ref) over the Frobenius norm of t_ref.

    Returns 0.0 when both tensors are identically zero.  Sums are accumulated
    sequentially in element order, so results are deterministic.
    """
    if t.extents != t_ref.extents:
        raise ValueError(f"extent mismatch: {t.extents} vs {t_ref.extents}")
    vals = t.data[_all_offsets(t)]
    ref = t_ref.data[_all_offsets(t_ref)]
    num = math.sqrt(_seq_sum_sq(vals - ref))
    den = math.sqrt(_seq_sum_sq(ref))
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den
