"""Strassen term generation, quadrant partitioning, and the contraction driver.

Partitioning each matricized operand into quadrants

    X = | X0 X1 |
        | X2 X3 |

turns one multiply into seven fused primitives per level; L levels compose to
7^L terms over 4^L quadrants.  Three execution variants are provided: ABC
fuses the operand sums into packing and the C updates into the micro-kernel,
AB materializes only the intermediate product M, and Naive additionally
materializes the operand sums as regular dense matrices.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .driver import FusedPrimitive, run_fused, run_gemm_dense
from .kernels import (
    DEFAULT_BLOCKING,
    BlockingParams,
    OperandTermSide,
    PackedBuffer,
    accumulate_dense_to_view,
    unpack_to_dense,
)
from .oracle import RunStats, effective_gflops
from .scatter import BlockScatterView, make_view, matrix_view, pad_view, split_view
from .tensor import ContractionSpec, DenseTensor, make_dense_tensor

__all__ = ["MAX_LEVEL", "StrassenTerm", "Variant", "contract", "quadrant_views", "strassen_terms"]

MAX_LEVEL = 2


class Variant(Enum):
    ABC = "abc"
    AB = "ab"
    NAIVE = "naive"


@dataclass(frozen=True)
class StrassenTerm:
    """One fused primitive: quadrant ids with +/-1 coefficients per operand."""

    a_ops: tuple
    b_ops: tuple
    c_ops: tuple


# The single-level operation table: seven products instead of eight.
_LEVEL1 = (
    StrassenTerm(((0, 1), (3, 1)), ((0, 1), (3, 1)), ((0, 1), (3, 1))),
    StrassenTerm(((2, 1), (3, 1)), ((0, 1),), ((2, 1), (3, -1))),
    StrassenTerm(((0, 1),), ((1, 1), (3, -1)), ((1, 1), (3, 1))),
    StrassenTerm(((3, 1),), ((2, 1), (0, -1)), ((0, 1), (2, 1))),
    StrassenTerm(((0, 1), (1, 1)), ((3, 1),), ((1, 1), (0, -1))),
    StrassenTerm(((2, 1), (0, -1)), ((0, 1), (1, 1)), ((3, 1),)),
    StrassenTerm(((1, 1), (3, -1)), ((2, 1), (3, 1)), ((0, 1),)),
)

_IDENTITY = StrassenTerm(((0, 1),), ((0, 1),), ((0, 1),))


def strassen_terms(level: int, allow_deep: bool = False) -> list[StrassenTerm]:
    """Terms for an L-level recursion: 7^L entries over quadrant ids [0, 4^L).

    Multi-level tables are generated by substituting the level-(L-1) table
    into each level-1 operand: quadrant q at sign s expands to
    ``(q * 4^(L-1) + sub_id, s * sub_sign)``.  Levels above 2 need
    ``allow_deep`` (deep recursions trade accuracy for little gain).
    """
    if level < 0:
        raise ValueError(f"level must be non-negative, got {level}")
    if level > MAX_LEVEL and not allow_deep:
        raise ValueError(f"level {level} exceeds the cap of {MAX_LEVEL} (pass allow_deep to override)")
    terms = [_IDENTITY]
    for lev in range(1, level + 1):
        mult = 4 ** (lev - 1)

        def expand(outer_ops, inner_ops):
            return tuple((q * mult + q2, s * s2) for q, s in outer_ops for q2, s2 in inner_ops)

        terms = [
            StrassenTerm(expand(t1.a_ops, t2.a_ops), expand(t1.b_ops, t2.b_ops), expand(t1.c_ops, t2.c_ops))
            for t1 in _LEVEL1
            for t2 in terms
        ]
    return terms


def _next_multiple(x: int, step: int) -> int:
    return -(-x // step) * step


def quadrant_views(v: BlockScatterView, level: int) -> dict[int, BlockScatterView]:
    """Recursive 2x2 split into 4^level congruent quadrants, id row-major per level.

    Odd dimensions are first padded (with PAD entries) to the next multiple of
    2^level, so every quadrant has the same shape.
    """
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    step = 2 ** level
    v = pad_view(v, _next_multiple(v.m, step), _next_multiple(v.n, step))

    def rec(view, lev):
        if lev == 0:
            return [view]
        h, w = view.m // 2, view.n // 2
        quads = [
            split_view(view, (0, h), (0, w)),
            split_view(view, (0, h), (w, 2 * w)),
            split_view(view, (h, 2 * h), (0, w)),
            split_view(view, (h, 2 * h), (w, 2 * w)),
        ]
        out = []
        for q in quads:
            out.extend(rec(q, lev - 1))
        return out

    return dict(enumerate(rec(v, level)))


def _check_operands(spec: ContractionSpec, a: DenseTensor, b: DenseTensor, c: DenseTensor) -> None:
    for t, labels, name in ((a, spec.labels_a, "A"), (b, spec.labels_b, "B"), (c, spec.labels_c, "C")):
        want = spec.tensor_extents(labels)
        if t.extents != want:
            raise ValueError(f"tensor {name} extents {t.extents} do not match spec {want}")


def _side(quads: dict, ops, coeff_sign: int = 1) -> OperandTermSide:
    return OperandTermSide([quads[q] for q, _ in ops], [coeff_sign * s for _, s in ops])


def contract(spec: ContractionSpec, a: DenseTensor, b: DenseTensor, c: DenseTensor,
             level: int, variant: Variant, params: BlockingParams = DEFAULT_BLOCKING,
             threads: int = 1, force_slow: bool = False, allow_deep: bool = False,
             validate: bool = False) -> RunStats:
    """C += contraction of A and B using an L-level Strassen recursion.

    Level 0 degenerates to the plain block scatter GEMM.  All variants are
    mathematically identical up to floating-point reordering and execute
    exactly 7^level leaf multiplies.
    """
    _check_operands(spec, a, b, c)
    terms = strassen_terms(level, allow_deep)
    stats = RunStats()
    t_start = time.perf_counter()

    axes_a = {lab: i for i, lab in enumerate(spec.labels_a)}
    axes_b = {lab: i for i, lab in enumerate(spec.labels_b)}
    axes_c = {lab: i for i, lab in enumerate(spec.labels_c)}
    va = make_view(a, spec.bundle_i, spec.bundle_p, axes_a, params.mr, params.kr)
    vb = make_view(b, spec.bundle_p, spec.bundle_j, axes_b, params.kr, params.nr)
    vc = make_view(c, spec.bundle_i, spec.bundle_j, axes_c, params.mr, params.nr)

    if level == 0:
        quads_a, quads_b, quads_c = {0: va}, {0: vb}, {0: vc}
    else:
        quads_a = quadrant_views(va, level)
        quads_b = quadrant_views(vb, level)
        quads_c = quadrant_views(vc, level)
    mq, kq = quads_a[0].m, quads_a[0].n
    nq = quads_b[0].n
    workspace = (PackedBuffer.a_panel(params, mq, kq), PackedBuffer.b_panel(params, nq, kq))

    if variant is Variant.ABC:
        for term in terms:
            prim = FusedPrimitive(_side(quads_a, term.a_ops), _side(quads_b, term.b_ops),
                                  _side(quads_c, term.c_ops))
            run_fused(prim, params, stats, threads=threads, force_slow=force_slow,
                      workspace=workspace, validate=validate)
    else:
        m_tensor = make_dense_tensor((mq, nq))
        m_mat = m_tensor.data.reshape((mq, nq), order="F")
        m_view = matrix_view(m_tensor, params.mr, params.nr)
        m_target = OperandTermSide([m_view], [1])
        if variant is Variant.NAIVE:
            a_dense = np.zeros((mq, kq), order="F")
            b_dense = np.zeros((kq, nq), order="F")
        for term in terms:
            a_sum = _side(quads_a, term.a_ops)
            b_sum = _side(quads_b, term.b_ops)
            m_tensor.data[:] = 0.0
            if variant is Variant.AB:
                prim = FusedPrimitive(a_sum, b_sum, m_target)
                run_fused(prim, params, stats, threads=threads, force_slow=force_slow,
                          workspace=workspace, validate=validate)
            elif variant is Variant.NAIVE:
                unpack_to_dense(a_sum, out=a_dense, stats=stats, force_slow=force_slow)
                unpack_to_dense(b_sum, out=b_dense, stats=stats, force_slow=force_slow)
                run_gemm_dense(m_mat, a_dense, b_dense, params, stats, threads=threads,
                               force_slow=force_slow, workspace=workspace)
            else:
                raise ValueError(f"unknown variant {variant!r}")
            for q, sign in term.c_ops:
                accumulate_dense_to_view(m_mat, sign, quads_c[q], stats, force_slow=force_slow)

    stats.seconds = max(time.perf_counter() - t_start, 1e-12)
    stats.effective_gflops = effective_gflops(spec.n_i, spec.n_j, spec.n_p, stats.seconds)
    return stats
