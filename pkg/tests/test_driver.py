import numpy as np
import pytest

from strassen_tc import (
    BlockingParams,
    DenseTensor,
    FusedPrimitive,
    OperandTermSide,
    RunStats,
    matrix_view,
    run_fused,
    run_gemm_dense,
    split_view,
)

SMALL = BlockingParams(mc=8, nc=8, kc=4, mr=2, nr=2, kr=2)


def gemm_oracle(a, b):
    m, k = a.shape
    n = b.shape[1]
    out = np.zeros((m, n))
    for j in range(n):
        for i in range(m):
            for p in range(k):
                out[i, j] += a[i, p] * b[p, j]
    return out


def rel_frobenius(x, y):
    denom = np.linalg.norm(y)
    return np.linalg.norm(x - y) / denom if denom else np.linalg.norm(x - y)


def dense_problem(m, n, k, seed, order="F"):
    rng = np.random.default_rng(seed)
    a = np.asarray(rng.uniform(-1, 1, (m, k)), order=order)
    b = np.asarray(rng.uniform(-1, 1, (k, n)), order=order)
    c = np.asarray(rng.uniform(-1, 1, (m, n)), order=order)
    return a, b, c


def test_identity_b_accumulates_a():
    a, _, _ = dense_problem(6, 6, 6, 0)
    b = np.asarray(np.eye(6), order="F")
    c = np.zeros((6, 6), order="F")
    run_gemm_dense(c, a, b, SMALL)
    assert np.array_equal(c, a)


def test_two_by_two_identity():
    a = np.asarray([[1.0, 2.0], [3.0, 4.0]], order="F")
    b = np.asarray(np.eye(2), order="F")
    c = np.zeros((2, 2), order="F")
    run_gemm_dense(c, a, b, SMALL)
    assert np.array_equal(c, a)


def test_random_gemm_matches_triple_loop():
    a, b, c = dense_problem(13, 17, 11, 3)
    expect = c + gemm_oracle(a, b)
    run_gemm_dense(c, a, b, SMALL)
    assert rel_frobenius(c, expect) < 1e-13


def test_gemm_requires_fortran_order():
    a, b, c = dense_problem(4, 4, 4, 1, order="C")
    with pytest.raises(ValueError, match="column-major"):
        run_gemm_dense(np.zeros((4, 4), order="F"), a.copy(order="C"), np.asarray(b, order="F"), SMALL)


def test_gemm_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        run_gemm_dense(np.zeros((4, 4), order="F"), np.zeros((4, 3), order="F"),
                       np.zeros((2, 4), order="F"), SMALL)


def _views_of(arr2d, rb, cb):
    t = DenseTensor(arr2d.shape, (1, arr2d.shape[0]), arr2d.ravel(order="F"))
    return t, matrix_view(t, rb, cb)


def test_singleton_fused_equals_dense_gemm_bitwise():
    a, b, c1 = dense_problem(12, 10, 6, 7)
    c2 = c1.copy(order="F")
    _, va = _views_of(a, SMALL.mr, SMALL.kr)
    _, vb = _views_of(b, SMALL.kr, SMALL.nr)
    tc, vc = _views_of(c1, SMALL.mr, SMALL.nr)
    prim = FusedPrimitive(OperandTermSide([va], [1]), OperandTermSide([vb], [1]),
                          OperandTermSide([vc], [1]))
    run_fused(prim, SMALL)
    run_gemm_dense(c2, a, b, SMALL)
    assert np.array_equal(tc.data, c2.ravel(order="F"))


def test_scalar_fma():
    a = np.full((1, 1), 3.0, order="F")
    b = np.full((1, 1), 5.0, order="F")
    c = np.full((1, 1), 1.0, order="F")
    stats = run_gemm_dense(c, a, b, SMALL)
    assert c[0, 0] == 16.0
    assert stats.leaf_multiplies == 1


def test_fused_strassen_style_term_matches_dense_oracle():
    # c_side (C0,+1),(C3,+1) += (A0 + A3)(B0 + B3) on 4x4 integer matrices
    rng = np.random.default_rng(11)
    a = np.asarray(rng.integers(-9, 10, (4, 4)).astype(float), order="F")
    b = np.asarray(rng.integers(-9, 10, (4, 4)).astype(float), order="F")
    c = np.asarray(rng.integers(-9, 10, (4, 4)).astype(float), order="F")
    expect = c.copy()
    m0 = gemm_oracle(a[:2, :2] + a[2:, 2:], b[:2, :2] + b[2:, 2:])
    expect[:2, :2] += m0
    expect[2:, 2:] += m0

    _, va = _views_of(a, 2, 2)
    _, vb = _views_of(b, 2, 2)
    tc, vc = _views_of(c, 2, 2)
    quad = lambda v, r, s: split_view(v, r, s)
    prim = FusedPrimitive(
        OperandTermSide([quad(va, (0, 2), (0, 2)), quad(va, (2, 4), (2, 4))], [1, 1]),
        OperandTermSide([quad(vb, (0, 2), (0, 2)), quad(vb, (2, 4), (2, 4))], [1, 1]),
        OperandTermSide([quad(vc, (0, 2), (0, 2)), quad(vc, (2, 4), (2, 4))], [1, 1]),
    )
    run_fused(prim, SMALL, validate=True)
    assert np.array_equal(tc.data.reshape(4, 4, order="F"), expect)


def test_validate_rejects_overlapping_targets():
    _, _, c = dense_problem(4, 4, 4, 2)
    tc, vc = _views_of(c, 2, 2)
    q0 = split_view(vc, (0, 2), (0, 2))
    overlap = split_view(vc, (0, 2), (1, 3))  # same shape, shares a column with q0
    _, va = _views_of(np.zeros((2, 2), order="F"), 2, 2)
    _, vb = _views_of(np.zeros((2, 2), order="F"), 2, 2)
    prim = FusedPrimitive(OperandTermSide([va], [1]), OperandTermSide([vb], [1]),
                          OperandTermSide([q0, overlap], [1, 1]))
    with pytest.raises(ValueError, match="overlap"):
        run_fused(prim, SMALL, validate=True)


def test_blocking_invariance_same_k_partition_is_bitwise():
    a, b, c0 = dense_problem(24, 20, 8, 5)
    results = []
    for mc, nc in ((8, 8), (16, 12), (24, 20)):
        c = c0.copy(order="F")
        run_gemm_dense(c, a, b, BlockingParams(mc=mc, nc=nc, kc=4, mr=2, nr=2, kr=2))
        results.append(c.copy())
    assert np.array_equal(results[0], results[1])
    assert np.array_equal(results[0], results[2])


def test_blocking_kc_variation_within_ulp_budget():
    a, b, c0 = dense_problem(16, 16, 32, 6)
    c1 = c0.copy(order="F")
    c2 = c0.copy(order="F")
    run_gemm_dense(c1, a, b, BlockingParams(mc=8, nc=8, kc=8, mr=2, nr=2, kr=2))
    run_gemm_dense(c2, a, b, BlockingParams(mc=8, nc=8, kc=32, mr=2, nr=2, kr=2))
    # ulp at the scale the k-sums accumulate over, not of the (possibly
    # cancelled) final entries
    budget = 8 * 32 * np.spacing(np.maximum(np.abs(c1), np.abs(c2)).max())
    assert (np.abs(c1 - c2) <= budget).all()


def test_threaded_run_is_bitwise_identical():
    a, b, c0 = dense_problem(24, 20, 12, 9)
    c1 = c0.copy(order="F")
    c4 = c0.copy(order="F")
    run_gemm_dense(c1, a, b, SMALL, threads=1)
    run_gemm_dense(c4, a, b, SMALL, threads=4)
    assert np.array_equal(c1, c4)


def test_force_slow_run_is_bitwise_identical():
    a, b, c0 = dense_problem(16, 12, 8, 10)
    c1 = c0.copy(order="F")
    c2 = c0.copy(order="F")
    s1, s2 = RunStats(), RunStats()
    run_gemm_dense(c1, a, b, SMALL, stats=s1)
    run_gemm_dense(c2, a, b, SMALL, stats=s2, force_slow=True)
    assert np.array_equal(c1, c2)
    assert s1.slow_blocks == 0 and s1.slow_updates == 0
    assert s2.fast_blocks == 0 and s2.fast_updates == 0


def test_total_flops_counts_executed_tiles():
    a, b, c = dense_problem(4, 4, 4, 12)
    stats = run_gemm_dense(c, a, b, SMALL)
    assert stats.total_flops == 2 * 4 * 4 * 4
