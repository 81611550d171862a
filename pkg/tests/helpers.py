"""Shared builders for randomized specs, permuted-layout tensors, and oracles."""

import numpy as np

from strassen_tc import ContractionSpec, DenseTensor, element_at, make_dense_tensor

LETTERS = "abcdefghijkl"


def permuted_tensor(extents, seed, fill="random", int_bound=None):
    """Tensor with column-major strides assigned in a random axis order."""
    rng = np.random.default_rng(seed)
    extents = tuple(int(e) for e in extents)
    order = rng.permutation(len(extents))
    strides = [0] * len(extents)
    step = 1
    for ax in order:
        strides[ax] = step
        step *= extents[ax]
    if fill == "random":
        data = rng.uniform(-1.0, 1.0, step)
    elif fill == "int":
        bound = 1024 if int_bound is None else int_bound
        data = rng.integers(-bound, bound + 1, step).astype(np.float64)
    else:
        data = np.zeros(step)
    return DenseTensor(extents, tuple(strides), data)


def random_bundle_extents(rng, max_labels=3, max_extent=24, max_size=36):
    """1..max_labels extents in [1, max_extent] whose product stays small."""
    while True:
        n = int(rng.integers(1, max_labels + 1))
        ext = [int(rng.integers(1, max_extent + 1)) for _ in range(n)]
        if np.prod(ext) <= max_size:
            return ext


def random_spec(rng, max_labels=3, max_extent=24, max_size=36):
    """Random contraction: 1-3 labels per bundle, labels shuffled within each tensor."""
    ni = random_bundle_extents(rng, max_labels, max_extent, max_size)
    nj = random_bundle_extents(rng, max_labels, max_extent, max_size)
    nk = random_bundle_extents(rng, max_labels, max_extent, max_size)
    labels = list(LETTERS[: len(ni) + len(nj) + len(nk)])
    li = labels[: len(ni)]
    lj = labels[len(ni) : len(ni) + len(nj)]
    lp = labels[len(ni) + len(nj) :]
    extents = dict(zip(li + lj + lp, ni + nj + nk))

    def shuffled(lab):
        lab = list(lab)
        rng.shuffle(lab)
        return "".join(lab)

    return ContractionSpec(shuffled(li + lj), shuffled(li + lp), shuffled(lp + lj), extents)


def spec_operands(spec, seed, fill="random", int_bound=None):
    """(A, B, C) with random strides via permuted layouts."""
    a = permuted_tensor(spec.tensor_extents(spec.labels_a), seed, fill, int_bound)
    b = permuted_tensor(spec.tensor_extents(spec.labels_b), seed + 1, fill, int_bound)
    c = permuted_tensor(spec.tensor_extents(spec.labels_c), seed + 2, fill, int_bound)
    return a, b, c


def int_tensor(extents, seed, bound=1024):
    t = make_dense_tensor(extents, "zeros")
    t.data[:] = np.random.default_rng(seed).integers(-bound, bound + 1, t.data.size)
    return t


def view_to_dense(v):
    """Elementwise materialization of a view through get() (PAD reads 0)."""
    out = np.zeros((v.m, v.n))
    for i in range(v.m):
        for j in range(v.n):
            out[i, j] = v.get(i, j)
    return out


def multi_indices(extents):
    """All multi-indices, first axis fastest."""
    idx = [()]
    for e in extents:
        idx = [t + (i,) for i in range(e) for t in idx]
    return idx


def tensor_to_dict(t):
    """offset -> value for every multi-index, via plain nested loops."""
    return {t.offset_of(ix): element_at(t, ix) for ix in multi_indices(t.extents)}
