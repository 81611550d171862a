#!/usr/bin/env python3
"""Walk through block scatter matrix views: how a strided tensor becomes a
matrix, what the block scatter vectors summarize, and how packing decides
between the strided fast path and per-element gathers."""

from strassen_tc import (
    BlockingParams,
    OperandTermSide,
    PackedBuffer,
    RunStats,
    make_dense_tensor,
    make_view,
    pack_a,
    quadrant_views,
    split_view,
)


def banner(title):
    print("\n" + "=" * 72)
    print(title)
    print("=" * 72)


banner("A 3-index tensor A[d,c,a], column-major extents d:8, c:2, a:4")
t = make_dense_tensor((8, 2, 4), "sequence")
print("strides (elements):", t.strides)

banner("Matricized as an 8x8 matrix: rows = (a,c) bundle, columns = (d)")
axes = {"d": 0, "c": 1, "a": 2}
v = make_view(t, "ac", "d", axes, rb=8, cb=4)
print("row scatter vector:   ", v.rscat.tolist())
print("row block scatter:    ", v.rbs.tolist(), "(0: the 8-row block has no constant stride)")
print("column scatter vector:", v.cscat.tolist())
print("column block scatter: ", v.cbs.tolist(), "(unit stride in both 4-column blocks)")

banner("Splitting re-aligns the per-block summaries")
top = split_view(v, (0, 4), (0, 8))
print("rows [0,4) scatter:", top.rscat.tolist(), "-> block scatter", top.rbs.tolist())
print("a 4-row block of the same rows IS regularly strided (stride 16)")

banner("Strassen quadrants of the view (level 1)")
for q, quad in quadrant_views(v, 1).items():
    print(f"quadrant {q}: rows {quad.rscat.tolist()} rbs {quad.rbs.tolist()} cbs {quad.cbs.tolist()}")

banner("Packing A0 + A3 into mr-row slivers")
params = BlockingParams(mc=8, nc=8, kc=8, mr=4, nr=4, kr=4)
quads = quadrant_views(make_view(t, "ac", "d", axes, rb=4, cb=4), 1)
side = OperandTermSide([quads[0], quads[3]], [1, 1])
buf = PackedBuffer.a_panel(params, 4, 4)
stats = RunStats()
pack_a(side, (0, 4), (0, 4), params, buf, stats)
print("packed sliver (p-major, 4 rows wide):")
print(buf.data[0, :4, :])
print(f"fast blocks: {stats.fast_blocks}, slow blocks: {stats.slow_blocks}")
print("both quadrants have nonzero block scatter entries here, so the packer")
print("used two plain strides per operand instead of reading the scatter vectors")
