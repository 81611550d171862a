#!/usr/bin/env python3
"""Run the three Strassen variants (ABC, AB, Naive) on a 4-index contraction
and compare accuracy, instrumentation counters, and effective rates."""

from strassen_tc import (
    Variant,
    contract,
    contract_reference,
    make_dense_tensor,
    parse_benchmark_line,
    relative_error,
)

LINE = "abcd aebf dfce & a:8;b:8;c:8;d:8;e:8;f:8;"

spec = parse_benchmark_line(LINE)
print(f"contraction {spec.index_string()}  "
      f"(N_I={spec.n_i}, N_J={spec.n_j}, N_P={spec.n_p})")

a = make_dense_tensor(spec.tensor_extents(spec.labels_a), "random", 1)
b = make_dense_tensor(spec.tensor_extents(spec.labels_b), "random", 2)
c0 = make_dense_tensor(spec.tensor_extents(spec.labels_c), "random", 3)

c_ref = c0.copy()
contract_reference(spec, a, b, c_ref)

hdr = f"{'variant':>8} {'level':>5} {'leaves':>6} {'accuracy':>10} " \
      f"{'pack fast/slow':>15} {'update fast/slow':>17} {'eff GFLOPS':>11}"
print("\n" + hdr)
print("-" * len(hdr))
for level in (0, 1, 2):
    for variant in Variant:
        c = c0.copy()
        st = contract(spec, a, b, c, level, variant)
        err = relative_error(c, c_ref)
        print(f"{variant.value:>8} {level:>5} {st.leaf_multiplies:>6} {err:>10.2e} "
              f"{st.fast_blocks:>8}/{st.slow_blocks:<6} {st.fast_updates:>9}/{st.slow_updates:<7} "
              f"{st.effective_gflops:>11.3f}")

print("""
Every level multiplies 7^L leaf products instead of 8^L; the variants differ
only in how much they materialize:
  ABC   fuses operand sums into packing and C updates into the micro-kernel,
  AB    stores each intermediate product M densely, then scatters it into C,
  Naive also copies the operand sums out as regular dense matrices first.
""")
