"""Benchmark harness: synthetic sweeps, benchmark files, and the run report.

Each problem prints one tab-separated record: problem size, best running time
in seconds over -niter runs, total GFLOPS (executed flops / time), effective
GFLOPS (classical 2*N_I*N_J*N_P flops / time), and accuracy relative to the
reference contraction.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

from .kernels import DEFAULT_BLOCKING, BlockingParams
from .oracle import contract_reference, relative_error
from .strassen import Variant, contract
from .tensor import (
    BenchmarkParseError,
    ContractionSpec,
    DenseTensor,
    make_dense_tensor,
    read_benchmark_file,
)

__all__ = ["main", "synthesize_spec"]

_IMPL_VARIANTS = {1: Variant.ABC, 2: Variant.AB, 3: Variant.NAIVE}
_VERIFY_DEFAULT_LIMIT = 512
_FIELDS = ("size", "seconds", "total_gflops", "effective_gflops", "accuracy")


def _split_factor(size: int) -> tuple[int, int]:
    root = math.isqrt(size)
    if root * root < size:
        root += 1
    if size % root == 0:
        return root, size // root
    return size, 1


def synthesize_spec(m: int, n: int, k: int, mode: str = "matrix") -> ContractionSpec:
    """Spec with bundle sizes (m, n, k): plain matrix labels, or two labels per
    bundle ("split" mode) to exercise nontrivial scatter vectors."""
    if mode == "matrix":
        return ContractionSpec("ab", "ac", "cb", {"a": m, "b": n, "c": k})
    if mode == "split":
        ea, eb = _split_factor(m)
        ec, ed = _split_factor(n)
        ee, ef = _split_factor(k)
        return ContractionSpec("abcd", "aebf", "dfce",
                               {"a": ea, "b": eb, "c": ec, "d": ed, "e": ee, "f": ef})
    raise ValueError(f"unknown mode {mode!r}")


def make_operands(spec: ContractionSpec, seed: int) -> tuple[DenseTensor, DenseTensor, DenseTensor]:
    a = make_dense_tensor(spec.tensor_extents(spec.labels_a), "random", seed)
    b = make_dense_tensor(spec.tensor_extents(spec.labels_b), "random", seed + 1)
    c = make_dense_tensor(spec.tensor_extents(spec.labels_c), "random", seed + 2)
    return a, b, c


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="strassen-tc",
        allow_abbrev=False,
        description="Benchmark Strassen tensor contraction variants against the plain "
                    "block scatter GEMM driver.",
    )
    p.add_argument("-m", type=int, help="I-bundle size for a synthetic problem")
    p.add_argument("-n", type=int, help="J-bundle size for a synthetic problem")
    p.add_argument("-k", type=int, help="P-bundle size for a synthetic problem")
    p.add_argument("-file", help="benchmark file, one contraction line per problem")
    p.add_argument("-niter", type=int, default=1, help="iterations per problem; best time is reported")
    p.add_argument("-level", type=int, default=1, choices=(0, 1, 2), help="Strassen recursion levels")
    p.add_argument("-impl", type=int, default=1, choices=(0, 1, 2, 3),
                   help="0: plain driver (level 0), 1: ABC, 2: AB, 3: Naive")
    p.add_argument("-threads", type=int, default=1, help="worker threads for the register-tile loop")
    p.add_argument("-seed", type=int, default=0, help="RNG seed for operand data")
    p.add_argument("-verify", action="store_true",
                   help="force the accuracy check (default: only for bundle sizes <= %d)" % _VERIFY_DEFAULT_LIMIT)
    p.add_argument("-split", action="store_true",
                   help="synthesize two labels per bundle instead of the plain matrix case")
    p.add_argument("-blocking", metavar="mC,nC,kC,mR,nR,kR",
                   help="override cache/register blocking (comma-separated)")
    p.add_argument("-csv", metavar="PATH", help="also write records as CSV")
    return p


def _fail(msg: str) -> int:
    print(f"strassen-tc: error: {msg}", file=sys.stderr)
    return 2


def _run_problem(spec: ContractionSpec, level: int, variant: Variant, params: BlockingParams,
                 niter: int, threads: int, seed: int, verify: bool) -> dict:
    a, b, c0 = make_operands(spec, seed)
    best = None
    c = None
    for _ in range(niter):
        c = c0.copy()
        stats = contract(spec, a, b, c, level, variant, params, threads=threads)
        if best is None or stats.seconds < best.seconds:
            best = stats
    if verify or max(spec.n_i, spec.n_j, spec.n_p) <= _VERIFY_DEFAULT_LIMIT:
        c_ref = c0.copy()
        contract_reference(spec, a, b, c_ref)
        best.rel_error = relative_error(c, c_ref)
    return {
        "size": f"{spec.index_string()}={spec.n_i}x{spec.n_j}x{spec.n_p}",
        "seconds": best.seconds,
        "total_gflops": best.total_gflops(),
        "effective_gflops": best.effective_gflops,
        "accuracy": best.rel_error,
    }


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code or 0)

    sizes_given = [v is not None for v in (args.m, args.n, args.k)]
    if args.file is not None and any(sizes_given):
        return _fail("pass either -file or -m/-n/-k, not both")
    if args.file is None and not all(sizes_given):
        return _fail("pass -m, -n and -k together (or -file)")
    if args.file is None and min(args.m, args.n, args.k) < 1:
        return _fail("problem sizes must be >= 1")
    if args.niter < 1:
        return _fail("-niter must be >= 1")
    if args.threads < 1:
        return _fail("-threads must be >= 1")
    if args.impl == 0 and args.level != 0:
        return _fail("-impl 0 is the plain driver and requires -level 0")

    params = DEFAULT_BLOCKING
    if args.blocking is not None:
        try:
            vals = [int(x) for x in args.blocking.split(",")]
            if len(vals) != 6:
                raise ValueError
            params = BlockingParams(*vals)
        except ValueError as exc:
            detail = f": {exc}" if str(exc) else ""
            return _fail(f"-blocking expects mC,nC,kC,mR,nR,kR{detail}")

    variant = _IMPL_VARIANTS.get(args.impl, Variant.ABC)
    level = 0 if args.impl == 0 else args.level

    if args.file is not None:
        try:
            specs = read_benchmark_file(args.file)
        except OSError as exc:
            return _fail(str(exc))
        except BenchmarkParseError as exc:
            print(f"strassen-tc: error: {exc}", file=sys.stderr)
            return 1
    else:
        mode = "split" if args.split else "matrix"
        specs = [synthesize_spec(args.m, args.n, args.k, mode)]

    records = []
    print("# " + "\t".join(_FIELDS))
    for idx, spec in enumerate(specs):
        rec = _run_problem(spec, level, variant, params, args.niter, args.threads,
                           args.seed + 10 * idx, args.verify)
        records.append(rec)
        acc = "-" if rec["accuracy"] is None else f"{rec['accuracy']:.9e}"
        print(f"{rec['size']}\t{rec['seconds']:.9e}\t{rec['total_gflops']:.9e}"
              f"\t{rec['effective_gflops']:.9e}\t{acc}")

    if args.csv is not None:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_FIELDS)
            writer.writeheader()
            writer.writerows(records)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
