"""Strassen's algorithm for general tensor contraction.

Tensors are matricized through block scatter matrix views, so the seven-term
Strassen recursion can be fused straight into the packing and micro-kernel
stages of a cache-blocked GEMM, with no transposition of the input tensors.
"""

from .driver import FusedPrimitive, run_fused, run_gemm_dense
from .kernels import (
    DEFAULT_BLOCKING,
    BlockingParams,
    OperandTermSide,
    PackedBuffer,
    accumulate_dense_to_view,
    microkernel,
    pack_a,
    pack_b,
    unpack_to_dense,
)
from .oracle import RunStats, contract_reference, effective_gflops, relative_error
from .scatter import PAD, BlockScatterView, make_view, matrix_view, pad_view, split_view
from .strassen import MAX_LEVEL, StrassenTerm, Variant, contract, quadrant_views, strassen_terms
from .tensor import (
    BenchmarkParseError,
    ContractionSpec,
    DenseTensor,
    column_major_strides,
    element_at,
    make_dense_tensor,
    parse_benchmark_line,
    read_benchmark_file,
    set_element,
    to_benchmark_line,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkParseError",
    "BlockScatterView",
    "BlockingParams",
    "ContractionSpec",
    "DEFAULT_BLOCKING",
    "DenseTensor",
    "FusedPrimitive",
    "MAX_LEVEL",
    "OperandTermSide",
    "PAD",
    "PackedBuffer",
    "RunStats",
    "StrassenTerm",
    "Variant",
    "accumulate_dense_to_view",
    "column_major_strides",
    "contract",
    "contract_reference",
    "effective_gflops",
    "element_at",
    "make_dense_tensor",
    "make_view",
    "matrix_view",
    "microkernel",
    "pack_a",
    "pack_b",
    "pad_view",
    "parse_benchmark_line",
    "quadrant_views",
    "read_benchmark_file",
    "relative_error",
    "run_fused",
    "run_gemm_dense",
    "set_element",
    "split_view",
    "strassen_terms",
    "to_benchmark_line",
    "unpack_to_dense",
]
