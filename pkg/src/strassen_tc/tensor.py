"""Dense strided tensors, contraction specs, and the benchmark-line format.

A contraction ``C += A * B`` over index labels partitions every label into
three bundles: I (shared by C and A), J (shared by C and B) and P (shared by
A and B, summed over).  Specs are built either programmatically or by parsing
benchmark lines of the form ``abc dca db & a:4;b:8;c:2;d:8;``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BenchmarkParseError",
    "ContractionSpec",
    "DenseTensor",
    "column_major_strides",
    "element_at",
    "make_dense_tensor",
    "parse_benchmark_line",
    "read_benchmark_file",
    "set_element",
    "to_benchmark_line",
]


class BenchmarkParseError(ValueError):
    """A benchmark line does not conform to the contraction-line grammar."""


def column_major_strides(extents) -> tuple[int, ...]:
    """Strides with the first index fastest: stride_0 = 1, stride_d = stride_{d-1} * extent_{d-1}."""
    strides = []
    step = 1
    for e in extents:
        strides.append(step)
        step *= e
    return tuple(strides)


@dataclass
class DenseTensor:
    """Flat float64 storage plus per-axis extents/strides (element units).

    Strides are arbitrary as long as every multi-index maps to a distinct
    in-bounds offset ``base_offset + sum(idx_d * stride_d)``.
    """

    extents: tuple[int, ...]
    strides: tuple[int, ...]
    data: np.ndarray
    base_offset: int = 0

    def __post_init__(self):
        self.extents = tuple(int(e) for e in self.extents)
        self.strides = tuple(int(s) for s in self.strides)
        if len(self.extents) != len(self.strides):
            raise ValueError("extents and strides must have the same length")
        if any(e < 1 for e in self.extents):
            raise ValueError(f"extents must be positive, got {self.extents}")
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        if self.data.ndim != 1:
            raise ValueError("data must be a flat array")
        lo = hi = self.base_offset
        for e, s in zip(self.extents, self.strides):
            if s >= 0:
                hi += (e - 1) * s
            else:
                lo += (e - 1) * s
        if lo < 0 or hi >= self.data.size:
            raise ValueError("some multi-index maps out of bounds")

    @property
    def ndim(self) -> int:
        return len(self.extents)

    @property
    def size(self) -> int:
        n = 1
        for e in self.extents:
            n *= e
        return n

    def offset_of(self, multi_index) -> int:
        if len(multi_index) != self.ndim:
            raise IndexError(f"expected {self.ndim} indices, got {len(multi_index)}")
        off = self.base_offset
        for i, (e, s) in zip(multi_index, zip(self.extents, self.strides)):
            if not 0 <= i < e:
                raise IndexError(f"index {multi_index} out of range for extents {self.extents}")
            off += i * s
        return off

    def copy(self) -> "DenseTensor":
        return DenseTensor(self.extents, self.strides, self.data.copy(), self.base_offset)


def element_at(t: DenseTensor, multi_index) -> float:
    """Read ``t.data[base_offset + sum(idx_d * stride_d)]``."""
    return float(t.data[t.offset_of(multi_index)])


def set_element(t: DenseTensor, multi_index, value: float) -> None:
    t.data[t.offset_of(multi_index)] = value


def make_dense_tensor(extents, fill: str = "zeros", seed: int | None = None) -> DenseTensor:
    """Allocate a column-major tensor filled with zeros, a 0..N-1 sequence, or seeded uniforms.

    ``fill="random"`` draws from Uniform(-1, 1); the same seed always yields
    the same data.
    """
    extents = tuple(int(e) for e in extents)
    if any(e < 1 for e in extents):
        raise ValueError(f"extents must be positive, got {extents}")
    n = 1
    for e in extents:
        n *= e
    if fill == "zeros":
        data = np.zeros(n)
    elif fill == "sequence":
        data = np.arange(n, dtype=np.float64)
    elif fill == "random":
        data = np.random.default_rng(seed).uniform(-1.0, 1.0, size=n)
    else:
        raise ValueError(f"unknown fill {fill!r}")
    return DenseTensor(extents, column_major_strides(extents), data)


@dataclass(frozen=True)
class ContractionSpec:
    """Index labels of C, A, B with per-label extents and derived bundles.

    Bundles: I = C∩A in C's order, J = C∩B in C's order, P = A∩B in A's
    order.  Every label must occur in exactly two of the three tensors.
    """

    labels_c: str
    labels_a: str
    labels_b: str
    extents: dict[str, int]
    bundle_i: str = field(init=False)
    bundle_j: str = field(init=False)
    bundle_p: str = field(init=False)

    def __post_init__(self):
        for name, labels in (("C", self.labels_c), ("A", self.labels_a), ("B", self.labels_b)):
            if len(set(labels)) != len(labels):
                raise BenchmarkParseError(f"repeated label within tensor {name}: {labels!r}")
        sc, sa, sb = set(self.labels_c), set(self.labels_a), set(self.labels_b)
        for lab in sorted(sc | sa | sb):
            count = (lab in sc) + (lab in sa) + (lab in sb)
            if count != 2:
                where = "one tensor only" if count == 1 else "all three tensors"
                raise BenchmarkParseError(f"label {lab!r} appears in {where}")
        for lab in sorted(sc | sa | sb):
            if lab not in self.extents:
                raise BenchmarkParseError(f"missing extent for label {lab!r}")
        for lab in self.extents:
            if lab not in sc | sa | sb:
                raise BenchmarkParseError(f"extent given for unknown label {lab!r}")
            if self.extents[lab] < 1:
                raise BenchmarkParseError(f"non-positive extent for label {lab!r}")
        object.__setattr__(self, "extents", dict(self.extents))
        object.__setattr__(self, "bundle_i", "".join(l for l in self.labels_c if l in sa))
        object.__setattr__(self, "bundle_j", "".join(l for l in self.labels_c if l in sb))
        object.__setattr__(self, "bundle_p", "".join(l for l in self.labels_a if l in sb))

    def bundle_size(self, bundle: str) -> int:
        n = 1
        for lab in bundle:
            n *= self.extents[lab]
        return n

    @property
    def n_i(self) -> int:
        return self.bundle_size(self.bundle_i)

    @property
    def n_j(self) -> int:
        return self.bundle_size(self.bundle_j)

    @property
    def n_p(self) -> int:
        return self.bundle_size(self.bundle_p)

    def tensor_extents(self, labels: str) -> tuple[int, ...]:
        return tuple(self.extents[l] for l in labels)

    def index_string(self) -> str:
        return f"{self.labels_c}-{self.labels_a}-{self.labels_b}"


def parse_benchmark_line(line: str) -> ContractionSpec:
    """Parse ``"<C> <A> <B> & l:extent;..."`` into a validated ContractionSpec.

    Labels are single ASCII letters; the trailing semicolon is optional.
    """
    if line.count("&") != 1:
        raise BenchmarkParseError(f"malformed line (expected one '&' separator): {line!r}")
    left, right = line.split("&")
    groups = left.split()
    if len(groups) != 3:
        raise BenchmarkParseError(f"expected three label groups before '&', got {len(groups)}: {line!r}")
    for g in groups:
        for ch in g:
            if not (ch.isascii() and ch.isalpha()):
                raise BenchmarkParseError(f"labels must be single ASCII letters, got {ch!r}")
    extents: dict[str, int] = {}
    for item in right.split(";"):
        item = item.strip()
        if not item:
            continue
        lab, sep, ext = item.partition(":")
        lab = lab.strip()
        if not sep or len(lab) != 1:
            raise BenchmarkParseError(f"malformed extent entry {item!r}")
        if lab in extents:
            raise BenchmarkParseError(f"duplicate extent for label {lab!r}")
        try:
            extents[lab] = int(ext)
        except ValueError:
            raise BenchmarkParseError(f"malformed extent entry {item!r}") from None
        if extents[lab] < 1:
            raise BenchmarkParseError(f"non-positive extent for label {lab!r}")
    return ContractionSpec(groups[0], groups[1], groups[2], extents)


def to_benchmark_line(spec: ContractionSpec) -> str:
    """Serialize a spec back to benchmark-line form (labels in first-appearance order)."""
    seen: list[str] = []
    for lab in spec.labels_c + spec.labels_a + spec.labels_b:
        if lab not in seen:
            seen.append(lab)
    ext = "".join(f"{lab}:{spec.extents[lab]};" for lab in seen)
    return f"{spec.labels_c} {spec.labels_a} {spec.labels_b} & {ext}"


def read_benchmark_file(path) -> list[ContractionSpec]:
    """One contraction per line; '#' comment lines and blank lines are skipped.

    Parse failures are re-raised with the offending line number and content.
    """
    specs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                specs.append(parse_benchmark_line(line))
            except BenchmarkParseError as exc:
                raise BenchmarkParseError(f"{path}:{lineno}: {exc} (line: {line!r})") from None
    return specs
