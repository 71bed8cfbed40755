"""Finite-alphabet probability primitives.

Probability vectors, row-stochastic kernels, dense joints, entropies and
mutual informations (base-2 throughout), plus the relative-slack typical-set
membership test used by the simulators.  All containers are immutable after
construction and all operations are pure, so everything here is safe to share
across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence as SeqT

import numpy as np

# Constructors renormalize inputs whose sum deviates by <= RENORM_TOL and
# reject beyond that; post-construction sums are exact to SUM_TOL.
SUM_TOL = 1e-12
RENORM_TOL = 1e-9
# Negative mutual-information round-off is clamped up to this magnitude and
# treated as a logic error beyond it.
NEG_MI_TOL = 1e-9


class InvalidDistributionError(ValueError):
    """Raised when a probability vector or kernel fails validation."""


def _as_prob_vector(probs: Iterable[float]) -> np.ndarray:
    v = np.asarray(probs, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidDistributionError("probability vector must be 1-D and nonempty")
    if np.any(v < 0):
        raise InvalidDistributionError("probabilities must be nonnegative")
    total = v.sum()
    if abs(total - 1.0) > RENORM_TOL:
        raise InvalidDistributionError(f"probabilities sum to {total}, not 1")
    v = v / total
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over the index alphabet 0..k-1."""

    probs: np.ndarray

    def __init__(self, probs: Iterable[float]):
        object.__setattr__(self, "probs", _as_prob_vector(probs))

    @property
    def alphabet_size(self) -> int:
        return self.probs.size

    @staticmethod
    def uniform(k: int) -> "Pmf":
        return Pmf(np.full(k, 1.0 / k))

    @staticmethod
    def point_mass(k: int, index: int) -> "Pmf":
        v = np.zeros(k)
        v[index] = 1.0
        return Pmf(v)


@dataclass(frozen=True)
class ConditionalPmf:
    """Row-stochastic kernel: rows[i] is the output pmf given input symbol i.

    For kernels conditioned on several variables the row index is the
    C-order flattening of the conditioning tuple.
    """

    rows: np.ndarray

    def __init__(self, rows):
        m = np.asarray(rows, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise InvalidDistributionError("kernel must be a 2-D matrix")
        if np.any(m < 0):
            raise InvalidDistributionError("kernel entries must be nonnegative")
        sums = m.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > RENORM_TOL):
            raise InvalidDistributionError("kernel rows must sum to 1")
        m = m / sums[:, None]
        m.flags.writeable = False
        object.__setattr__(self, "rows", m)

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    @staticmethod
    def identity(k: int) -> "ConditionalPmf":
        return ConditionalPmf(np.eye(k))

    @staticmethod
    def bsc(p: float) -> "ConditionalPmf":
        return ConditionalPmf([[1 - p, p], [p, 1 - p]])

    @staticmethod
    def deterministic(table, output_size: int) -> "ConditionalPmf":
        """0/1 kernel realizing a deterministic map input -> output.

        `table` may be any integer array; it is flattened in C order to match
        the row-index convention for multi-variable conditioning.
        """
        t = np.asarray(table, dtype=int).ravel()
        if np.any(t < 0) or np.any(t >= output_size):
            raise InvalidDistributionError("map values outside output alphabet")
        m = np.zeros((t.size, output_size))
        m[np.arange(t.size), t] = 1.0
        return ConditionalPmf(m)


@dataclass(frozen=True)
class JointPmf:
    """Dense joint pmf over a tuple of finite alphabets."""

    probs: np.ndarray

    def __init__(self, probs):
        a = np.asarray(probs, dtype=float)
        if a.size == 0:
            raise InvalidDistributionError("joint pmf must be nonempty")
        if np.any(a < 0):
            raise InvalidDistributionError("probabilities must be nonnegative")
        total = a.sum()
        if abs(total - 1.0) > RENORM_TOL:
            raise InvalidDistributionError(f"joint sums to {total}, not 1")
        a = a / total
        a.flags.writeable = False
        object.__setattr__(self, "probs", a)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def num_axes(self) -> int:
        return self.probs.ndim

    @staticmethod
    def from_pmf(p: Pmf) -> "JointPmf":
        return JointPmf(p.probs)

    @staticmethod
    def product(*parts: "Pmf | JointPmf") -> "JointPmf":
        """Independent product, concatenating axes in argument order."""
        arrs = [p.probs for p in parts]
        out = arrs[0]
        for a in arrs[1:]:
            out = np.multiply.outer(out, a)
        return JointPmf(out)

    def marginal(self, axes: SeqT[int]) -> "JointPmf":
        """Marginal over `axes`, keeping them in the listed order."""
        axes = list(axes)
        keep = set(axes)
        summed = tuple(i for i in range(self.num_axes) if i not in keep)
        m = self.probs.sum(axis=summed)
        # sum() keeps remaining axes in ascending order; permute to request.
        remaining = [i for i in range(self.num_axes) if i not in set(summed)]
        perm = [remaining.index(a) for a in axes]
        return JointPmf(np.transpose(m, perm))

    def marginal_pmf(self, axis: int) -> Pmf:
        return Pmf(self.marginal([axis]).probs)

    def split_axis(self, axis: int, sizes: SeqT[int]) -> "JointPmf":
        """Reinterpret one axis as a C-order flattened tuple of sub-axes."""
        shape = list(self.dims)
        if int(np.prod(sizes)) != shape[axis]:
            raise ValueError("sizes do not factor the axis")
        new_shape = shape[:axis] + list(sizes) + shape[axis + 1:]
        return JointPmf(self.probs.reshape(new_shape))


@dataclass(frozen=True)
class DistortionMeasure:
    """Per-symbol distortion table d[source_symbol, reconstruction_symbol]."""

    table: np.ndarray

    def __init__(self, table):
        t = np.asarray(table, dtype=float)
        if t.ndim != 2 or np.any(t < 0):
            raise InvalidDistributionError("distortion table must be 2-D and nonnegative")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    @staticmethod
    def hamming(k: int) -> "DistortionMeasure":
        return DistortionMeasure(1.0 - np.eye(k))


def _xlogx_sum(p: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask])))


def entropy(p: "Pmf | JointPmf | np.ndarray") -> float:
    """Shannon entropy in bits, with 0 log 0 := 0."""
    a = p.probs if isinstance(p, (Pmf, JointPmf)) else np.asarray(p, dtype=float)
    return -_xlogx_sum(a)


def mutual_information(joint: JointPmf, axes_a: SeqT[int], axes_b: SeqT[int]) -> float:
    """I(A;B) in bits from a joint pmf; tiny negatives are clamped to 0."""
    sa, sb = set(axes_a), set(axes_b)
    if sa & sb:
        raise ValueError("axis sets overlap")
    h_a = entropy(joint.marginal(sorted(sa)))
    h_b = entropy(joint.marginal(sorted(sb)))
    h_ab = entropy(joint.marginal(sorted(sa | sb)))
    return _clamp_mi(h_a + h_b - h_ab)


def conditional_mutual_information(
    joint: JointPmf, axes_a: SeqT[int], axes_b: SeqT[int], axes_c: SeqT[int]
) -> float:
    """I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), in bits."""
    sa, sb, sc = set(axes_a), set(axes_b), set(axes_c)
    if sa & sb or sa & sc or sb & sc:
        raise ValueError("axis sets overlap")
    if not sc:
        return mutual_information(joint, axes_a, axes_b)
    h_ac = entropy(joint.marginal(sorted(sa | sc)))
    h_bc = entropy(joint.marginal(sorted(sb | sc)))
    h_abc = entropy(joint.marginal(sorted(sa | sb | sc)))
    h_c = entropy(joint.marginal(sorted(sc)))
    return _clamp_mi(h_ac + h_bc - h_abc - h_c)


def _clamp_mi(value: float) -> float:
    if value < -NEG_MI_TOL:
        raise ValueError(f"mutual information {value} below round-off tolerance")
    return max(value, 0.0)


def compose_joint(
    source: "Pmf | JointPmf",
    kernels: SeqT[tuple[ConditionalPmf, SeqT[int]]],
) -> JointPmf:
    """Extend a source joint by a chain of conditional kernels.

    Each (kernel, cond_axes) pair appends one new axis whose distribution is
    given by the kernel rows, indexed by the C-order flattening of the listed
    conditioning axes (which may include previously appended axes).
    Deterministic maps are passed as 0/1 kernels.
    """
    probs = source.probs if isinstance(source, JointPmf) else np.asarray(source.probs)
    for kernel, cond_axes in kernels:
        cond_axes = list(cond_axes)
        ndim = probs.ndim
        if any(a < 0 or a >= ndim for a in cond_axes):
            raise ValueError("conditioning axis out of range")
        cond_sizes = [probs.shape[a] for a in cond_axes]
        if int(np.prod(cond_sizes)) != kernel.input_size:
            raise ValueError("kernel rows do not match conditioning alphabet")
        k = kernel.rows.reshape(cond_sizes + [kernel.output_size])
        # Reorder kernel axes to ascending conditioning-axis position, then
        # insert singleton dims so it broadcasts against the joint.
        src_order = sorted(range(len(cond_axes)), key=lambda i: cond_axes[i])
        k = np.transpose(k, src_order + [len(cond_axes)])
        idx_shape = [probs.shape[a] if a in cond_axes else 1 for a in range(ndim)]
        idx_shape.append(kernel.output_size)
        probs = probs[..., None] * k.reshape(idx_shape)
    return JointPmf(probs)


def is_typical(
    seq: "np.ndarray | SeqT[int] | tuple",
    ref: "Pmf | JointPmf",
    epsilon: float,
) -> bool:
    """Relative-slack typicality: |count(x)/n - p(x)| <= eps * p(x) for all x.

    `seq` is a single index sequence when `ref` is a Pmf, or a tuple of
    equal-length sequences (one per axis) when `ref` is a JointPmf.  Symbols
    of reference probability zero force the corresponding count to be zero.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if isinstance(ref, Pmf):
        seqs = [np.asarray(seq, dtype=int)]
        dims = (ref.alphabet_size,)
        p = ref.probs
    else:
        seqs = [np.asarray(s, dtype=int) for s in seq]
        if len(seqs) != ref.num_axes:
            raise ValueError("tuple arity does not match joint axes")
        dims = ref.dims
        p = ref.probs
    n = seqs[0].size
    if any(s.size != n for s in seqs):
        raise ValueError("sequence length mismatch")
    flat = np.ravel_multi_index(tuple(seqs), dims)
    counts = np.bincount(flat, minlength=int(np.prod(dims))).reshape(dims)
    return bool(np.all(np.abs(counts / n - p) <= epsilon * p))


def empirical_distortion(s, shat, d: DistortionMeasure) -> float:
    """(1/n) sum of per-symbol distortions."""
    s = np.asarray(s, dtype=int)
    shat = np.asarray(shat, dtype=int)
    if s.size != shat.size:
        raise ValueError("sequence length mismatch")
    return float(d.table[s, shat].mean())
