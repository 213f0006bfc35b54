"""Dense probability tensors over named finite variables, and the information
measures evaluated on them.

A tensor stores one axis per variable, in a fixed order, as a C-contiguous
float64 array (``vars[0]`` is the slowest index).  All measures are in bits.
Reductions use ``np.sum`` over fixed axes, which accumulates pairwise over
ascending flat index, so every result is bit-reproducible across runs.

Zero handling follows the usual continuity conventions: ``0 * log 0 = 0`` and
cells with ``p(b) = 0`` contribute nothing to ``H(A|B)``.  Conditional
entropies are computed as sums of the termwise-nonnegative quantity
``p(a,b) * log2(p(b)/p(a,b))``, so they can never come out negative, even in
floating point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import NormalizationError, ShapeError, VariableError

# Normalization tolerance for tensors fed to the measure functions.  Joints
# assembled from stochastic factors land many orders of magnitude inside it.
NORM_ATOL = 1e-9


class Role(enum.Enum):
    """What a variable stands for in a relay network."""

    SOURCE_INPUT = "x"
    DEST_OUTPUT = "y"
    RELAY_INPUT = "x_i"
    RELAY_OUTPUT = "y_i"
    COMPRESSED = "yhat_i"

    @property
    def indexed(self) -> bool:
        """Whether variables of this role carry a relay index."""
        return self in (Role.RELAY_INPUT, Role.RELAY_OUTPUT, Role.COMPRESSED)


@dataclass(frozen=True)
class VarId:
    """Identity of one finite-alphabet variable: name, role, relay index
    (relays are numbered from 1; ``None`` for source/destination variables),
    and alphabet size."""

    name: str
    role: Role
    cardinality: int
    index: int | None = None

    def __post_init__(self) -> None:
        if self.cardinality < 1:
            raise VariableError(f"{self.name}: cardinality must be >= 1, got {self.cardinality}")
        if self.role.indexed and (self.index is None or self.index < 1):
            raise VariableError(f"{self.name}: role {self.role.value} needs a relay index >= 1")
        if not self.role.indexed and self.index is not None:
            raise VariableError(f"{self.name}: role {self.role.value} must not carry a relay index")

    def __repr__(self) -> str:
        return f"VarId({self.name}, |{self.name}|={self.cardinality})"


@dataclass(frozen=True, eq=False)
class ProbTensor:
    """Dense nonnegative tensor over an ordered tuple of variables.

    ``values`` has shape equal to the variable cardinalities in order.  The
    same type carries full distributions (summing to 1) and unnormalized
    masses; functions that need a distribution check normalization themselves.
    """

    vars: tuple[VarId, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        variables = tuple(self.vars)
        object.__setattr__(self, "vars", variables)
        seen: set[tuple[Role, int | None]] = set()
        for v in variables:
            key = (v.role, v.index)
            if key in seen:
                raise VariableError(f"duplicate variable for role {v.role.value} index {v.index}")
            seen.add(key)
        values = np.asarray(self.values, dtype=np.float64)
        expect = tuple(v.cardinality for v in variables)
        if values.shape != expect:
            if values.size == int(np.prod(expect, dtype=np.int64)):
                values = values.reshape(expect)
            else:
                raise ShapeError(f"values shape {values.shape} does not match cardinalities {expect}")
        if values.size and float(values.min()) < 0.0:
            raise ValueError(f"negative probability entry: min = {values.min()}")
        values = np.ascontiguousarray(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def total(self) -> float:
        return float(np.sum(self.values))

    def var_axis(self, v: VarId) -> int:
        try:
            return self.vars.index(v)
        except ValueError:
            raise VariableError(f"variable {v.name} not in tensor over {[u.name for u in self.vars]}") from None


def require_distribution(t: ProbTensor, atol: float = NORM_ATOL) -> None:
    """Raise unless ``t`` sums to 1 within ``atol``."""
    total = t.total
    if abs(total - 1.0) > atol:
        raise NormalizationError(f"tensor mass {total!r} is not 1 within {atol}")


def _subset(t: ProbTensor, group: Iterable[VarId], label: str) -> tuple[VarId, ...]:
    members = tuple(group)
    for v in members:
        t.var_axis(v)  # raises on unknown variables
    if len(set(members)) != len(members):
        raise VariableError(f"duplicate variable inside argument {label}")
    # preserve tensor order so axis bookkeeping stays canonical
    chosen = set(members)
    return tuple(v for v in t.vars if v in chosen)


def _check_disjoint(*groups: tuple[str, tuple[VarId, ...]]) -> None:
    for i, (name_a, a) in enumerate(groups):
        for name_b, b in groups[i + 1 :]:
            both = set(a) & set(b)
            if both:
                names = ", ".join(v.name for v in both)
                raise VariableError(f"arguments {name_a} and {name_b} overlap on: {names}")


def tensor_product(a: ProbTensor, b: ProbTensor) -> ProbTensor:
    """Outer product of two tensors over disjoint variable sets.

    The result ranges over ``a.vars + b.vars`` and its mass is the product of
    the input masses.
    """
    shared = set(a.vars) & set(b.vars)
    if shared:
        names = ", ".join(v.name for v in shared)
        raise VariableError(f"tensor_product inputs share variables: {names}")
    values = np.multiply.outer(a.values, b.values)
    return ProbTensor(a.vars + b.vars, values)


def marginalize(t: ProbTensor, keep: Iterable[VarId]) -> ProbTensor:
    """Sum out every variable not in ``keep``; kept axes stay in tensor order."""
    kept = _subset(t, keep, "keep")
    drop_axes = tuple(i for i, v in enumerate(t.vars) if v not in set(kept))
    if not drop_axes:
        return t
    values = np.sum(t.values, axis=drop_axes)
    return ProbTensor(kept, values)


def _neg_sum_xlog2x_ratio(joint: np.ndarray, cond: np.ndarray) -> float:
    # sum of p * log2(q / p) over cells with p > 0, where q >= p cellwise;
    # every term is >= 0, so the total cannot round below zero.
    pos = joint > 0.0
    safe = np.where(pos, joint, 1.0)
    ratio = np.broadcast_to(cond, joint.shape) / safe
    logs = np.where(pos, np.log2(np.where(pos, ratio, 1.0)), 0.0)
    return float(np.sum(joint * logs))


def conditional_entropy(t: ProbTensor, a: Iterable[VarId], b: Iterable[VarId] = ()) -> float:
    """H(A|B) in bits: ``-sum p(a,b) log2 p(a|b)``, with 0 log 0 := 0.

    ``a`` and ``b`` must be disjoint subsets of ``t.vars`` and ``t`` must be
    normalized.  An empty ``a`` gives 0; an empty ``b`` gives the plain
    entropy H(A).
    """
    av = _subset(t, a, "a")
    bv = _subset(t, b, "b")
    _check_disjoint(("a", av), ("b", bv))
    require_distribution(t)
    if not av:
        return 0.0
    joint = marginalize(t, av + bv)
    a_axes = tuple(i for i, v in enumerate(joint.vars) if v in set(av))
    cond = np.sum(joint.values, axis=a_axes, keepdims=True)
    return _neg_sum_xlog2x_ratio(joint.values, cond)


def conditional_mutual_information(
    t: ProbTensor,
    a: Iterable[VarId],
    b: Iterable[VarId],
    c: Iterable[VarId] = (),
) -> float:
    """I(A;B|C) in bits, computed as H(A|C) - H(A|B,C) and clamped at zero.

    The two entropies are each exact sums of nonnegative terms, so the raw
    difference cannot fall below roughly -1e-14 of rounding noise; the clamp
    only ever removes that noise.
    """
    av = _subset(t, a, "a")
    bv = _subset(t, b, "b")
    cv = _subset(t, c, "c")
    _check_disjoint(("a", av), ("b", bv), ("c", cv))
    if not av or not bv:
        require_distribution(t)
        return 0.0
    h_a_c = conditional_entropy(t, av, cv)
    h_a_bc = conditional_entropy(t, av, bv + cv)
    return max(0.0, h_a_c - h_a_bc)
