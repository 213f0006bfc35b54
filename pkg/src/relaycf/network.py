"""Discrete memoryless relay networks and coding distributions.

A network instance is the channel law p(y, y_1..y_n | x, x_1..x_n) together
with all alphabet sizes.  A coding distribution supplies the free parameters
of a compress-and-forward scheme: the input distributions p(x), p(x_i) and one
test channel q_i(yhat_i | y_i, x_i) per relay.  ``build_joint`` multiplies
them into the full joint over

    (X, X_1..X_n, Y, Y_1..Y_n, Yhat_1..Yhat_n)

which is the single object every rate formula is evaluated on.  Inputs are
independent by construction; there is no way to express correlated inputs.

Relays are numbered 1..n and subsets of relays are n-bit masks with bit i-1
standing for relay i.  Degenerate alphabets (cardinality 1) are legal and are
the intended way to express an absent relay or a disabled compressor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArityError, NormalizationError, ShapeError
from .prob import ProbTensor, Role, VarId, conditional_mutual_information

# Conditional kernels must be row-stochastic within this tolerance.
KERNEL_ATOL = 1e-9
# Assembled joints must carry unit mass within this tolerance.
JOINT_ATOL = 1e-11
# Compression variables may leak at most this much past (Y_i, X_i), in bits.
MARKOV_TOL = 1e-9


def source_var(cardinality: int) -> VarId:
    return VarId("x", Role.SOURCE_INPUT, cardinality)


def dest_var(cardinality: int) -> VarId:
    return VarId("y", Role.DEST_OUTPUT, cardinality)


def relay_input_var(i: int, cardinality: int) -> VarId:
    return VarId(f"x{i}", Role.RELAY_INPUT, cardinality, index=i)


def relay_output_var(i: int, cardinality: int) -> VarId:
    return VarId(f"y{i}", Role.RELAY_OUTPUT, cardinality, index=i)


def compressed_var(i: int, cardinality: int) -> VarId:
    return VarId(f"yhat{i}", Role.COMPRESSED, cardinality, index=i)


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    out.setflags(write=False)
    return out


def _check_kernel(kernel: np.ndarray, n_in_axes: int, what: str, atol: float = KERNEL_ATOL) -> None:
    """Validate a conditional kernel whose first ``n_in_axes`` axes index the
    conditioning inputs; reports the worst slice on failure."""
    if kernel.size and float(kernel.min()) < 0.0:
        raise NormalizationError(f"{what}: negative entry {kernel.min()}")
    out_axes = tuple(range(n_in_axes, kernel.ndim))
    sums = np.sum(kernel, axis=out_axes)
    err = np.abs(sums - 1.0)
    worst = np.unravel_index(int(np.argmax(err)), err.shape) if err.ndim else ()
    if float(err.max() if err.ndim else err) > atol:
        mass = sums[worst] if err.ndim else float(sums)
        raise NormalizationError(
            f"{what}: slice for inputs {tuple(int(k) for k in worst)} sums to {float(mass)!r}, "
            f"expected 1 within {atol}"
        )


@dataclass(frozen=True, eq=False)
class RelayNetworkSpec:
    """A relay network: relay count, alphabet sizes, and channel law.

    ``channel`` has shape (|X|, |X_1|..|X_n|, |Y|, |Y_1|..|Y_n|) with the
    input axes slowest; each input slice is a distribution over the outputs.
    ``card_compressed`` fixes the compression alphabets |Yhat_i|, which are
    part of the problem instance (the user chooses them; nothing bounds them).
    """

    n: int
    card_x: int
    card_y: int
    card_relay_inputs: tuple[int, ...]
    card_relay_outputs: tuple[int, ...]
    card_compressed: tuple[int, ...]
    channel: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ShapeError(f"relay count must be >= 0, got {self.n}")
        object.__setattr__(self, "card_relay_inputs", tuple(int(c) for c in self.card_relay_inputs))
        object.__setattr__(self, "card_relay_outputs", tuple(int(c) for c in self.card_relay_outputs))
        object.__setattr__(self, "card_compressed", tuple(int(c) for c in self.card_compressed))
        for label, cards in (
            ("x_i", self.card_relay_inputs),
            ("y_i", self.card_relay_outputs),
            ("yhat_i", self.card_compressed),
        ):
            if len(cards) != self.n:
                raise ShapeError(f"{label}: expected {self.n} cardinalities, got {len(cards)}")
            if any(c < 1 for c in cards):
                raise ShapeError(f"{label}: cardinalities must be >= 1, got {cards}")
        if self.card_x < 1 or self.card_y < 1:
            raise ShapeError("x and y cardinalities must be >= 1")
        channel = np.asarray(self.channel, dtype=np.float64)
        expect = self.input_shape + self.output_shape
        if channel.shape != expect:
            if channel.size == int(np.prod(expect, dtype=np.int64)):
                channel = channel.reshape(expect)
            else:
                raise ShapeError(f"channel: expected shape {expect} (size {int(np.prod(expect))}), got size {channel.size}")
        _check_kernel(channel, len(self.input_shape), "channel")
        object.__setattr__(self, "channel", _readonly(channel))

    @property
    def input_shape(self) -> tuple[int, ...]:
        return (self.card_x, *self.card_relay_inputs)

    @property
    def output_shape(self) -> tuple[int, ...]:
        return (self.card_y, *self.card_relay_outputs)

    def variables(self) -> tuple[VarId, ...]:
        """Canonical variable order (X, X_1..X_n, Y, Y_1..Y_n, Yhat_1..Yhat_n)."""
        return (
            source_var(self.card_x),
            *(relay_input_var(i + 1, c) for i, c in enumerate(self.card_relay_inputs)),
            dest_var(self.card_y),
            *(relay_output_var(i + 1, c) for i, c in enumerate(self.card_relay_outputs)),
            *(compressed_var(i + 1, c) for i, c in enumerate(self.card_compressed)),
        )


@dataclass(frozen=True, eq=False)
class CodingDistribution:
    """Free parameters of a compress-and-forward scheme.

    ``p_x`` and each ``p_x_i`` are plain distributions; ``q_i[i]`` has shape
    (|X_i|, |Y_i|, |Yhat_i|), row-stochastic over the last axis.
    """

    p_x: np.ndarray
    p_x_i: tuple[np.ndarray, ...]
    q_i: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        p_x = _readonly(np.atleast_1d(self.p_x))
        _check_kernel(p_x, 0, "p_x")
        object.__setattr__(self, "p_x", p_x)
        inputs = []
        for i, p in enumerate(self.p_x_i, start=1):
            arr = _readonly(np.atleast_1d(p))
            _check_kernel(arr, 0, f"p_x_i[{i}]")
            inputs.append(arr)
        object.__setattr__(self, "p_x_i", tuple(inputs))
        tests = []
        for i, q in enumerate(self.q_i, start=1):
            arr = _readonly(q)
            if arr.ndim != 3:
                raise ShapeError(f"q_i[{i}]: expected a (x_i, y_i, yhat_i) kernel, got ndim={arr.ndim}")
            _check_kernel(arr, 2, f"q_i[{i}]")
            tests.append(arr)
        object.__setattr__(self, "q_i", tuple(tests))
        if len(self.p_x_i) != len(self.q_i):
            raise ShapeError(f"{len(self.p_x_i)} relay input distributions but {len(self.q_i)} test channels")

    @property
    def n(self) -> int:
        return len(self.q_i)


def check_shapes(spec: RelayNetworkSpec, dist: CodingDistribution) -> None:
    """Raise ShapeError unless ``dist`` matches the alphabets of ``spec``."""
    if dist.n != spec.n:
        raise ShapeError(f"distribution is for {dist.n} relays, network has {spec.n}")
    if dist.p_x.shape != (spec.card_x,):
        raise ShapeError(f"p_x: expected length {spec.card_x}, got {dist.p_x.shape[0]}")
    for i in range(spec.n):
        if dist.p_x_i[i].shape != (spec.card_relay_inputs[i],):
            raise ShapeError(
                f"p_x_i[{i + 1}]: expected length {spec.card_relay_inputs[i]}, got {dist.p_x_i[i].shape[0]}"
            )
        expect = (spec.card_relay_inputs[i], spec.card_relay_outputs[i], spec.card_compressed[i])
        if dist.q_i[i].shape != expect:
            raise ShapeError(f"q_i[{i + 1}]: expected shape {expect}, got {dist.q_i[i].shape}")


def uniform_distribution(spec: RelayNetworkSpec) -> CodingDistribution:
    """Uniform p_x, p_x_i and uniform test-channel rows."""
    return CodingDistribution(
        p_x=np.full(spec.card_x, 1.0 / spec.card_x),
        p_x_i=tuple(np.full(c, 1.0 / c) for c in spec.card_relay_inputs),
        q_i=tuple(
            np.full((cx, cy, ch), 1.0 / ch)
            for cx, cy, ch in zip(spec.card_relay_inputs, spec.card_relay_outputs, spec.card_compressed)
        ),
    )


def random_distribution(spec: RelayNetworkSpec, rng: np.random.Generator) -> CodingDistribution:
    """Dirichlet(1) sample on every simplex block, in a fixed draw order."""
    p_x = rng.dirichlet(np.ones(spec.card_x))
    p_x_i = tuple(rng.dirichlet(np.ones(c)) for c in spec.card_relay_inputs)
    q_i = []
    for cx, cy, ch in zip(spec.card_relay_inputs, spec.card_relay_outputs, spec.card_compressed):
        rows = np.stack([rng.dirichlet(np.ones(ch)) for _ in range(cx * cy)])
        q_i.append(rows.reshape(cx, cy, ch))
    return CodingDistribution(p_x=p_x, p_x_i=p_x_i, q_i=tuple(q_i))


def _expand(arr: np.ndarray, axes: tuple[int, ...], ndim: int) -> np.ndarray:
    shape = [1] * ndim
    for ax, size in zip(axes, arr.shape):
        shape[ax] = size
    return arr.reshape(shape)


@dataclass(frozen=True, eq=False)
class JointModel:
    """The full joint distribution for one (network, coding distribution)
    pair, plus references back to both.  Immutable once built."""

    joint: ProbTensor
    spec: RelayNetworkSpec
    dist: CodingDistribution

    def __post_init__(self) -> None:
        total = self.joint.total
        if abs(total - 1.0) > JOINT_ATOL:
            raise NormalizationError(f"joint mass {total!r} is not 1 within {JOINT_ATOL}")

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def var_x(self) -> VarId:
        return self.joint.vars[0]

    @property
    def var_y(self) -> VarId:
        return self.joint.vars[1 + self.n]

    @property
    def relay_input_vars(self) -> tuple[VarId, ...]:
        return self.joint.vars[1 : 1 + self.n]

    @property
    def relay_output_vars(self) -> tuple[VarId, ...]:
        return self.joint.vars[2 + self.n : 2 + 2 * self.n]

    @property
    def compressed_vars(self) -> tuple[VarId, ...]:
        return self.joint.vars[2 + 2 * self.n :]

    def compressed_subset(self, mask: int) -> tuple[VarId, ...]:
        """Compressed variables of the relays named by an n-bit mask."""
        if mask < 0 or mask >= (1 << self.n):
            raise ArityError(f"subset mask {mask} out of range for n={self.n}")
        return tuple(v for i, v in enumerate(self.compressed_vars) if mask >> i & 1)

    def relay_input_subset(self, mask: int) -> tuple[VarId, ...]:
        if mask < 0 or mask >= (1 << self.n):
            raise ArityError(f"subset mask {mask} out of range for n={self.n}")
        return tuple(v for i, v in enumerate(self.relay_input_vars) if mask >> i & 1)


def build_joint(spec: RelayNetworkSpec, dist: CodingDistribution) -> JointModel:
    """Multiply p(x) * prod p(x_i) * channel * prod q_i into the full joint.

    Deterministic given its inputs: factors are expanded by broadcasting and
    multiplied in a fixed order (source, relay inputs, channel, compressors).
    """
    check_shapes(spec, dist)
    n = spec.n
    ndim = 2 * n + 2 + n
    joint = _expand(dist.p_x, (0,), ndim)
    for i in range(n):
        joint = joint * _expand(dist.p_x_i[i], (1 + i,), ndim)
    joint = joint * _expand(spec.channel, tuple(range(2 * n + 2)), ndim)
    for i in range(n):
        axes = (1 + i, 2 + n + i, 2 + 2 * n + i)
        joint = joint * _expand(dist.q_i[i], axes, ndim)
    tensor = ProbTensor(spec.variables(), joint)
    return JointModel(joint=tensor, spec=spec, dist=dist)


def validate_markov(model: JointModel) -> list[tuple[int, float]]:
    """Per-relay leakage I(Yhat_i ; everything else | Y_i, X_i) in bits.

    Any joint produced by ``build_joint`` keeps every leakage at rounding
    level; a joint where some Yhat_i peeks past its own (Y_i, X_i) shows a
    strictly positive value.  Returns ``[(relay index, leakage), ...]``.
    """
    out = []
    for i in range(model.n):
        hat = model.compressed_vars[i]
        given = (model.relay_output_vars[i], model.relay_input_vars[i])
        rest = tuple(v for v in model.joint.vars if v != hat and v not in given)
        leak = conditional_mutual_information(model.joint, (hat,), rest, given)
        out.append((i + 1, leak))
    return out
