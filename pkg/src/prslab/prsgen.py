"""Phase-type pseudorandom-state generators as unitaries.

A generator prepares the flat superposition whose basis-state phases are
sign flips (binary kind) or N-th roots of unity (general kind) given by a
keyed function.  As a unitary it is the Fourier layer followed by the phase
diagonal, so its action on arbitrary basis inputs is defined as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import corelin
from .boolfn import BooleanFunction, PrfKey, prf_truth_table
from .budget import check_complex_array
from .corelin import PureState, UnitaryLayer


class PrsKind(Enum):
    BINARY_PHASE = "binary"
    GENERAL_PHASE = "general"

    def range_modulus(self, n: int) -> int:
        return 2 if self is PrsKind.BINARY_PHASE else 1 << n


@dataclass(frozen=True)
class PrsGenerator:
    kind: PrsKind
    n: int
    f: BooleanFunction

    def __post_init__(self):
        if self.f.input_bits != self.n:
            raise ValueError(
                f"function takes {self.f.input_bits}-bit inputs, generator is on {self.n} qubits"
            )
        expected_m = self.kind.range_modulus(self.n)
        if self.f.range_modulus != expected_m:
            raise ValueError(
                f"{self.kind.value} kind needs range modulus {expected_m}, "
                f"got {self.f.range_modulus}"
            )


def generator_from_key(kind: PrsKind, n: int, key: PrfKey) -> PrsGenerator:
    """Materialize the keyed function's truth table and wrap it."""
    return PrsGenerator(kind, n, prf_truth_table(key, n, kind.range_modulus(n)))


def prepare(gen: PrsGenerator, budget_override: int | None = None) -> PureState:
    """The generator's output on |0...0>: amplitude omega^{f(x)} / sqrt(N) at x."""
    n = gen.n
    check_complex_array(1 << n, f"state on {n} qubits", budget_override)
    table = np.asarray(gen.f.table, dtype=np.int64)
    if gen.kind is PrsKind.BINARY_PHASE:
        phases = np.where(table % 2 == 1, -1.0, 1.0).astype(np.complex128)
    else:
        m = gen.f.range_modulus
        phases = np.exp(2j * np.pi * (table % m) / m)
    return PureState(n, phases / math.sqrt(1 << n))


def fourier_layer(kind: PrsKind, targets) -> UnitaryLayer:
    """The basis-mixing layer: all-Hadamard (binary) or Fourier kernel (general)."""
    if kind is PrsKind.BINARY_PHASE:
        return corelin.hadamard_all_layer(targets)
    return corelin.qft_layer(targets)


def phase_layer(gen: PrsGenerator, targets) -> UnitaryLayer:
    """Diagonal phase layer omega^{f(x)} on the target register."""
    return corelin.phase_diagonal_layer(targets, gen.f.range_modulus, gen.f.table)


def apply_to_register(gen: PrsGenerator, state: PureState, offset: int) -> PureState:
    """Apply the generator unitary to qubits [offset, offset + n) of a wider state."""
    targets = tuple(range(offset, offset + gen.n))
    state = corelin.apply_layer(state, fourier_layer(gen.kind, targets))
    return corelin.apply_layer(state, phase_layer(gen, targets))


def apply_to_state(gen: PrsGenerator, state: PureState) -> PureState:
    """Generator unitary on a full register of exactly n qubits."""
    if state.num_qubits != gen.n:
        raise corelin.RegisterError(
            f"generator acts on {gen.n} qubits, state has {state.num_qubits}"
        )
    return apply_to_register(gen, state, 0)


def phase_shift_unitary(kind: PrsKind, n: int, x: int) -> UnitaryLayer:
    """Key-independent diagonal unitary relating outputs on |x> and on |0>.

    Binary kind: diag((-1)^{x.y}) with bitwise dot; general kind:
    diag(omega_N^{x*y}) with the integer product mod N.  x = 0 is identity.
    """
    if not 0 <= x < (1 << n):
        raise ValueError(f"basis label {x} out of range for {n} bits")
    if kind is PrsKind.BINARY_PHASE:
        y = np.arange(1 << n, dtype=np.uint64)
        exponents = np.bitwise_count(np.uint64(x) & y) & 1
        modulus = 2
    else:
        modulus = 1 << n
        exponents = (x * np.arange(1 << n, dtype=np.int64)) % modulus
    return corelin.phase_diagonal_layer(tuple(range(n)), modulus, exponents)
