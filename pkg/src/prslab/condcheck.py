"""Executable basis-factorization condition for pluggable PRS generators.

Condition 1: the generator's action on any basis state |x> equals a
key-independent unitary U_x applied to its action on |0>.  Condition 2: the
U_x family transpose-aligns, i.e. sum_x |x> (x) U_x^T |y> equals a declared
constant times V|y> (x) W|y> for every basis y.  Witnesses are data, so
third-party generators plug in through a factory plus a U_x table.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from . import corelin, prsgen
from .boolfn import BooleanFunction
from .corelin import UnitaryLayer
from .prsgen import PrsGenerator, PrsKind

DEVIATION_ATOL = 1e-10


@dataclass(frozen=True)
class ConditionWitness:
    """U_x family plus the alignment pair (V, W) and the declared scale.

    The displayed alignment identity is not norm-consistent as written (the
    left side carries an extra sqrt(N) for the shipped witnesses), so the
    scale relating the two sides is an explicit field rather than a silent
    normalization.
    """

    n: int
    u_family: Mapping[int, UnitaryLayer]
    v: UnitaryLayer
    w: UnitaryLayer
    scale: float

    def __post_init__(self):
        missing = [x for x in range(1 << self.n) if x not in self.u_family]
        if missing:
            raise ValueError(f"u_family misses basis labels {missing[:4]}...")
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class ConditionFailure:
    location: int          # basis label x (condition 1) or y (condition 2)
    max_deviation: float


@dataclass(frozen=True)
class ConditionReport:
    condition: int
    n: int
    passed: bool
    failures: tuple[ConditionFailure, ...]
    scale: float
    max_deviation: float

    def to_json(self) -> str:
        payload = {
            "condition": self.condition,
            "n": self.n,
            "passed": self.passed,
            "failures": [
                {"location": f.location, "max_deviation": f.max_deviation}
                for f in self.failures
            ],
            "scale": self.scale,
            "max_deviation": self.max_deviation,
        }
        return json.dumps(payload, sort_keys=True)


def binary_phase_witness(n: int) -> ConditionWitness:
    """U_x = diag((-1)^{x.y}), V = all-Hadamard, W = identity, scale sqrt(N)."""
    family = {
        x: prsgen.phase_shift_unitary(PrsKind.BINARY_PHASE, n, x) for x in range(1 << n)
    }
    targets = tuple(range(n))
    return ConditionWitness(
        n=n,
        u_family=family,
        v=corelin.hadamard_all_layer(targets),
        w=corelin.permutation_layer(targets, range(1 << n)),
        scale=math.sqrt(1 << n),
    )


def general_phase_witness(n: int) -> ConditionWitness:
    """U_x = diag(omega_N^{x*y}), V = Fourier kernel, W = identity, scale sqrt(N)."""
    family = {
        x: prsgen.phase_shift_unitary(PrsKind.GENERAL_PHASE, n, x) for x in range(1 << n)
    }
    targets = tuple(range(n))
    return ConditionWitness(
        n=n,
        u_family=family,
        v=corelin.qft_layer(targets),
        w=corelin.permutation_layer(targets, range(1 << n)),
        scale=math.sqrt(1 << n),
    )


GeneratorFactory = Callable[[BooleanFunction], PrsGenerator]


def check_cond1(
    gen_factory: GeneratorFactory,
    witness: ConditionWitness,
    n: int,
    functions: Iterable[BooleanFunction],
) -> ConditionReport:
    """Verify gen|x> == U_x gen|0> for every sampled function and every x.

    Records, per basis label x, the worst amplitude deviation over the
    function sample; passes iff the overall maximum is within 1e-10.
    """
    worst: dict[int, float] = {x: 0.0 for x in range(1 << n)}
    checked_any = False
    for f in functions:
        checked_any = True
        gen = gen_factory(f)
        base = prsgen.prepare(gen)
        for x in range(1 << n):
            try:
                layer = witness.u_family[x]
            except KeyError:
                raise ValueError(f"witness has no unitary for basis label {x}") from None
            lhs = prsgen.apply_to_state(gen, corelin.basis_state(n, x))
            rhs = corelin.apply_layer(base, layer)
            dev = float(np.max(np.abs(lhs.amplitudes - rhs.amplitudes)))
            if dev > worst[x]:
                worst[x] = dev
    if not checked_any:
        raise ValueError("empty function sample")
    failures = tuple(
        ConditionFailure(x, dev) for x, dev in worst.items() if dev > DEVIATION_ATOL
    )
    overall = max(worst.values())
    return ConditionReport(1, n, not failures, failures, witness.scale, overall)


def check_cond2(witness: ConditionWitness) -> ConditionReport:
    """Verify sum_x |x> (x) U_x^T |y> == scale * V|y> (x) W|y> for every basis y.

    Basis-complete: any single failing y fails the report and is named in it.
    """
    n = witness.n
    dim = 1 << n
    u_mats = [corelin.materialize(witness.u_family[x]) for x in range(dim)]
    v_mat = corelin.materialize(witness.v)
    w_mat = corelin.materialize(witness.w)
    failures = []
    overall = 0.0
    for y in range(dim):
        lhs = np.zeros(dim * dim, dtype=np.complex128)
        for x in range(dim):
            lhs[x * dim : (x + 1) * dim] = u_mats[x].T[:, y]
        rhs = witness.scale * np.kron(v_mat[:, y], w_mat[:, y])
        dev = float(np.max(np.abs(lhs - rhs)))
        overall = max(overall, dev)
        if dev > DEVIATION_ATOL:
            failures.append(ConditionFailure(y, dev))
    return ConditionReport(2, n, not failures, tuple(failures), witness.scale, overall)
