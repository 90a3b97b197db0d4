"""Exact and sampled t-copy ensemble moments, with a Haar-moment oracle.

Two independent routes compute the all-functions average of the t-fold
projector for sign-phase ensembles:

* brute force -- build every member state and average the outer products;
* XOR pairing -- group tuples of basis labels by the parity vector their
  phase exponents induce on the function table.  Averaging the sign over
  *all* functions kills every cross term whose parity vectors differ, so the
  exact moment is a sum of per-group outer products and never enumerates a
  single function.

The Haar moment is the normalized projector onto the symmetric subspace,
cross-checked by Monte Carlo averaging of random states.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce

import numpy as np
import scipy.sparse as sparse

from . import boolfn, corelin, expand
from .boolfn import BooleanFunction
from .budget import check_complex_array, check_enumeration
from .corelin import DensityOperator, PureState
from .prsgen import PrsGenerator, PrsKind, prepare

_MAX_KEY_BITS = 64  # XOR parity vectors are packed into uint64 words


class Source(Enum):
    PLAIN = "plain"
    CONSTRUCTION1 = "construction1"
    CONSTRUCTION2 = "construction2"
    CONSTRUCTION3 = "construction3"


class Method(Enum):
    BRUTE_FORCE = "brute_force"
    DELTA_PAIRING = "delta_pairing"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class ExhaustiveAllFunctions:
    def descriptor(self) -> dict:
        return {"space": "exhaustive"}


@dataclass(frozen=True)
class PrfKeys:
    count: int
    seed: int

    def descriptor(self) -> dict:
        return {"space": "prf", "count": self.count, "seed": self.seed}


@dataclass(frozen=True)
class UniformSample:
    count: int
    seed: int

    def descriptor(self) -> dict:
        return {"space": "uniform", "count": self.count, "seed": self.seed}


FunctionSpace = ExhaustiveAllFunctions | PrfKeys | UniformSample


@dataclass(frozen=True)
class MomentSpec:
    source: Source
    n: int
    t: int
    kind: PrsKind = PrsKind.BINARY_PHASE
    i: int | None = None
    ell: int | None = None
    function_space: FunctionSpace = field(default_factory=ExhaustiveAllFunctions)
    # reuse one drawn function for every block of a multi-block source;
    # offered as a variant to experiment with, with no agreement guarantee
    shared_key: bool = False

    def __post_init__(self):
        if self.t < 1:
            raise ValueError(f"copy count must be >= 1, got {self.t}")
        if self.source is Source.CONSTRUCTION1 and self.i is None:
            raise ValueError("construction1 needs the added-qubit count i")
        if self.source is Source.CONSTRUCTION3 and self.ell is None:
            raise ValueError("construction3 needs the block count ell")
        if self.shared_key and self.source in (Source.PLAIN, Source.CONSTRUCTION1):
            raise ValueError(f"{self.source.value} draws one function per member already")

    @property
    def output_qubits(self) -> int:
        if self.source is Source.PLAIN:
            return self.n
        if self.source is Source.CONSTRUCTION1:
            return self.n + self.i
        if self.source is Source.CONSTRUCTION2:
            return 2 * self.n
        return (self.n // 2) * (self.ell + 1)

    @property
    def block_count(self) -> int:
        """Number of blocks the source wires up."""
        if self.source in (Source.PLAIN, Source.CONSTRUCTION1):
            return 1
        if self.source is Source.CONSTRUCTION2:
            return 3
        return self.ell

    @property
    def functions_per_member(self) -> int:
        """Independent function draws per ensemble member."""
        return 1 if self.shared_key else self.block_count

    def descriptor(self) -> dict:
        out = {"source": self.source.value, "kind": self.kind.value,
               "n": self.n, "t": self.t}
        if self.i is not None:
            out["i"] = self.i
        if self.ell is not None:
            out["ell"] = self.ell
        if self.shared_key:
            out["shared_key"] = True
        out.update(self.function_space.descriptor())
        return out


@dataclass(frozen=True)
class MomentReport:
    spec: MomentSpec
    method: Method
    moment: DensityOperator
    haar_distance: float
    runtime_ms: int
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.haar_distance <= 1.0 + 1e-12:
            raise ValueError(f"distance {self.haar_distance} outside [0, 1]")

    def to_json(self, include_matrix: bool = False, canonical_runtime: bool = False) -> str:
        payload = dict(self.spec.descriptor())
        payload.update(
            method=self.method.value,
            haar_distance=self.haar_distance,
            runtime_ms=0 if canonical_runtime else self.runtime_ms,
            seed=self.seed,
            dim=self.moment.dim,
        )
        if include_matrix:
            payload["moment_re"] = self.moment.matrix.real.tolist()
            payload["moment_im"] = self.moment.matrix.imag.tolist()
        return json.dumps(payload, sort_keys=True)


def member_functions(spec: MomentSpec):
    """Yield one function tuple per ensemble member (one entry per draw)."""
    n, m = spec.n, spec.kind.range_modulus(spec.n)
    draws = spec.functions_per_member
    space = spec.function_space
    if isinstance(space, ExhaustiveAllFunctions):
        per_draw = boolfn.function_count(n, m)
        check_enumeration(per_draw**draws, f"exhaustive ensemble n={n}, draws={draws}")
        singles = list(boolfn.enumerate_all(n, m))
        yield from itertools.product(singles, repeat=draws)
    elif isinstance(space, PrfKeys):
        keys = boolfn.derive_keys(space.count * draws, space.seed, spec.source.value)
        for member in range(space.count):
            yield tuple(
                boolfn.prf_truth_table(keys[member * draws + b], n, m)
                for b in range(draws)
            )
    elif isinstance(space, UniformSample):
        rng = np.random.default_rng(space.seed)
        for _ in range(space.count):
            yield tuple(boolfn.random_function(n, m, rng) for _ in range(draws))
    else:  # pragma: no cover
        raise TypeError(f"unknown function space {space!r}")


def member_state(spec: MomentSpec, fns: tuple[BooleanFunction, ...]) -> PureState:
    """Single-copy ensemble member for one drawn function tuple."""
    if spec.shared_key:
        fns = fns * spec.block_count
    if spec.source is Source.PLAIN:
        return prepare(PrsGenerator(spec.kind, spec.n, fns[0]))
    if spec.source is Source.CONSTRUCTION1:
        return expand.evaluate(expand.construction1(fns[0], spec.n, spec.i, spec.kind))
    if spec.source is Source.CONSTRUCTION2:
        return expand.evaluate(expand.construction2(*fns, spec.n, spec.kind))
    return expand.evaluate(expand.construction3(fns, spec.n, spec.kind))


def _t_fold(amplitudes: np.ndarray, t: int) -> np.ndarray:
    return reduce(np.kron, [amplitudes] * t)


def ensemble_moment_over_functions(
    spec: MomentSpec, function_tuples, budget_override: int | None = None
) -> DensityOperator:
    """Average the t-fold projectors of the members drawn from an iterable."""
    dim = 1 << (spec.output_qubits * spec.t)
    check_complex_array(2 * dim * dim, f"moment matrix dim {dim}", budget_override)
    chunk_rows = max(1, min(1024, (64 << 20) // (dim * 16)))
    moment = np.zeros((dim, dim), dtype=np.complex128)
    count = 0
    block = []
    for fns in function_tuples:
        block.append(_t_fold(member_state(spec, fns).amplitudes, spec.t))
        count += 1
        if len(block) == chunk_rows:
            vs = np.asarray(block)
            moment += vs.T @ vs.conj()
            block = []
    if block:
        vs = np.asarray(block)
        moment += vs.T @ vs.conj()
    if count == 0:
        raise ValueError("empty ensemble")
    return DensityOperator(moment / count)


def ensemble_moment_bruteforce(
    spec: MomentSpec, budget_override: int | None = None
) -> DensityOperator:
    """Exact (exhaustive space) or empirical (sampled space) ensemble average."""
    return ensemble_moment_over_functions(spec, member_functions(spec), budget_override)


def _popcount_parity(values: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(values) & np.uint64(1)).astype(np.float64)


def ensemble_moment_deltapair(
    spec: MomentSpec, budget_override: int | None = None
) -> DensityOperator:
    """All-functions moment via XOR-vector grouping; no function enumeration.

    Sign-phase kinds only, plain or two-block-overlap sources, exhaustive
    space.  Agrees with the brute-force average exactly (up to rounding).
    """
    if spec.kind is not PrsKind.BINARY_PHASE:
        raise ValueError("pairing route requires the sign-phase kind")
    if not isinstance(spec.function_space, ExhaustiveAllFunctions):
        raise ValueError("pairing route computes the exhaustive all-functions average")
    if spec.source not in (Source.PLAIN, Source.CONSTRUCTION1):
        raise ValueError(f"pairing route does not support source {spec.source.value}")
    n, t = spec.n, spec.t
    if (1 << n) > _MAX_KEY_BITS:
        raise ValueError(f"parity vectors for n={n} exceed {_MAX_KEY_BITS} packed bits")

    if spec.source is Source.PLAIN:
        tuple_bits = n * t
        check_complex_array(3 << tuple_bits, "tuple enumeration", budget_override)
        dim = 1 << (n * t)
        check_complex_array(2 * dim * dim, f"moment matrix dim {dim}", budget_override)
        idx = np.arange(1 << tuple_bits, dtype=np.uint64)
        keys = np.zeros_like(idx)
        mask_n = np.uint64((1 << n) - 1)
        one = np.uint64(1)
        for j in range(t):
            x_j = (idx >> np.uint64(n * (t - 1 - j))) & mask_n
            keys ^= one << x_j
        cols = idx
        signs = np.ones(idx.shape[0], dtype=np.float64)
        prefactor = 1.0 / (1 << (n * t))
        conjugate = False
    else:
        i = spec.i
        tuple_bits = 2 * n * t
        check_complex_array(3 << tuple_bits, "tuple enumeration", budget_override)
        dim = 1 << ((n + i) * t)
        check_complex_array(2 * dim * dim, f"moment matrix dim {dim}", budget_override)
        idx = np.arange(1 << tuple_bits, dtype=np.uint64)
        keys = np.zeros_like(idx)
        parity = np.zeros(idx.shape[0], dtype=np.float64)
        cols = np.zeros_like(idx)
        mask_n = np.uint64((1 << n) - 1)
        mask_tail = np.uint64((1 << (n - i)) - 1)
        one = np.uint64(1)
        for j in range(t):
            copy = (idx >> np.uint64(2 * n * (t - 1 - j))) & np.uint64((1 << (2 * n)) - 1)
            z_j = copy >> np.uint64(n)           # full first-block label x' + x''
            y_j = copy & mask_n
            xpp_j = z_j & mask_tail
            keys ^= (one << z_j) ^ (one << y_j)
            parity += _popcount_parity((y_j >> np.uint64(i)) & xpp_j)
            basis_j = ((z_j >> np.uint64(n - i)) << np.uint64(n)) | y_j
            cols |= basis_j << np.uint64((n + i) * (t - 1 - j))
        signs = 1.0 - 2.0 * (parity % 2.0)
        prefactor = 1.0 / (1 << (2 * n * t))
        conjugate = True

    _, inverse = np.unique(keys, return_inverse=True)
    groups = sparse.coo_matrix(
        (signs, (inverse, cols.astype(np.int64))),
        shape=(int(inverse.max()) + 1, dim),
    ).tocsr()
    pre = (groups.T @ groups).toarray().astype(np.float64) * prefactor
    trace = float(np.trace(pre))
    if abs(trace - 1.0) > 1e-9:
        raise AssertionError(f"pairing moment trace {trace} deviates from 1")
    matrix = pre.astype(np.complex128)
    if conjugate:
        matrix = corelin.hadamard_conjugate(matrix)
    return DensityOperator(matrix)


def haar_moment(
    local_dim: int, copies: int, budget_override: int | None = None
) -> DensityOperator:
    """Average t-fold projector of a Haar-random state: the normalized
    symmetric-subspace projector."""
    proj = corelin.symmetric_projector(local_dim, copies, budget_override)
    return DensityOperator(
        proj.matrix / corelin.symmetric_subspace_dimension(local_dim, copies)
    )


def haar_moment_monte_carlo(
    local_dim: int, copies: int, samples: int, seed: int
) -> DensityOperator:
    """Empirical t-fold moment over random states (secondary oracle)."""
    rng = np.random.default_rng(seed)
    dim = local_dim**copies
    moment = np.zeros((dim, dim), dtype=np.complex128)
    chunk = max(1, min(samples, (32 << 20) // (dim * 16)))
    done = 0
    while done < samples:
        rows = min(chunk, samples - done)
        states = rng.standard_normal((rows, local_dim)) + 1j * rng.standard_normal(
            (rows, local_dim)
        )
        states /= np.linalg.norm(states, axis=1, keepdims=True)
        folded = states
        for _ in range(copies - 1):
            folded = np.einsum("ka,kb->kab", folded, states).reshape(rows, -1)
        moment += folded.T @ folded.conj()
        done += rows
    return DensityOperator(moment / samples)


def compare_to_haar(
    spec: MomentSpec, method: Method, budget_override: int | None = None
) -> MomentReport:
    """Compute the ensemble moment by the chosen route and its distance to
    the Haar moment.  Deterministic given the function-space seed."""
    sampled = not isinstance(spec.function_space, ExhaustiveAllFunctions)
    if method is Method.DELTA_PAIRING and sampled:
        raise ValueError("pairing route is exact; use it with the exhaustive space")
    if method is Method.MONTE_CARLO and not sampled:
        raise ValueError("monte_carlo labels sampled ensembles; space is exhaustive")
    if method is Method.BRUTE_FORCE and sampled:
        raise ValueError("brute_force labels exhaustive ensembles; use monte_carlo")
    start = time.perf_counter()
    if method is Method.DELTA_PAIRING:
        moment = ensemble_moment_deltapair(spec, budget_override)
    else:
        moment = ensemble_moment_bruteforce(spec, budget_override)
    haar = haar_moment(1 << spec.output_qubits, spec.t, budget_override)
    distance = corelin.trace_distance(moment, haar)
    runtime_ms = int(round((time.perf_counter() - start) * 1000))
    seed = getattr(spec.function_space, "seed", 0)
    return MomentReport(spec, method, moment, float(distance), runtime_ms, seed)
