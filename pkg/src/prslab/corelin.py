"""Dense complex linear algebra for small multi-qubit registers.

State vectors and operators are plain complex128 numpy arrays wrapped in thin
validating containers.  Everything here is a pure function on immutable
inputs, so values can be shared freely across threads.

Convention used throughout the package: qubit 0 is the *most significant* bit
of a basis-state label, i.e. the basis index of |b0 b1 ... b(q-1)> is
sum_j b_j << (q-1-j).  Sub-registers are contiguous bit fields of the label.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .budget import check_complex_array

NORM_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10
UNITARY_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-8


class RegisterError(ValueError):
    """A qubit index or register dimension does not match its operand."""


def _as_complex_vector(values: Any) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128).reshape(-1).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureState:
    """Amplitude vector over ``num_qubits`` qubits.

    ``normalized=False`` marks intermediate sums that deliberately carry a
    non-unit norm; the norm invariant is only enforced for normalized states.
    """

    num_qubits: int
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_complex_vector(self.amplitudes))
        if self.num_qubits < 0:
            raise RegisterError(f"negative qubit count {self.num_qubits}")
        expected = 1 << self.num_qubits
        if self.amplitudes.shape[0] != expected:
            raise RegisterError(
                f"amplitude vector has length {self.amplitudes.shape[0]}, "
                f"expected 2**{self.num_qubits} = {expected}"
            )
        if self.normalized:
            norm_sq = float(np.vdot(self.amplitudes, self.amplitudes).real)
            if abs(norm_sq - 1.0) > NORM_ATOL:
                raise RegisterError(
                    f"squared norm {norm_sq!r} deviates from 1 beyond {NORM_ATOL}"
                )

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_state(num_qubits: int, index: int) -> PureState:
    if not 0 <= index < (1 << num_qubits):
        raise RegisterError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(num_qubits, amps)


def random_state(num_qubits: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    v = rng.standard_normal(1 << num_qubits) + 1j * rng.standard_normal(1 << num_qubits)
    return PureState(num_qubits, v / np.linalg.norm(v))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian operator; with ``normalized=True`` also trace-1 and PSD-checked.

    ``normalized=False`` admits unnormalized but still Hermitian operators
    (e.g. an unnormalized subspace projector).
    """

    matrix: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise RegisterError(f"operator must be square, got shape {mat.shape}")
        dev = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        if dev > HERMITIAN_ATOL:
            raise RegisterError(f"operator deviates from Hermitian by {dev:.3e}")
        if self.normalized:
            tr = complex(np.trace(mat))
            if abs(tr - 1.0) > HERMITIAN_ATOL:
                raise RegisterError(f"trace {tr!r} deviates from 1 beyond {HERMITIAN_ATOL}")
            # cheap necessary PSD condition; full spectrum via min_eigenvalue()
            if mat.size and float(np.min(mat.diagonal().real)) < EIGENVALUE_FLOOR:
                raise RegisterError("diagonal entry below PSD floor")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


class LayerKind(Enum):
    HADAMARD_ALL = "hadamard_all"
    QFT = "qft"
    PHASE_DIAGONAL = "phase_diagonal"
    PERMUTATION = "permutation"
    CUSTOM = "custom"


@dataclass(frozen=True)
class UnitaryLayer:
    """One unitary acting on an ordered set of target qubits.

    parameters by kind:
      HADAMARD_ALL  -- none
      QFT           -- none (kernel omega_N^{xy}/sqrt(N), N = 2**len(targets))
      PHASE_DIAGONAL-- (modulus, exponents): diag of omega_modulus**exponent
      PERMUTATION   -- tuple sigma over basis labels: |x> -> |sigma(x)>
      CUSTOM        -- explicit complex matrix
    """

    kind: LayerKind
    target_qubits: tuple[int, ...]
    parameters: Any = None

    def __post_init__(self):
        targets = tuple(int(t) for t in self.target_qubits)
        object.__setattr__(self, "target_qubits", targets)
        if len(set(targets)) != len(targets):
            raise RegisterError(f"target qubits {targets} are not distinct")
        if any(t < 0 for t in targets):
            raise RegisterError(f"negative qubit index in {targets}")

    @property
    def width(self) -> int:
        return len(self.target_qubits)


def hadamard_all_layer(targets) -> UnitaryLayer:
    return UnitaryLayer(LayerKind.HADAMARD_ALL, tuple(targets))


def qft_layer(targets) -> UnitaryLayer:
    return UnitaryLayer(LayerKind.QFT, tuple(targets))


def phase_diagonal_layer(targets, modulus: int, exponents) -> UnitaryLayer:
    return UnitaryLayer(
        LayerKind.PHASE_DIAGONAL, tuple(targets), (int(modulus), tuple(int(e) for e in exponents))
    )


def permutation_layer(targets, sigma) -> UnitaryLayer:
    return UnitaryLayer(LayerKind.PERMUTATION, tuple(targets), tuple(int(s) for s in sigma))


def custom_layer(targets, matrix) -> UnitaryLayer:
    return UnitaryLayer(LayerKind.CUSTOM, tuple(targets), np.asarray(matrix, dtype=np.complex128))


def _bit_parity_table(n_bits: int) -> np.ndarray:
    idx = np.arange(1 << n_bits, dtype=np.uint64)
    return (np.bitwise_count(idx) & 1).astype(np.int8)


def hadamard_matrix(n_bits: int) -> np.ndarray:
    """H^{(x) n_bits}: entries (-1)^{x.y} / 2^{n/2} with bitwise dot x.y."""
    idx = np.arange(1 << n_bits, dtype=np.uint64)
    parity = (np.bitwise_count(idx[:, None] & idx[None, :]) & 1).astype(np.float64)
    return ((1.0 - 2.0 * parity) / math.sqrt(1 << n_bits)).astype(np.complex128)


def qft_matrix(n_bits: int) -> np.ndarray:
    """Fourier kernel omega_N^{xy} / sqrt(N) over integer basis labels."""
    n = 1 << n_bits
    idx = np.arange(n)
    phase = np.exp(2j * np.pi * (np.outer(idx, idx) % n) / n)
    return phase / math.sqrt(n)


def materialize(layer: UnitaryLayer) -> np.ndarray:
    """Dense matrix of the layer on its own 2^width-dimensional register.

    Raises RegisterError if the represented operator is not unitary within
    1e-10 (possible only for CUSTOM payloads, but checked uniformly).
    """
    w = layer.width
    dim = 1 << w
    if layer.kind is LayerKind.HADAMARD_ALL:
        mat = hadamard_matrix(w)
    elif layer.kind is LayerKind.QFT:
        mat = qft_matrix(w)
    elif layer.kind is LayerKind.PHASE_DIAGONAL:
        modulus, exponents = layer.parameters
        exps = np.asarray(exponents, dtype=np.int64)
        if exps.shape[0] != dim:
            raise RegisterError(
                f"phase table has {exps.shape[0]} entries, expected {dim}"
            )
        if modulus == 2:
            diag = np.where(exps % 2 == 1, -1.0, 1.0).astype(np.complex128)
        else:
            diag = np.exp(2j * np.pi * (exps % modulus) / modulus)
        mat = np.diag(diag)
    elif layer.kind is LayerKind.PERMUTATION:
        sigma = layer.parameters
        if sorted(sigma) != list(range(dim)):
            raise RegisterError(f"permutation payload is not a permutation of 0..{dim - 1}")
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[np.asarray(sigma), np.arange(dim)] = 1.0
    elif layer.kind is LayerKind.CUSTOM:
        mat = np.asarray(layer.parameters, dtype=np.complex128)
        if mat.shape != (dim, dim):
            raise RegisterError(f"custom matrix shape {mat.shape} != ({dim}, {dim})")
    else:  # pragma: no cover
        raise RegisterError(f"unknown layer kind {layer.kind}")
    dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(dim))))
    if dev > UNITARY_ATOL:
        raise RegisterError(f"layer {layer.kind.value} deviates from unitary by {dev:.3e}")
    return mat


def apply_layer(state: PureState, layer: UnitaryLayer) -> PureState:
    """Apply the layer on its target qubits, identity elsewhere."""
    q = state.num_qubits
    for t in layer.target_qubits:
        if not 0 <= t < q:
            raise RegisterError(
                f"layer targets qubit {t} but the state has qubits 0..{q - 1}"
            )
    mat = materialize(layer)
    w = layer.width
    psi = state.amplitudes.reshape([2] * q) if q else state.amplitudes.reshape(())
    if w == 0:
        return state
    psi = np.moveaxis(psi, layer.target_qubits, range(w))
    psi = (mat @ psi.reshape(1 << w, -1)).reshape([2] * q)
    psi = np.moveaxis(psi, range(w), layer.target_qubits)
    return PureState(q, psi.reshape(-1), normalized=state.normalized)


def partial_trace(state: PureState, traced_qubits) -> DensityOperator:
    """Reduced operator after tracing out ``traced_qubits`` of |psi><psi|."""
    q = state.num_qubits
    traced = sorted(set(int(t) for t in traced_qubits))
    for t in traced:
        if not 0 <= t < q:
            raise RegisterError(f"cannot trace qubit {t}: state has qubits 0..{q - 1}")
    kept = [j for j in range(q) if j not in traced]
    psi = state.amplitudes.reshape([2] * q) if q else state.amplitudes.reshape(())
    m = np.transpose(psi, kept + traced).reshape(1 << len(kept), 1 << len(traced))
    rho = m @ m.conj().T
    return DensityOperator(rho, normalized=state.normalized)


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    """Half the 1-norm of (a - b), via Hermitian eigendecomposition."""
    if a.dim != b.dim:
        raise RegisterError(f"dimension mismatch {a.dim} != {b.dim}")
    eigs = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.sum(np.abs(eigs)))


def register_permutation_operator(local_dim: int, copies: int, perm) -> np.ndarray:
    """Operator permuting tensor factors: |a_1..a_t> -> |a_{perm(1)}..a_{perm(t)}>.

    ``perm`` is 0-indexed: output slot j holds input component perm[j].
    """
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(copies)):
        raise RegisterError(f"{perm} is not a permutation of 0..{copies - 1}")
    dim = local_dim**copies
    src = np.arange(dim)
    digits = [(src // local_dim ** (copies - 1 - j)) % local_dim for j in range(copies)]
    dst = sum(digits[perm[j]] * local_dim ** (copies - 1 - j) for j in range(copies))
    op = np.zeros((dim, dim), dtype=np.complex128)
    op[dst, src] = 1.0
    return op


def symmetric_subspace_dimension(local_dim: int, copies: int) -> int:
    return math.comb(local_dim + copies - 1, copies)


def symmetric_projector(
    local_dim: int, copies: int, budget_override: int | None = None
) -> DensityOperator:
    """Unnormalized projector onto the symmetric subspace of `copies` factors.

    Averages all factor permutations; idempotent, trace C(D+t-1, t).
    """
    if local_dim < 1 or copies < 1:
        raise RegisterError("local_dim and copies must be >= 1")
    dim = local_dim**copies
    check_complex_array(
        2 * dim * dim, f"symmetric projector on ({local_dim})^{copies}", budget_override
    )
    proj = np.zeros((dim, dim), dtype=np.complex128)
    src = np.arange(dim)
    digits = [(src // local_dim ** (copies - 1 - j)) % local_dim for j in range(copies)]
    for perm in itertools.permutations(range(copies)):
        dst = sum(digits[perm[j]] * local_dim ** (copies - 1 - j) for j in range(copies))
        np.add.at(proj, (dst, src), 1.0)
    proj /= math.factorial(copies)
    return DensityOperator(proj, normalized=False)


def hadamard_transform(arr: np.ndarray, axis: int = 0) -> np.ndarray:
    """Apply H^{(x) m} along one power-of-two axis (fast Walsh butterfly)."""
    x = np.asarray(arr, dtype=np.complex128)
    n = x.shape[axis]
    if n == 0 or n & (n - 1):
        raise RegisterError(f"axis length {n} is not a power of two")
    moved_shape = np.moveaxis(x, axis, 0).shape
    x = np.array(np.moveaxis(x, axis, 0), order="C")
    flat = x.reshape(n, -1)
    h = 1
    while h < n:
        blocks = flat.reshape(n // (2 * h), 2, h, flat.shape[1])
        a = blocks[:, 0].copy()
        blocks[:, 0] = a + blocks[:, 1]
        blocks[:, 1] = a - blocks[:, 1]
        h *= 2
    flat /= math.sqrt(n)
    return np.moveaxis(flat.reshape(moved_shape), 0, axis)


def hadamard_conjugate(matrix: np.ndarray) -> np.ndarray:
    """Conjugate a square matrix by H^{(x) m}: H M H (H is real symmetric)."""
    return hadamard_transform(hadamard_transform(matrix, axis=0), axis=1)
