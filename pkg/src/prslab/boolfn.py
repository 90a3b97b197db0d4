"""Truth-table function space: enumeration, sampling, and a toy keyed PRF.

Functions map n-bit inputs to residues mod m (m=2 for sign phases, m=2^n for
root-of-unity phases).  The keyed PRF is a domain-separated cryptographic
hash: deterministic and byte-exact across runs and platforms, with no
security claim attached.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .budget import check_enumeration

KEY_BYTES = 16

_MAX_TABLE_BITS = 20  # full truth-table materialization cap


@dataclass(frozen=True)
class BooleanFunction:
    input_bits: int
    range_modulus: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        n, m = self.input_bits, self.range_modulus
        if n < 0 or m < 1:
            raise ValueError(f"invalid function shape n={n}, m={m}")
        if len(self.table) != 1 << n:
            raise ValueError(
                f"table has {len(self.table)} entries, expected 2**{n} = {1 << n}"
            )
        if any(not 0 <= v < m for v in self.table):
            raise ValueError(f"table entry out of range [0, {m})")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def table_hex(self) -> str:
        """Hex encoding of the table, fixed-width entries (serialization)."""
        width = max(1, (max(self.range_modulus - 1, 1).bit_length() + 7) // 8)
        return b"".join(v.to_bytes(width, "big") for v in self.table).hex()

    @classmethod
    def from_hex(cls, input_bits: int, range_modulus: int, hex_table: str) -> "BooleanFunction":
        width = max(1, (max(range_modulus - 1, 1).bit_length() + 7) // 8)
        raw = bytes.fromhex(hex_table)
        if len(raw) != width * (1 << input_bits):
            raise ValueError(f"hex table has {len(raw)} bytes, expected {width << input_bits}")
        table = tuple(
            int.from_bytes(raw[k * width : (k + 1) * width], "big")
            for k in range(1 << input_bits)
        )
        return cls(input_bits, range_modulus, table)


@dataclass(frozen=True)
class PrfKey:
    key_bytes: bytes
    label: str = "prs"

    def __post_init__(self):
        if len(self.key_bytes) != KEY_BYTES:
            raise ValueError(
                f"key has {len(self.key_bytes)} bytes, expected {KEY_BYTES}"
            )


def constant_function(n: int, m: int = 2, value: int = 0) -> BooleanFunction:
    return BooleanFunction(n, m, (value,) * (1 << n))


def function_count(n: int, m: int) -> int:
    return m ** (1 << n)


def enumerate_all(n: int, m: int, limit: int | None = None) -> Iterator[BooleanFunction]:
    """All m^(2^n) functions, in lexicographic table order (table[0] most significant)."""
    total = function_count(n, m)
    check_enumeration(total, f"function space n={n}, m={m}", limit)
    entries = 1 << n
    for code in range(total):
        # decode `code` base-m, most significant digit first
        digits = []
        rem = code
        for _ in range(entries):
            rem, digit = divmod(rem, m)
            digits.append(digit)
        yield BooleanFunction(n, m, tuple(reversed(digits)))


def prf_eval(key: PrfKey, n: int, m: int, x: int) -> int:
    """Keyed pseudorandom residue: sha256(label | n | m | key | x) mod m."""
    if not 0 <= x < (1 << n):
        raise ValueError(f"input {x} out of range for {n} bits")
    msg = (
        key.label.encode()
        + b"\x1f"
        + n.to_bytes(2, "big")
        + m.to_bytes(8, "big")
        + key.key_bytes
        + x.to_bytes(4, "big")
    )
    digest = hashlib.sha256(msg).digest()
    return int.from_bytes(digest, "big") % m


def prf_truth_table(key: PrfKey, n: int, m: int) -> BooleanFunction:
    """Materialize the full truth table of the keyed function (n <= 20)."""
    if n > _MAX_TABLE_BITS:
        raise ValueError(f"refusing to materialize 2**{n} entries (cap n={_MAX_TABLE_BITS})")
    return BooleanFunction(n, m, tuple(prf_eval(key, n, m, x) for x in range(1 << n)))


def derive_keys(count: int, seed: int, label: str = "prs") -> list[PrfKey]:
    """Deterministic key list for sampled ensembles; byte-exact given (count, seed)."""
    keys = []
    for idx in range(count):
        digest = hashlib.sha256(
            b"prslab-key" + seed.to_bytes(8, "big", signed=True) + idx.to_bytes(8, "big")
        ).digest()
        keys.append(PrfKey(digest[:KEY_BYTES], label))
    return keys


def random_function(n: int, m: int, rng: np.random.Generator) -> BooleanFunction:
    return BooleanFunction(n, m, tuple(int(v) for v in rng.integers(0, m, size=1 << n)))


def as_indicator_vector(f: BooleanFunction) -> np.ndarray:
    """The length-2^n 0/1 table of a mod-2 function, as a bit vector."""
    if f.range_modulus != 2:
        raise ValueError(f"indicator form requires modulus 2, got {f.range_modulus}")
    return np.asarray(f.table, dtype=np.uint8)


def indicator_basis(n: int, x: int) -> np.ndarray:
    """The standard basis bit vector e_x of length 2^n."""
    if not 0 <= x < (1 << n):
        raise ValueError(f"index {x} out of range for {n} bits")
    e = np.zeros(1 << n, dtype=np.uint8)
    e[x] = 1
    return e
