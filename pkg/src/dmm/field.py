"""Prime-field arithmetic for shares and wire payloads.

Scalars are plain Python ints in ``[0, q)``; vectors are ``numpy.uint64``
arrays.  The modulus is capped below ``2**32`` so that the product of two
reduced residues always fits in 64 bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_MODULUS = 4294967291  # largest prime below 2**32


class FieldError(ValueError):
    pass


def _is_prime(q: int) -> bool:
    from sympy import isprime

    return bool(isprime(q))


@dataclass(frozen=True)
class PrimeField:
    """The field Z_q together with a signed-representative encoding."""

    modulus: int = DEFAULT_MODULUS

    def __post_init__(self):
        q = int(self.modulus)
        if q < 3 or q >= 2**32:
            raise FieldError(f"modulus must lie in [3, 2**32), got {q}")
        if not _is_prime(q):
            raise FieldError(f"modulus {q} is not prime")
        object.__setattr__(self, "modulus", q)

    @property
    def bit_width(self) -> int:
        return (self.modulus - 1).bit_length()

    @property
    def byte_width(self) -> int:
        return math.ceil(self.bit_width / 8)

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, int(value) % self.modulus)

    # scalar arithmetic
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a prime field")
        return pow(a, -1, self.modulus)

    # signed representatives
    def encode_signed(self, x: int) -> int:
        """Map an integer with ``|x| <= q/2`` to its residue."""
        x = int(x)
        if 2 * abs(x) > self.modulus:
            raise FieldError(f"{x} outside the signed range of Z_{self.modulus}")
        return x % self.modulus

    def decode_signed(self, v: int) -> int:
        v = int(v) % self.modulus
        return v if 2 * v <= self.modulus else v - self.modulus

    # vector helpers
    def array(self, values) -> np.ndarray:
        """Reduce an integer array (any sign) into canonical ``uint64`` residues."""
        a = np.asarray(values)
        if a.dtype == np.uint64:
            return a % np.uint64(self.modulus)
        if a.dtype == object:
            return np.array([int(v) % self.modulus for v in a.ravel()], dtype=np.uint64).reshape(a.shape)
        return np.mod(a.astype(np.int64), self.modulus).astype(np.uint64)

    def encode_signed_array(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.size and 2 * int(np.abs(x).max()) > self.modulus:
            raise FieldError("value outside the signed range")
        return np.mod(x, self.modulus).astype(np.uint64)

    def decode_signed_array(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.uint64).astype(np.int64)
        return np.where(2 * v <= self.modulus, v, v - self.modulus)

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % np.uint64(self.modulus)

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        q = np.uint64(self.modulus)
        return (a + (q - b % q)) % q

    def vscale(self, c: int, a: np.ndarray) -> np.ndarray:
        return (np.uint64(int(c) % self.modulus) * a) % np.uint64(self.modulus)

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a * b) % np.uint64(self.modulus)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """``a @ b`` over the field; reduces after every product to stay in 64 bits.

        Contracts the last axis of ``a`` with the first axis of ``b``.
        """
        q = np.uint64(self.modulus)
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.uint64)
        for i in range(a.shape[-1]):
            term = np.multiply.outer(a[..., i], b[i]) % q
            out += term
            out %= q
        return out


@dataclass(frozen=True)
class FieldElement:
    """A single residue; convenience wrapper for scalar work and tests."""

    field: PrimeField
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("mixing elements of different fields")
            return other.value
        return int(other) % self.field.modulus

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __truediv__(self, other):
        return self * self.field.inv(self._coerce(other))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.field.modulus, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.modulus})"


def arith(a: FieldElement, b: FieldElement | None, kind: str) -> FieldElement:
    """Single dispatch point for the four field operations (``add``, ``sub``, ``mul``, ``inv``)."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "inv":
        return a.inv()
    raise ValueError(f"unknown field operation {kind!r}")
