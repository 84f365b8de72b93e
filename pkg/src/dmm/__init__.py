"""Distributed matrix mechanism: packed sharing, committee resharing and a protocol simulator."""

from dmm.field import DEFAULT_MODULUS, FieldElement, FieldError, PrimeField, arith

__all__ = ["DEFAULT_MODULUS", "FieldElement", "FieldError", "PrimeField", "arith"]
