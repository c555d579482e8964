"""Fourier analysis of complex functions on a finite Abelian group.

Transforms are the naive O(|G|^2) sums. Every root of unity is evaluated from
the exact integer pairing numerator rather than built up by repeated
multiplication, so phase error does not accumulate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .abelian import GroupSpec


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A function ``G -> C`` stored as a vector in canonical element order."""

    group: GroupSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(-1).copy()
        if values.shape[0] != self.group.size:
            raise ValueError(f"expected {self.group.size} values for {self.group}, got {values.shape[0]}")
        if not np.all(np.isfinite(values)):
            raise ValueError("group function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __call__(self, x: Sequence[int]) -> complex:
        return complex(self.values[self.group.index(x)])

    def __len__(self) -> int:
        return self.values.shape[0]

    def allclose(self, other: GroupFunction, atol: float = 1e-12) -> bool:
        return self.group == other.group and bool(np.allclose(self.values, other.values, rtol=0, atol=atol))


def character_matrix(group: GroupSpec, sign: int = -1) -> np.ndarray:
    """``M[xhat, x] = exp(sign * 2j*pi*<xhat, x>)``."""
    k = group.pairing_numerators
    return np.exp(sign * 2j * np.pi * k / group.exponent)


def dft_rows(group: GroupSpec, rows: np.ndarray) -> np.ndarray:
    """DFT along the last axis of an array of function tables."""
    return np.asarray(rows) @ character_matrix(group, -1).T


def dft(f: GroupFunction) -> GroupFunction:
    return GroupFunction(f.group, dft_rows(f.group, f.values))


def idft(fhat: GroupFunction) -> GroupFunction:
    g = fhat.group
    return GroupFunction(g, character_matrix(g, +1) @ fhat.values / g.size)


def convolve(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    """``(f * g)(x) = sum_{x'} f(x') g(x - x')`` by direct summation."""
    if f.group != g.group:
        raise ValueError(f"cannot convolve functions on {f.group} and {g.group}")
    sub = f.group.sub_table  # sub[x, x'] = x - x'
    return GroupFunction(f.group, g.values[sub] @ f.values)


def reverse(f: GroupFunction) -> GroupFunction:
    """``x -> f(-x)``."""
    return GroupFunction(f.group, f.values[f.group.neg_table])


def shift(f: GroupFunction, a: Sequence[int]) -> GroupFunction:
    """``x -> f(x - a)``."""
    g = f.group
    ia = g.index(a)
    return GroupFunction(g, f.values[g.sub_table[:, ia]])


def delta(group: GroupSpec, a: Sequence[int]) -> GroupFunction:
    v = np.zeros(group.size, dtype=complex)
    v[group.index(a)] = 1.0
    return GroupFunction(group, v)
