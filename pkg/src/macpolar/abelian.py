"""Finite Abelian groups presented as products of cyclic groups.

A group is fixed by its list of cyclic factor orders ``(N_1, ..., N_k)``; that
presentation is also the isomorphism every Fourier transform in the package
uses. Elements are plain tuples of reduced residues. Canonical element order is
lexicographic in the residue tuple, which is the same as mixed-radix order with
the last factor varying fastest.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Element = tuple[int, ...]


class DimensionError(ValueError):
    """An element does not match the factor structure of its group."""


@dataclass(frozen=True)
class GroupSpec:
    """The group Z_{N_1} x ... x Z_{N_k}.

    ``GroupSpec(())`` and ``GroupSpec((1,))`` both describe the trivial group;
    they are different presentations and so compare unequal.
    """

    orders: tuple[int, ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic factor orders must be >= 1, got {orders}")
        if math.prod(orders) > sys.maxsize:
            raise ValueError(f"group of order {math.prod(orders)} is too large")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def cyclic(cls, n: int) -> GroupSpec:
        return cls((n,))

    def __len__(self) -> int:
        return self.size

    def __str__(self) -> str:
        if not self.orders:
            return "{0}"
        return " x ".join(f"Z{n}" for n in self.orders)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1

    # -- elements -------------------------------------------------------

    def check(self, a: Sequence[int]) -> Element:
        """Return ``a`` as a reduced element tuple, or raise ``DimensionError``."""
        if len(a) != self.rank:
            raise DimensionError(f"element {tuple(a)} has {len(a)} residues, group {self} has {self.rank} factors")
        return tuple(int(r) % n for r, n in zip(a, self.orders))

    def elements(self) -> list[Element]:
        """All elements in canonical (lexicographic) order."""
        if "elements" not in self._cache:
            self._cache["elements"] = [
                tuple(int(r) for r in idx) for idx in np.ndindex(*self.orders)
            ]
        return list(self._cache["elements"])

    def index(self, a: Sequence[int]) -> int:
        a = self.check(a)
        idx = 0
        for r, n in zip(a, self.orders):
            idx = idx * n + r
        return idx

    def element(self, idx: int) -> Element:
        idx = int(idx)
        if not 0 <= idx < self.size:
            raise IndexError(f"index {idx} out of range for group of order {self.size}")
        out = []
        for n in reversed(self.orders):
            idx, r = divmod(idx, n)
            out.append(r)
        return tuple(reversed(out))

    # -- arithmetic -----------------------------------------------------

    def add(self, a: Sequence[int], b: Sequence[int]) -> Element:
        a, b = self.check(a), self.check(b)
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def neg(self, a: Sequence[int]) -> Element:
        a = self.check(a)
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def sub(self, a: Sequence[int], b: Sequence[int]) -> Element:
        return self.add(a, self.neg(b))

    def scale(self, k: int, a: Sequence[int]) -> Element:
        a = self.check(a)
        return tuple((k * x) % n for x, n in zip(a, self.orders))

    def pairing(self, xhat: Sequence[int], x: Sequence[int]) -> Fraction:
        """``<xhat, x> = sum_i xhat_i x_i / N_i`` reduced mod 1, exactly."""
        xhat, x = self.check(xhat), self.check(x)
        total = sum((Fraction(u * v, n) for u, v, n in zip(xhat, x, self.orders)), Fraction(0))
        return total - math.floor(total)

    def element_order(self, a: Sequence[int]) -> int:
        a = self.check(a)
        return math.lcm(*(n // math.gcd(r, n) for r, n in zip(a, self.orders))) if a else 1

    def subgroup_closure(self, seed: Iterable[Sequence[int]]) -> frozenset[Element]:
        """Smallest subgroup containing ``seed``."""
        closure = {self.zero}
        frontier = [self.check(s) for s in seed]
        while frontier:
            g = frontier.pop()
            if g in closure:
                continue
            # closure is a subgroup; adding g means adding every coset member h + k*g
            new = set()
            for h in closure:
                cur = h
                for _ in range(self.element_order(g)):
                    new.add(cur)
                    cur = self.add(cur, g)
            closure |= new
        return frozenset(closure)

    def is_subgroup(self, subset: Iterable[Sequence[int]]) -> bool:
        elems = {self.check(s) for s in subset}
        if self.zero not in elems:
            return False
        return all(self.add(a, b) in elems for a in elems for b in elems)

    # -- index tables ---------------------------------------------------

    @property
    def add_table(self) -> np.ndarray:
        """``add_table[i, j]`` is the index of ``element(i) + element(j)``."""
        if "add" not in self._cache:
            res = self._residues()
            summed = (res[:, None, :] + res[None, :, :]) % np.array(self.orders, dtype=np.int64)
            self._cache["add"] = self._flatten(summed)
        return self._cache["add"]

    @property
    def neg_table(self) -> np.ndarray:
        if "neg" not in self._cache:
            res = self._residues()
            self._cache["neg"] = self._flatten((-res) % np.array(self.orders, dtype=np.int64))
        return self._cache["neg"]

    @property
    def sub_table(self) -> np.ndarray:
        """``sub_table[i, j]`` is the index of ``element(i) - element(j)``."""
        if "sub" not in self._cache:
            self._cache["sub"] = self.add_table[:, self.neg_table]
        return self._cache["sub"]

    @property
    def pairing_numerators(self) -> np.ndarray:
        """Integer matrix ``K`` with ``<xhat_i, x_j> = K[i, j] / exponent`` (mod 1)."""
        if "pair" not in self._cache:
            res = self._residues()
            weights = np.array([self.exponent // n for n in self.orders], dtype=np.int64)
            k = (res[:, None, :] * res[None, :, :] * weights).sum(axis=-1) % self.exponent
            self._cache["pair"] = k
        return self._cache["pair"]

    def _residues(self) -> np.ndarray:
        return np.array(self.elements(), dtype=np.int64).reshape(self.size, self.rank)

    def _flatten(self, residues: np.ndarray) -> np.ndarray:
        idx = np.zeros(residues.shape[:-1], dtype=np.int64)
        for axis, n in enumerate(self.orders):
            idx = idx * n + residues[..., axis]
        return idx


def product(*groups: GroupSpec) -> GroupSpec:
    """Direct product with factors concatenated in argument order."""
    return GroupSpec(tuple(n for g in groups for n in g.orders))
