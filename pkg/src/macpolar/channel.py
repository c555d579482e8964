"""Multiple access channels with group-valued inputs.

A ``Mac`` holds ``W(z | x_1, ..., x_m)`` as a 2-D table. Row ``r`` is the input
tuple whose per-user indices, read as a mixed-radix number with the last user
varying fastest, equal ``r``; columns are output indices ``0..|Z|-1``.
All information quantities assume independent uniform inputs and are reported
in bits.

User subsets are bitmasks: bit ``i - 1`` selects user ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .abelian import Element, GroupSpec, product
from .spectral import GroupFunction, dft_rows
from .tolerances import Tolerances, resolve

Subset = int | Iterable[int]


class InvalidChannelError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) if self.errors else "invalid channel")


# -- subsets --------------------------------------------------------------

def as_mask(subset: Subset, m: int) -> int:
    """Normalize a bitmask or a collection of 1-based user numbers to a bitmask."""
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
    else:
        mask = 0
        for user in subset:
            if not 1 <= int(user) <= m:
                raise ValueError(f"user {user} out of range 1..{m}")
            mask |= 1 << (int(user) - 1)
    if mask < 0 or mask >= 1 << m:
        raise ValueError(f"subset mask {mask:#b} out of range for {m} users")
    return mask


def users_of(mask: int, m: int) -> list[int]:
    return [i + 1 for i in range(m) if mask >> i & 1]


def subset_label(mask: int, m: int) -> str:
    return "{" + ",".join(str(u) for u in users_of(mask, m)) + "}"


def proper_subsets(m: int) -> list[int]:
    """Nonempty proper subsets of ``{1..m}`` as bitmasks, in increasing order."""
    return list(range(1, (1 << m) - 1))


# -- the channel ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mac:
    input_groups: tuple[GroupSpec, ...]
    table: np.ndarray
    output_labels: tuple | None = None
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        groups = tuple(g if isinstance(g, GroupSpec) else GroupSpec(tuple(g)) for g in self.input_groups)
        if not groups:
            raise ValueError("a MAC needs at least one user")
        table = np.array(self.table, dtype=float)
        rows = math.prod(g.size for g in groups)
        if table.ndim != 2 or table.shape[0] != rows:
            raise ValueError(f"table must have shape ({rows}, |Z|), got {table.shape}")
        if not np.all(np.isfinite(table)):
            raise ValueError("table entries must be finite")
        if self.output_labels is not None and len(self.output_labels) != table.shape[1]:
            raise ValueError("output_labels length must equal the number of outputs")
        table.setflags(write=False)
        object.__setattr__(self, "input_groups", groups)
        object.__setattr__(self, "table", table)
        if self.output_labels is not None:
            object.__setattr__(self, "output_labels", tuple(self.output_labels))

    @property
    def m(self) -> int:
        return len(self.input_groups)

    @property
    def output_size(self) -> int:
        return self.table.shape[1]

    @property
    def input_size(self) -> int:
        return self.table.shape[0]

    @cached_property
    def joint_group(self) -> GroupSpec:
        """The product ``G_1 x ... x G_m``; its element order is the row order."""
        return product(*self.input_groups)

    @property
    def user_sizes(self) -> tuple[int, ...]:
        return tuple(g.size for g in self.input_groups)

    def tensor(self) -> np.ndarray:
        """Table reshaped to ``(|G_1|, ..., |G_m|, |Z|)``."""
        return self.table.reshape(*self.user_sizes, self.output_size)

    def row_index(self, inputs: Sequence[Sequence[int]]) -> int:
        if len(inputs) != self.m:
            raise ValueError(f"expected {self.m} inputs, got {len(inputs)}")
        return int(np.ravel_multi_index([g.index(x) for g, x in zip(self.input_groups, inputs)], self.user_sizes))

    def prob(self, z: int, inputs: Sequence[Sequence[int]]) -> float:
        return float(self.table[self.row_index(inputs), z])


def validate(mac: Mac, tol: float = 1e-9) -> list[str]:
    """Row-sum and range violations, one message per offending entry or row.

    Entries may stray outside ``[0, 1]`` by at most ``tol`` (rounding slack).
    """
    errors = []
    t = mac.table
    for r, c in zip(*np.nonzero((t < -tol) | (t > 1 + tol))):
        errors.append(f"row {r}, output {c}: probability {t[r, c]!r} outside [0, 1]")
    sums = t.sum(axis=1)
    for r in np.nonzero(np.abs(sums - 1) > tol)[0]:
        errors.append(f"row {r}: probabilities sum to {sums[r]!r}, not 1")
    return errors


def from_function(groups: Sequence[GroupSpec], fn, outputs: Sequence | None = None, name: str = "") -> Mac:
    """Deterministic channel ``z = fn(x_1, ..., x_m)`` with hashable outputs.

    Output labels are ``outputs`` if given, else the distinct values of ``fn``
    in order of first appearance over the canonical input order.
    """
    groups = [g if isinstance(g, GroupSpec) else GroupSpec(tuple(g)) for g in groups]
    inputs = [tuple(x) for x in np.ndindex(*(g.size for g in groups))]
    values = [fn(*(g.element(i) for g, i in zip(groups, idx))) for idx in inputs]
    labels = list(outputs) if outputs is not None else list(dict.fromkeys(values))
    pos = {lab: k for k, lab in enumerate(labels)}
    table = np.zeros((len(inputs), len(labels)))
    for r, v in enumerate(values):
        table[r, pos[v]] = 1.0
    return Mac(tuple(groups), table, output_labels=tuple(labels), name=name)


# -- information quantities ---------------------------------------------------

def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def mutual_info(mac: Mac, subset: Subset) -> float:
    """``I(X_S; Z, X_{S^c})`` in bits."""
    mask = as_mask(subset, mac.m)
    if mask == 0:
        raise ValueError("subset must be nonempty")
    joint = mac.tensor() / mac.input_size
    in_s = [i for i in range(mac.m) if mask >> i & 1]
    log_gs = sum(math.log(mac.input_groups[i].size) for i in in_s)
    h_all = _entropy(joint)
    h_rest = _entropy(joint.sum(axis=tuple(in_s)))
    return (log_gs - h_all + h_rest) / math.log(2)


@dataclass(frozen=True)
class RegionReport:
    """``I_S`` for every nonempty ``S``; the symmetric capacity region is
    ``{R : sum_{i in S} R_i <= I_S for all S}``."""

    m: int
    values: dict[int, float]

    def __getitem__(self, subset: Subset) -> float:
        return self.values[as_mask(subset, self.m)]

    @property
    def sum_capacity(self) -> float:
        return self.values[(1 << self.m) - 1]

    def items(self):
        return sorted(self.values.items())


def region(mac: Mac) -> RegionReport:
    return RegionReport(mac.m, {mask: mutual_info(mac, mask) for mask in range(1, 1 << mac.m)})


def two_user_reduction(mac: Mac, subset: Subset) -> Mac:
    """The two-user channel ``G_S x G_{S^c} -> Z`` obtained by grouping users."""
    mask = as_mask(subset, mac.m)
    if mask == 0 or mask == (1 << mac.m) - 1:
        raise ValueError("reduction needs a nonempty proper subset of users")
    s = [i for i in range(mac.m) if mask >> i & 1]
    sc = [i for i in range(mac.m) if not mask >> i & 1]
    t = np.transpose(mac.tensor(), s + sc + [mac.m])
    g_s = product(*(mac.input_groups[i] for i in s))
    g_sc = product(*(mac.input_groups[i] for i in sc))
    return Mac(
        (g_s, g_sc),
        t.reshape(-1, mac.output_size),
        output_labels=mac.output_labels,
        name=f"{mac.name}_S{subset_label(mask, mac.m)}" if mac.name else "",
        metadata=dict(mac.metadata),
    )


# -- two-user view ------------------------------------------------------------

@dataclass(frozen=True)
class SupportSets:
    """Supports of a two-user channel.

    ``y_of_z[z]`` is the set of ``y`` with ``P(y, z) > 0``, ``dy_of_z[z]`` its
    difference set, and ``x_of_z[z]`` the frequencies where some posterior
    ``p_{y,z}`` has a nonzero Fourier coefficient. ``xdy`` is the union of
    ``x_of_z[z] x dy_of_z[z]`` over all outputs.
    """

    yz: frozenset[tuple[Element, int]]
    y_of_z: dict[int, frozenset[Element]]
    dy_of_z: dict[int, frozenset[Element]]
    x_of_z: dict[int, frozenset[Element]]
    xz: frozenset[tuple[Element, int]]
    xdy: frozenset[tuple[Element, Element]]


class TwoUserView:
    """A two-user channel ``(X, Y) -> Z`` with its joint distribution cached."""

    def __init__(self, mac: Mac, tol: Tolerances | None = None):
        if mac.m != 2:
            raise ValueError(f"two-user view needs m = 2, got m = {mac.m}")
        self.mac = mac
        self.tol = resolve(tol)
        self.g1, self.g2 = mac.input_groups
        # P(x, y, z) under uniform inputs
        self.joint = mac.tensor() / mac.input_size
        self.p_yz = self.joint.sum(axis=0)

    @property
    def output_size(self) -> int:
        return self.mac.output_size

    @cached_property
    def support_mask(self) -> np.ndarray:
        """Boolean ``(|G_2|, |Z|)`` array of ``(y, z)`` in the support."""
        return self.p_yz > self.tol.eps_zero

    @cached_property
    def posteriors(self) -> np.ndarray:
        """``post[y, z, x] = P(x | y, z)``; rows outside the support are zero."""
        post = np.zeros((self.g2.size, self.output_size, self.g1.size))
        ys, zs = np.nonzero(self.support_mask)
        post[ys, zs, :] = self.joint[:, ys, zs].T / self.p_yz[ys, zs][:, None]
        return post

    @cached_property
    def posterior_dfts(self) -> np.ndarray:
        """``phat[y, z, xhat]``, the DFT over ``G_1`` of each posterior."""
        return dft_rows(self.g1, self.posteriors)

    def posterior(self, y: Sequence[int], z: int) -> GroupFunction:
        iy = self.g2.index(y)
        if not self.support_mask[iy, z]:
            raise ValueError(f"(y={tuple(y)}, z={z}) is not in the support of the channel")
        return GroupFunction(self.g1, self.posteriors[iy, z])

    def support_set_indices(self):
        """Index-level supports: ``(ys_of_z, xs_of_z)`` lists of index arrays."""
        mask = self.support_mask
        phat_nz = np.abs(self.posterior_dfts) > self.tol.eps_zero
        ys_of_z, xs_of_z = [], []
        for z in range(self.output_size):
            ys = np.nonzero(mask[:, z])[0]
            ys_of_z.append(ys)
            xs_of_z.append(np.nonzero(phat_nz[ys, z, :].any(axis=0))[0] if ys.size else ys)
        return ys_of_z, xs_of_z


def support_sets(view: TwoUserView) -> SupportSets:
    g1, g2 = view.g1, view.g2
    ys_of_z, xs_of_z = view.support_set_indices()
    sub = g2.sub_table
    y_of_z, dy_of_z, x_of_z = {}, {}, {}
    yz, xz, xdy = set(), set(), set()
    for z in range(view.output_size):
        ys, xs = ys_of_z[z], xs_of_z[z]
        y_of_z[z] = frozenset(g2.element(i) for i in ys)
        dys = np.unique(sub[np.ix_(ys, ys)]) if ys.size else ys
        dy_of_z[z] = frozenset(g2.element(i) for i in dys)
        x_of_z[z] = frozenset(g1.element(i) for i in xs)
        yz.update((y, z) for y in y_of_z[z])
        xz.update((x, z) for x in x_of_z[z])
        xdy.update((x, d) for x in x_of_z[z] for d in dy_of_z[z])
    return SupportSets(frozenset(yz), y_of_z, dy_of_z, x_of_z, frozenset(xz), frozenset(xdy))


def posterior(view: TwoUserView, y: Sequence[int], z: int) -> GroupFunction:
    return view.posterior(y, z)


def _cond_mi(joint_abz: np.ndarray) -> float:
    """``I(A; B | Z)`` in bits from a joint table indexed ``[a, b, z]``."""
    h_abz = _entropy(joint_abz)
    h_az = _entropy(joint_abz.sum(axis=1))
    h_bz = _entropy(joint_abz.sum(axis=0))
    h_z = _entropy(joint_abz.sum(axis=(0, 1)))
    return max(0.0, (h_az + h_bz - h_abz - h_z) / math.log(2))


def cond_mutual_info_xy_given_z(view: TwoUserView) -> float:
    return _cond_mi(view.joint)


def cond_mutual_info_shifted(view: TwoUserView, a: int) -> float:
    """``I(X + aY; Y | Z)`` for cyclic ``G_1 = G_2 = Z_q``."""
    (q1,), (q2,) = view.g1.orders, view.g2.orders
    if q1 != q2:
        raise ValueError("shifted conditional information needs G_1 = G_2 = Z_q")
    q = q1
    t = (np.arange(q)[:, None] + a * np.arange(q)[None, :]) % q  # t[x, y] = x + a y
    joint_ty = np.zeros_like(view.joint)
    for x in range(q):
        joint_ty[t[x], np.arange(q), :] += view.joint[x]
    return _cond_mi(joint_ty)
