"""Brute-force ground truth for preservation questions.

Everything here is computed by synthesizing the polarized channels and
evaluating mutual informations directly, independent of the Fourier criterion
in ``compat``. The one exception, ``depth1_fourier_check``, is the single-step
Fourier condition, kept here so that it can be compared against the direct
``depth1_check``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import Mac, Subset, TwoUserView, as_mask, mutual_info, subset_label
from .polarize import DEFAULT_MAX_DEPTH, DepthError, SynthesisOptions, minus, plus
from .tolerances import Tolerances, resolve


@dataclass(frozen=True)
class Depth1Result:
    lhs: float  # I_1(W^-) + I_1(W^+)
    rhs: float  # 2 I_1(W)
    preserved: bool

    @property
    def deficit(self) -> float:
        return self.rhs - self.lhs


def depth1_check(view: TwoUserView, tol: Tolerances | None = None, opts: SynthesisOptions | None = None) -> Depth1Result:
    tol = resolve(tol) if tol is not None else view.tol
    w = view.mac
    lhs = mutual_info(minus(w, opts), 1) + mutual_info(plus(w, opts), 1)
    rhs = 2 * mutual_info(w, 1)
    return Depth1Result(lhs, rhs, abs(lhs - rhs) < tol.oracle)


def find_depth1_violation(view: TwoUserView, tol: Tolerances | None = None) -> dict | None:
    """First quadruple breaking the single-step Fourier condition, if any.

    The condition: whenever ``y1 - y2 = y1' - y2'`` with ``y1, y1'`` in the
    support of ``z1`` and ``y2, y2'`` in the support of ``z2``,
    ``phat_{y1,z1} conj(phat_{y2,z2}) = phat_{y1',z1} conj(phat_{y2',z2})``
    at every frequency.
    """
    tol = resolve(tol) if tol is not None else view.tol
    g1, g2 = view.g1, view.g2
    phat = view.posterior_dfts
    mask = view.support_mask
    add = g2.add_table
    nz = view.output_size
    for z1 in range(nz):
        for z2 in range(nz):
            for v in range(g2.size):
                # y2 ranges over Y^{z2} with y1 = y2 + v in Y^{z1}
                y2s = np.nonzero(mask[:, z2] & mask[add[:, v], z1])[0]
                if y2s.size < 2:
                    continue
                y1s = add[y2s, v]
                prods = phat[y1s, z1, :] * np.conj(phat[y2s, z2, :])
                gap = np.abs(prods - prods[0]).max(axis=1)
                k = int(np.argmax(gap))
                if gap[k] > tol.ratio:
                    ix = int(np.argmax(np.abs(prods[k] - prods[0])))
                    return {
                        "z1": z1, "z2": z2, "xhat": g1.element(ix),
                        "y1": g2.element(y1s[0]), "y2": g2.element(y2s[0]),
                        "y1_prime": g2.element(y1s[k]), "y2_prime": g2.element(y2s[k]),
                        "lhs": complex(prods[0, ix]), "rhs": complex(prods[k, ix]),
                    }
    return None


def depth1_fourier_check(view: TwoUserView, tol: Tolerances | None = None) -> bool:
    return find_depth1_violation(view, tol) is None


@dataclass
class PreservationProbe:
    subset: int
    depth: int
    values: dict[tuple[str, ...], float]  # I_S(W^s) for each sign sequence of length ``depth``
    reference: float  # I_S(W)

    def __post_init__(self):
        if len(self.values) != 2 ** self.depth:
            raise ValueError(f"expected {2 ** self.depth} sequences at depth {self.depth}, got {len(self.values)}")

    @property
    def average(self) -> float:
        return float(np.mean([self.values[s] for s in sorted(self.values)]))

    @property
    def deficit(self) -> float:
        return self.reference - self.average


def probe_levels(
    mac: Mac,
    subset: Subset,
    max_depth: int,
    opts: SynthesisOptions | None = None,
    depth_cap: int = DEFAULT_MAX_DEPTH,
) -> list[PreservationProbe]:
    """Probes at depths ``0..max_depth``, reusing each level to build the next."""
    if max_depth > depth_cap:
        raise DepthError(f"depth {max_depth} exceeds the cap {depth_cap}")
    mask = as_mask(subset, mac.m)
    reference = mutual_info(mac, mask)
    level = {(): mac}
    probes = [PreservationProbe(mask, 0, {(): reference}, reference)]
    for n in range(1, max_depth + 1):
        level = {s + (t,): w2 for s, w in level.items() for t, w2 in (("-", minus(w, opts)), ("+", plus(w, opts)))}
        probes.append(PreservationProbe(mask, n, {s: mutual_info(w, mask) for s, w in level.items()}, reference))
    return probes


def average_probe(
    mac: Mac,
    subset: Subset,
    n: int,
    opts: SynthesisOptions | None = None,
    depth_cap: int = DEFAULT_MAX_DEPTH,
) -> PreservationProbe:
    return probe_levels(mac, subset, n, opts, depth_cap)[-1]


@dataclass
class OracleVerdict:
    subset: int
    max_depth: int
    preserved: bool  # no loss observed at any depth <= max_depth
    probes: list[PreservationProbe] = field(default_factory=list)
    tolerance: float = 1e-6

    @property
    def first_loss_depth(self) -> int | None:
        for p in self.probes:
            if abs(p.deficit) >= self.tolerance:
                return p.depth
        return None


def oracle_verdict(
    mac: Mac,
    subset: Subset = 1,
    max_depth: int = 2,
    tol: Tolerances | None = None,
    opts: SynthesisOptions | None = None,
) -> OracleVerdict:
    """Direct test of ``sum_s I_S(W^s) / 2^n = I_S(W)`` for ``n <= max_depth``.

    Loss that first appears deeper than ``max_depth`` is not detected.
    """
    tol = resolve(tol)
    probes = probe_levels(mac, subset, max_depth, opts, depth_cap=max(max_depth, DEFAULT_MAX_DEPTH))
    preserved = all(abs(p.deficit) < tol.oracle for p in probes)
    return OracleVerdict(as_mask(subset, mac.m), max_depth, preserved, probes, tolerance=tol.oracle)


def describe_probe(p: PreservationProbe, m: int) -> str:
    return (f"S={subset_label(p.subset, m)} n={p.depth}: average {p.average:.6f}, "
            f"reference {p.reference:.6f}, deficit {p.deficit:.3e}")
