"""Synthesis of the polarized channels ``W^s`` for sign sequences ``s``.

With ``G = G_1 x ... x G_m`` and uniform ``u``:

    W^-(z1, z2 | u1)     = 1/|G| sum_{u2} W(z1 | u1 + u2) W(z2 | u2)
    W^+(z1, z2, u1 | u2) = 1/|G|          W(z1 | u1 + u2) W(z2 | u2)

The ``W^+`` output index is ``(z1 * |Z| + z2) * |G| + u1``. Without merging,
output alphabets grow as ``|Z|^2`` and ``|Z|^2 |G|`` per level, so by default
outputs with identical input posteriors are merged after every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channel import Mac

SIGNS = ("-", "+")
DEFAULT_MAX_DEPTH = 3


@dataclass(frozen=True)
class SynthesisOptions:
    merge_outputs: bool = True
    merge_tolerance: float = 1e-9
    prune_zero_outputs: bool = True
    keep_labels: bool = False  # label every synthesized output with its (z1, z2[, u1]) origin

    def __post_init__(self):
        if not self.merge_tolerance > 0:
            raise ValueError("merge_tolerance must be positive")


class DepthError(ValueError):
    pass


def parse_signs(text: str | Iterable[str]) -> tuple[str, ...]:
    """``"-+-"`` -> ``('-', '+', '-')``; the empty string is the empty sequence."""
    signs = tuple(text)
    bad = [s for s in signs if s not in SIGNS]
    if bad:
        raise ValueError(f"sign sequence may only contain '-' and '+', got {bad[0]!r}")
    return signs


def all_sequences(n: int) -> list[tuple[str, ...]]:
    """All ``2**n`` sign sequences in lexicographic order ('-' before '+')."""
    if n == 0:
        return [()]
    return [s + (t,) for s in all_sequences(n - 1) for t in SIGNS]


def _labels(mac: Mac) -> Sequence:
    return mac.output_labels if mac.output_labels is not None else range(mac.output_size)


def _shifted(mac: Mac) -> np.ndarray:
    """``A[u1, u2, z] = W(z | u1 + u2)``."""
    return mac.table[mac.joint_group.add_table]


def _finish(mac: Mac, table: np.ndarray, labels, name: str, opts: SynthesisOptions) -> Mac:
    out = Mac(mac.input_groups, table, output_labels=labels, name=name, metadata=dict(mac.metadata))
    if opts.merge_outputs or opts.prune_zero_outputs:
        out = merge_equivalent_outputs(out, opts.merge_tolerance, prune=opts.prune_zero_outputs, merge=opts.merge_outputs)
    return out


def minus(mac: Mac, opts: SynthesisOptions | None = None) -> Mac:
    opts = opts or SynthesisOptions()
    n, nz = mac.input_size, mac.output_size
    table = np.einsum("abz,bw->azw", _shifted(mac), mac.table).reshape(n, nz * nz) / n
    labels = None
    if opts.keep_labels:
        lab = _labels(mac)
        labels = [(a, b) for a in lab for b in lab]
    return _finish(mac, table, labels, f"{mac.name}-" if mac.name else "", opts)


def plus(mac: Mac, opts: SynthesisOptions | None = None) -> Mac:
    opts = opts or SynthesisOptions()
    n, nz = mac.input_size, mac.output_size
    # result[u2, z1, z2, u1]
    table = np.einsum("abz,bw->bzwa", _shifted(mac), mac.table).reshape(n, nz * nz * n) / n
    labels = None
    if opts.keep_labels:
        lab = _labels(mac)
        users = _split_inputs(mac)
        labels = [(a, b, users[u]) for a in lab for b in lab for u in range(n)]
    return _finish(mac, table, labels, f"{mac.name}+" if mac.name else "", opts)


def _split_inputs(mac: Mac) -> list[tuple]:
    """Input row index -> tuple of per-user group elements."""
    out = []
    for idx in np.ndindex(*mac.user_sizes):
        out.append(tuple(g.element(i) for g, i in zip(mac.input_groups, idx)))
    return out


def synthesize(
    mac: Mac,
    signs: str | Sequence[str],
    opts: SynthesisOptions | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Mac:
    """``W^s``, applying the signs left to right."""
    signs = parse_signs(signs)
    if len(signs) > max_depth:
        raise DepthError(f"sign sequence of length {len(signs)} exceeds the depth cap {max_depth}")
    out = mac
    for s in signs:
        out = minus(out, opts) if s == "-" else plus(out, opts)
    return out


def synthesize_level(mac: Mac, n: int, opts: SynthesisOptions | None = None) -> dict[tuple[str, ...], Mac]:
    """All ``W^s`` with ``|s| = n``, sharing intermediate channels."""
    level = {(): mac}
    for _ in range(n):
        level = {s + (t,): (minus if t == "-" else plus)(w, opts) for s, w in level.items() for t in SIGNS}
    return level


def merge_equivalent_outputs(mac: Mac, tol: float = 1e-9, prune: bool = True, merge: bool = True) -> Mac:
    """Combine outputs whose input posteriors agree entrywise within ``tol``.

    Candidate groups come from posteriors rounded to ``ceil(-log10 tol)``
    digits; each member is then compared with its group representative at the
    true tolerance and split off if it differs. Zero-probability outputs are
    dropped when ``prune`` is set. Merged outputs keep the position of their
    first member; a merged output's label is the tuple of its members' labels.
    """
    t = mac.table
    totals = t.sum(axis=0)
    # rep[c] is the first column of c's group, -1 if c is dropped
    rep = np.arange(mac.output_size)
    if prune:
        rep[totals <= 0] = -1
    if merge:
        positive = np.nonzero(totals > 0)[0]
        if positive.size:
            post = t[:, positive] / totals[positive]
            rep[positive] = positive[_cluster(post.T, tol)]
    kept = rep >= 0
    if kept.all() and np.array_equal(rep, np.arange(mac.output_size)):
        return mac
    return _regroup(mac, rep)


def _cluster(rows: np.ndarray, tol: float) -> np.ndarray:
    """For each row, the index of the first row of its cluster.

    Every row is within ``tol`` (max-norm) of its cluster representative.
    """
    digits = max(0, math.ceil(-math.log10(tol)))
    keys = np.ascontiguousarray(np.round(rows, digits) + 0.0)
    void = keys.view(np.dtype((np.void, keys.dtype.itemsize * keys.shape[1]))).ravel()
    _, first, inverse = np.unique(void, return_index=True, return_inverse=True)
    rep = first[inverse.ravel()]
    bad = np.nonzero(np.abs(rows - rows[rep]).max(axis=1) > tol)[0]
    # stragglers whose rounded key collided with a too-distant representative
    reps: list[int] = []
    for i in bad:
        for r in reps:
            if np.abs(rows[i] - rows[r]).max() <= tol:
                rep[i] = r
                break
        else:
            reps.append(int(i))
            rep[i] = i
    return rep


def _regroup(mac: Mac, rep: np.ndarray) -> Mac:
    """Sum columns into groups keyed by representative column; ``rep < 0`` drops."""
    cols = np.nonzero(rep >= 0)[0]
    heads, group = np.unique(rep[cols], return_inverse=True)
    table = np.zeros((mac.input_size, heads.size))
    np.add.at(table.T, group.ravel(), mac.table[:, cols].T)
    labels = None
    if mac.output_labels is not None:
        members: dict[int, list[int]] = {}
        for c, h in zip(cols, rep[cols]):
            members.setdefault(int(h), []).append(int(c))
        labels = []
        for h in heads:
            g = members[int(h)]
            labels.append(mac.output_labels[g[0]] if len(g) == 1 else tuple(mac.output_labels[c] for c in g))
    return Mac(mac.input_groups, table, output_labels=labels, name=mac.name, metadata=dict(mac.metadata))
