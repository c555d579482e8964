"""Seeded random channel families used for cross-validation.

Rows are uniform samples from the probability simplex. A fixed fraction of
channels get some rows with a forced zero entry so that support-set edge cases
are exercised. The seed and index of every channel are stored in its metadata.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .abelian import GroupSpec
from .channel import Mac
from .standard import noisy_combination, separate_observations

CORPUS_SEED = 20161207
DEGENERATE_FRACTION = 0.2

# (G_1, G_2) pairs with |G_1| |G_2| <= 12
SMALL_GROUP_PAIRS: list[tuple[tuple[int, ...], tuple[int, ...]]] = [
    ((2,), (2,)), ((2,), (3,)), ((3,), (2,)), ((3,), (3,)),
    ((2,), (4,)), ((4,), (2,)), ((2, 2), (2,)), ((2,), (2, 2)),
    ((2,), (5,)), ((5,), (2,)), ((2,), (6,)), ((6,), (2,)),
    ((3,), (4,)), ((4,), (3,)), ((2, 2), (3,)), ((3,), (2, 2)),
]


def random_rows(rng: np.random.Generator, n_rows: int, n_out: int, degenerate: bool = False) -> np.ndarray:
    rows = rng.dirichlet(np.ones(n_out), size=n_rows)
    if degenerate and n_out > 1:
        hit = rng.random(n_rows) < 0.5
        hit[rng.integers(n_rows)] = True
        cols = rng.integers(n_out, size=n_rows)
        rows[hit, cols[hit]] = 0.0
        rows /= rows.sum(axis=1, keepdims=True)
    return rows


def random_mac(
    rng: np.random.Generator,
    groups: Sequence,
    output_size: int,
    degenerate: bool = False,
    name: str = "",
    metadata: dict | None = None,
) -> Mac:
    groups = tuple(g if isinstance(g, GroupSpec) else GroupSpec(tuple(g)) for g in groups)
    n = int(np.prod([g.size for g in groups]))
    return Mac(groups, random_rows(rng, n, output_size, degenerate), name=name, metadata=dict(metadata or {}))


def random_corpus(count: int = 100, seed: int = CORPUS_SEED) -> list[Mac]:
    """Two-user channels over ``SMALL_GROUP_PAIRS`` with 2 to 4 outputs.

    Output alphabets are capped at 3 when ``|G_1| |G_2| > 8`` to bound the size
    of depth-2 synthesized channels.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        g1, g2 = SMALL_GROUP_PAIRS[i % len(SMALL_GROUP_PAIRS)]
        size = int(np.prod(g1)) * int(np.prod(g2))
        n_out = int(rng.integers(2, 5 if size <= 8 else 4))
        degenerate = bool(rng.random() < DEGENERATE_FRACTION)
        out.append(random_mac(rng, (g1, g2), n_out, degenerate, name=f"random-{i}",
                              metadata={"seed": seed, "index": i, "degenerate": degenerate}))
    return out


def coprime_corpus(count: int = 50, seed: int = CORPUS_SEED + 1) -> list[Mac]:
    """Channels on ``Z_2 x Z_3``; every third one makes ``X`` and ``Y`` independent given ``Z``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        meta = {"seed": seed, "index": i}
        kind = i % 3
        if kind == 2:
            kx = rng.dirichlet(np.ones(int(rng.integers(2, 4))), size=2)
            ky = rng.dirichlet(np.ones(int(rng.integers(2, 4))), size=3)
            mac = separate_observations(((2,), (3,)), kx, ky)
            out.append(Mac(mac.input_groups, mac.table, name=f"coprime-sep-{i}", metadata=meta))
        else:
            out.append(random_mac(rng, ((2,), (3,)), int(rng.integers(2, 5)), degenerate=kind == 1,
                                  name=f"coprime-{i}", metadata=meta))
    return out


def prime_field_structured(count: int = 50, q: int = 3, seed: int = CORPUS_SEED + 2) -> list[Mac]:
    """``Z ~ kernel[X + aY]`` for random ``a`` in ``F_q`` and random kernels."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        a = int(rng.integers(q))
        kernel = random_rows(rng, q, int(rng.integers(2, 5)), degenerate=bool(rng.random() < DEGENERATE_FRACTION))
        mac = noisy_combination(q, a, kernel)
        out.append(Mac(mac.input_groups, mac.table, name=f"fq-structured-{i}",
                       metadata={"seed": seed, "index": i, "a": a}))
    return out


def prime_field_random(count: int = 50, q: int = 3, seed: int = CORPUS_SEED + 3) -> list[Mac]:
    rng = np.random.default_rng(seed)
    return [
        random_mac(rng, ((q,), (q,)), int(rng.integers(2, 5)), degenerate=bool(rng.random() < DEGENERATE_FRACTION),
                   name=f"fq-random-{i}", metadata={"seed": seed, "index": i})
        for i in range(count)
    ]


def structured_corpus(count: int = 20, seed: int = CORPUS_SEED + 4) -> list[Mac]:
    """Channels built to be compatible: ``kernel[X + aY]`` on ``Z_q`` for q in 2..5,
    alternating with conditionally independent observations on small group pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        meta = {"seed": seed, "index": i}
        if i % 2 == 0:
            q = 2 + (i // 2) % 4
            a = int(rng.integers(q))
            kernel = random_rows(rng, q, int(rng.integers(2, 4)), degenerate=bool(rng.random() < 0.3))
            mac = noisy_combination(q, a, kernel)
            meta["a"] = a
        else:
            g1, g2 = SMALL_GROUP_PAIRS[(i // 2) % 8]
            n1, n2 = int(np.prod(g1)), int(np.prod(g2))
            mac = separate_observations((g1, g2), rng.dirichlet(np.ones(2), size=n1), rng.dirichlet(np.ones(2), size=n2))
        out.append(Mac(mac.input_groups, mac.table, name=f"structured-{i}", metadata=meta))
    return out
