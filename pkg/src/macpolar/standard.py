"""A small catalog of channels with known behaviour under polarization."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .abelian import GroupSpec
from .channel import Mac, from_function

Z2 = GroupSpec((2,))


def _groups(groups) -> list[GroupSpec]:
    return [g if isinstance(g, GroupSpec) else GroupSpec(tuple(g)) for g in groups]


def binary_adder() -> Mac:
    """``Z = X + Y`` over the integers, binary inputs."""
    return from_function([Z2, Z2], lambda x, y: x[0] + y[0], outputs=[0, 1, 2], name="bac")


def and_channel() -> Mac:
    """``Z = X AND Y``."""
    return from_function([Z2, Z2], lambda x, y: x[0] & y[0], outputs=[0, 1], name="and")


def identity(groups: Sequence) -> Mac:
    """Noiseless channel ``Z = (X_1, ..., X_m)``."""
    groups = _groups(groups)
    return from_function(groups, lambda *xs: tuple(xs), name="identity")


def pure_noise(groups: Sequence, output_dist: Sequence[float] = (0.5, 0.5)) -> Mac:
    """Output independent of every input."""
    groups = _groups(groups)
    n = int(np.prod([g.size for g in groups]))
    return Mac(tuple(groups), np.tile(np.asarray(output_dist, dtype=float), (n, 1)), name="noise")


def noisy_combination(q: int, a: int, kernel: np.ndarray) -> Mac:
    """Two users on ``Z_q``; output drawn from ``kernel[x + a*y mod q]``."""
    g = GroupSpec((q,))
    kernel = np.asarray(kernel, dtype=float)
    rows = [kernel[(x + a * y) % q] for x in range(q) for y in range(q)]
    return Mac((g, g), np.array(rows), name=f"noisy_sum_a{a}")


def separate_observations(groups: Sequence, kernel_x: np.ndarray, kernel_y: np.ndarray) -> Mac:
    """Output ``(Z_x, Z_y)`` with ``Z_x ~ kernel_x[x]`` and ``Z_y ~ kernel_y[y]`` drawn independently.

    ``X`` and ``Y`` are independent given the output.
    """
    g1, g2 = _groups(groups)
    kx, ky = np.asarray(kernel_x, dtype=float), np.asarray(kernel_y, dtype=float)
    rows = [np.outer(kx[x], ky[y]).ravel() for x in range(g1.size) for y in range(g2.size)]
    return Mac((g1, g2), np.array(rows), name="separate")


def z2_z4_conflict() -> Mac:
    """Two users on ``Z_2 x Z_4`` whose Fourier ratios are consistent but not extendable.

    Per output the posterior ratios are well defined (value -1 at difference 1
    and, separately, at difference 2), yet a homomorphism in ``y`` would force
    ``F(1, 2) = F(1, 1)^2 = 1``. A single polarization step loses nothing; the
    loss appears from depth 2 on.
    """
    labels = ["a0", "a1", "b0", "b1", "c0", "c1"]
    t = np.zeros((8, 6))
    for x in range(2):
        for y in range(4):
            r = 4 * x + y
            if y == 0:
                t[r, x] = t[r, 2 + x] = 0.5
            elif y == 1:
                t[r, 1 - x] = 1.0
            elif y == 2:
                t[r, 3 - x] = 1.0
            else:
                t[r, 4 + x] = 1.0
    return Mac((Z2, GroupSpec((4,))), t, output_labels=tuple(labels), name="conflict_z2z4")
