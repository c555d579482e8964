"""Independent reference computations shared by the test modules.

These avoid the package's vectorized code paths: group arithmetic is done on
plain tuples, characters via ``cmath`` and exact ``Fraction`` pairings, and
information quantities by summing over explicit joint-distribution dicts.
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections import defaultdict
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from macpolar import GroupSpec, Mac


def elements(orders):
    return list(itertools.product(*[range(n) for n in orders]))


def add(orders, a, b):
    return tuple((x + y) % n for x, y, n in zip(a, b, orders))


def character(orders, xhat, x, sign=-1):
    turns = sum(Fraction(a * b, n) for a, b, n in zip(xhat, x, orders))
    return cmath.exp(sign * 2j * cmath.pi * float(turns % 1))


def naive_dft(orders, f: dict) -> dict:
    return {xh: sum(f[x] * character(orders, xh, x) for x in elements(orders)) for xh in elements(orders)}


def joint_dict(mac: Mac) -> dict:
    """``P(x_1, ..., x_m, z)`` under uniform inputs, keyed by ``(inputs, z)``."""
    users = [elements(g.orders) for g in mac.input_groups]
    n = math.prod(len(u) for u in users)
    out = {}
    for r, xs in enumerate(itertools.product(*users)):
        for z in range(mac.output_size):
            p = mac.table[r, z] / n
            if p > 0:
                out[(xs, z)] = p
    return out


def entropy(dist: dict) -> float:
    return -sum(p * math.log2(p) for p in dist.values() if p > 0)


def marginal(joint: dict, key) -> dict:
    out = defaultdict(float)
    for k, p in joint.items():
        out[key(k)] += p
    return out


def brute_mutual_info(mac: Mac, users: set[int]) -> float:
    """``I(X_S; Z | X_{S^c})`` from the entropy chain rule on explicit dicts."""
    joint = joint_dict(mac)
    rest = [i for i in range(mac.m) if i + 1 not in users]
    h_z_rest = entropy(marginal(joint, lambda k: (tuple(k[0][i] for i in rest), k[1])))
    h_rest = entropy(marginal(joint, lambda k: tuple(k[0][i] for i in rest)))
    h_all = entropy(marginal(joint, lambda k: k))
    h_x = entropy(marginal(joint, lambda k: k[0]))
    # I = H(Z | X_rest) - H(Z | X)
    return (h_z_rest - h_rest) - (h_all - h_x)


def brute_polar_pair(mac: Mac):
    """``W^-`` and ``W^+`` as dicts ``{(input, output): prob}`` from the combining map
    ``(u1, u2) -> (u1 + u2, u2)`` on the joint input group."""
    orders = [o for g in mac.input_groups for o in g.orders]
    ranks = [g.rank for g in mac.input_groups]
    G = elements(orders)
    rows = {x: i for i, x in enumerate(G)}
    nz = mac.output_size
    w_minus = defaultdict(float)
    w_plus = defaultdict(float)
    for u1 in G:
        for u2 in G:
            x1 = add(orders, u1, u2)
            for z1 in range(nz):
                for z2 in range(nz):
                    p = mac.table[rows[x1], z1] * mac.table[rows[u2], z2] / len(G)
                    w_minus[(u1, (z1, z2))] += p
                    w_plus[(u2, (z1, z2, u1))] += p
    return dict(w_minus), dict(w_plus), ranks


def dict_channel_mutual_info(w: dict, ranks: list[int], users: set[int]) -> float:
    """``I_S`` for a channel stored as ``{(joint input, output): W(output | input)}``."""
    inputs = {k[0] for k in w}
    n = len(inputs)
    bounds = np.cumsum([0] + ranks)

    def part(x, i):
        return x[bounds[i]:bounds[i + 1]]

    joint = {k: p / n for k, p in w.items() if p > 0}
    rest = [i for i in range(len(ranks)) if i + 1 not in users]
    h_z_rest = entropy(marginal(joint, lambda k: (tuple(part(k[0], i) for i in rest), k[1])))
    h_rest = entropy(marginal(joint, lambda k: tuple(part(k[0], i) for i in rest)))
    h_all = entropy(marginal(joint, lambda k: k))
    h_x = entropy(marginal(joint, lambda k: k[0]))
    return (h_z_rest - h_rest) - (h_all - h_x)


# -- hypothesis strategies --------------------------------------------------

small_orders = st.lists(st.integers(1, 4), min_size=1, max_size=3).filter(lambda o: math.prod(o) <= 24)


@st.composite
def random_two_user(draw, max_product=12, max_outputs=4, allow_zeros=True):
    g1 = draw(st.sampled_from([(2,), (3,), (4,), (2, 2)]))
    g2 = draw(st.sampled_from([(2,), (3,), (4,), (2, 2)]).filter(lambda g: math.prod(g) * math.prod(g1) <= max_product))
    nz = draw(st.integers(1, max_outputs))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    rows = rng.dirichlet(np.ones(nz), size=math.prod(g1) * math.prod(g2))
    if allow_zeros and nz > 1 and draw(st.booleans()):
        rows[rng.random(rows.shape) < 0.3] = 0.0
        rows[rows.sum(axis=1) == 0, 0] = 1.0
        rows /= rows.sum(axis=1, keepdims=True)
    return Mac((GroupSpec(g1), GroupSpec(g2)), rows, name=f"hyp-{seed}")


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
