"""Deciding whether polarization keeps ``I_1`` of a two-user MAC.

The test works on the Fourier transforms ``phat_{y,z}`` of the posteriors
``P(X = . | Y = y, Z = z)``:

1. ``fingerprint`` checks that for every output ``z`` and every frequency
   ``xhat`` where some ``phat_{y,z}`` is nonzero, all of them are nonzero and
   their pairwise ratios are unit complex numbers that depend only on
   ``(xhat, y1 - y2)``. That table is the fingerprint.
2. ``extend_to_pseudo_quadratic`` closes the fingerprint under
   ``F(x, y1 + y2) = F(x, y1) F(x, y2)`` and ``F(x1 + x2, y) = F(x1, y) F(x2, y)``.
   A clash between a derived value and an existing one means no extension
   that is a homomorphism in each argument exists.

The channel is compatible exactly when both steps succeed; the closed table is
then the witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .abelian import Element, GroupSpec
from .channel import (
    Mac,
    SupportSets,
    TwoUserView,
    Subset,
    as_mask,
    cond_mutual_info_shifted,
    cond_mutual_info_xy_given_z,
    proper_subsets,
    support_sets,
    two_user_reduction,
)
from .polarize import SynthesisOptions, synthesize
from .tolerances import Tolerances, resolve

ILL_DEFINED = "fingerprint-ill-defined"
CONFLICT = "extension-conflict"


class IllDefinedFingerprint(Exception):
    """The posterior DFT ratios do not define a unimodular function of ``(xhat, y1 - y2)``."""

    def __init__(self, check: str, message: str, evidence: dict):
        self.check = check
        self.evidence = evidence
        super().__init__(message)


class ExtensionConflict(Exception):
    """Closing the fingerprint under the product rules produced two different values."""

    def __init__(self, message: str, evidence: dict):
        self.evidence = evidence
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class PseudoQuadFunction:
    """A unit-circle valued table ``F`` on a domain ``D`` in ``G_1 x G_2``.

    Nothing is enforced at construction; ``is_pseudo_quadratic`` decides
    whether the candidate qualifies.
    """

    g1: GroupSpec
    g2: GroupSpec
    values: dict[tuple[Element, Element], complex]

    @property
    def domain(self) -> frozenset[tuple[Element, Element]]:
        return frozenset(self.values)

    def __call__(self, xhat, y) -> complex:
        return self.values[(tuple(xhat), tuple(y))]

    def __contains__(self, key) -> bool:
        xhat, y = key
        return (tuple(xhat), tuple(y)) in self.values

    def __len__(self) -> int:
        return len(self.values)

    def row(self, xhat) -> dict[Element, complex]:
        xhat = tuple(xhat)
        return {y: v for (x, y), v in self.values.items() if x == xhat}

    def column(self, y) -> dict[Element, complex]:
        y = tuple(y)
        return {x: v for (x, yy), v in self.values.items() if yy == y}

    def phase_table(self) -> list[tuple[Element, Element, float]]:
        """``(xhat, y, turns)`` with ``F = exp(2j*pi*turns)``, ``turns`` in ``[0, 1)``."""
        out = []
        for (x, y) in sorted(self.values):
            turns = (np.angle(self.values[(x, y)]) / (2 * np.pi)) % 1.0
            if turns > 1 - 1e-12:
                turns = 0.0
            out.append((x, y, float(turns)))
        return out


@dataclass(frozen=True, eq=False)
class Fingerprint:
    support: SupportSets
    function: PseudoQuadFunction

    @property
    def values(self) -> dict[tuple[Element, Element], complex]:
        return self.function.values

    @property
    def domain(self):
        return self.function.domain


@dataclass
class CompatFailure:
    stage: str
    message: str
    evidence: dict = field(default_factory=dict)


@dataclass
class CompatReport:
    compatible: bool
    witness: PseudoQuadFunction | None = None
    failure: CompatFailure | None = None
    fingerprint: Fingerprint | None = None
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self):
        if (self.witness is None) == (self.failure is None):
            raise ValueError("exactly one of witness and failure must be set")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"compatible": self.compatible}
        if self.witness is not None:
            out["witness"] = [
                {"xhat": list(x), "y": list(y), "turns": t} for x, y, t in self.witness.phase_table()
            ]
        if self.failure is not None:
            out["failure"] = {
                "stage": self.failure.stage,
                "message": self.failure.message,
                "evidence": _jsonable(self.failure.evidence),
            }
        if self.diagnostics:
            out["diagnostics"] = list(self.diagnostics)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


# -- fingerprint ----------------------------------------------------------------

def _fingerprint_indices(view: TwoUserView, tol: Tolerances) -> dict[tuple[int, int], complex]:
    g1, g2 = view.g1, view.g2
    phat = view.posterior_dfts
    sub = g2.sub_table
    ys_of_z, xs_of_z = view.support_set_indices()
    table: dict[tuple[int, int], complex] = {}
    origin: dict[tuple[int, int], tuple[int, int, int]] = {}
    for z in range(view.output_size):
        ys, xs = ys_of_z[z], xs_of_z[z]
        for ix in xs:
            v = phat[ys, z, ix]
            small = np.nonzero(np.abs(v) <= tol.eps_zero)[0]
            if small.size:
                iy = int(ys[small[0]])
                nz = int(ys[np.argmax(np.abs(v))])
                raise IllDefinedFingerprint(
                    "nonvanishing",
                    f"output {z}: at xhat={g1.element(ix)} the transform of the posterior for "
                    f"y={g2.element(iy)} vanishes while the one for y={g2.element(nz)} does not",
                    {"z": z, "xhat": g1.element(ix), "y_zero": g2.element(iy), "y_nonzero": g2.element(nz),
                     "value_zero": complex(phat[iy, z, ix]), "value_nonzero": complex(phat[nz, z, ix])},
                )
            ratios = v[:, None] / v[None, :]
            off = np.abs(np.abs(ratios) - 1.0)
            if off.max() > tol.ratio:
                i, j = np.unravel_index(np.argmax(off), off.shape)
                raise IllDefinedFingerprint(
                    "unimodular",
                    f"output {z}: ratio of posterior transforms at xhat={g1.element(ix)} for "
                    f"y={g2.element(int(ys[i]))} and y={g2.element(int(ys[j]))} has modulus {abs(ratios[i, j]):.9g}",
                    {"z": z, "xhat": g1.element(ix), "y1": g2.element(int(ys[i])), "y2": g2.element(int(ys[j])),
                     "ratio": complex(ratios[i, j])},
                )
            for i, y1 in enumerate(ys):
                for j, y2 in enumerate(ys):
                    key = (int(ix), int(sub[y1, y2]))
                    r = complex(ratios[i, j])
                    if key not in table:
                        table[key] = r
                        origin[key] = (z, int(y1), int(y2))
                    elif abs(table[key] - r) > tol.ratio:
                        z0, a0, b0 = origin[key]
                        raise IllDefinedFingerprint(
                            "consistency",
                            f"ratio at xhat={g1.element(ix)}, difference {g2.element(key[1])} is "
                            f"{table[key]:.9g} from (z={z0}, y1={g2.element(a0)}, y2={g2.element(b0)}) but {r:.9g} "
                            f"from (z={z}, y1={g2.element(int(y1))}, y2={g2.element(int(y2))})",
                            {"xhat": g1.element(ix), "difference": g2.element(key[1]),
                             "first": {"z": z0, "y1": g2.element(a0), "y2": g2.element(b0), "ratio": table[key]},
                             "second": {"z": z, "y1": g2.element(int(y1)), "y2": g2.element(int(y2)), "ratio": r}},
                        )
    return table


def fingerprint(view: TwoUserView, tol: Tolerances | None = None) -> Fingerprint:
    """The unique unimodular ``f`` with ``phat_{y1,z} = f(xhat, y1 - y2) phat_{y2,z}``.

    Raises ``IllDefinedFingerprint`` naming the first failed check.
    """
    tol = resolve(tol) if tol is not None else view.tol
    table = _fingerprint_indices(view, tol)
    g1, g2 = view.g1, view.g2
    values = {(g1.element(ix), g2.element(iy)): v for (ix, iy), v in sorted(table.items())}
    return Fingerprint(support_sets(view), PseudoQuadFunction(g1, g2, values))


# -- pseudo-quadratic functions ------------------------------------------------

def pseudo_quadratic_violation(F: PseudoQuadFunction, tol: float = 1e-7) -> str | None:
    """Why ``F`` is not pseudo-quadratic, or ``None`` if it is."""
    g1, g2 = F.g1, F.g2
    rows: dict[Element, dict[Element, complex]] = {}
    cols: dict[Element, dict[Element, complex]] = {}
    for (x, y), v in F.values.items():
        if abs(abs(v) - 1.0) > tol:
            return f"F({x}, {y}) = {v:.9g} is not on the unit circle"
        rows.setdefault(x, {})[y] = v
        cols.setdefault(y, {})[x] = v
    for x, row in sorted(rows.items()):
        if not g2.is_subgroup(row):
            return f"row section at x={x} is {sorted(row)}, not a subgroup"
        for a in row:
            for b in row:
                if abs(row[g2.add(a, b)] - row[a] * row[b]) > tol:
                    return f"y -> F({x}, y) is not a homomorphism at y={a}, {b}"
    for y, col in sorted(cols.items()):
        if not g1.is_subgroup(col):
            return f"column section at y={y} is {sorted(col)}, not a subgroup"
        for a in col:
            for b in col:
                if abs(col[g1.add(a, b)] - col[a] * col[b]) > tol:
                    return f"x -> F(x, {y}) is not a homomorphism at x={a}, {b}"
    return None


def is_pseudo_quadratic(F: PseudoQuadFunction, tol: float = 1e-7) -> bool:
    return pseudo_quadratic_violation(F, tol) is None


def extend_to_pseudo_quadratic(fp: Fingerprint | PseudoQuadFunction, tol: float = 1e-7) -> PseudoQuadFunction:
    """Close a fingerprint under the two product rules.

    Rounds apply the row rule to every pair ``y1 <= y2`` of each row, then the
    column rule to every pair of each column, rows and columns visited in
    canonical order, until nothing new is defined. Raises ``ExtensionConflict``
    on the first derived value that disagrees with the table.
    """
    F0 = fp.function if isinstance(fp, Fingerprint) else fp
    g1, g2 = F0.g1, F0.g2
    add1, add2 = g1.add_table, g2.add_table
    table = {(g1.index(x), g2.index(y)): v for (x, y), v in F0.values.items()}
    if not table:
        table[(0, 0)] = 1.0 + 0j
    rows: dict[int, set[int]] = {}
    cols: dict[int, set[int]] = {}
    for ix, iy in table:
        rows.setdefault(ix, set()).add(iy)
        cols.setdefault(iy, set()).add(ix)

    def assign(key, value, rule, parts):
        if key in table:
            if abs(table[key] - value) > tol:
                x, y = g1.element(key[0]), g2.element(key[1])
                sources = [(g1.element(a), g2.element(b)) for a, b in parts]
                raise ExtensionConflict(
                    f"rule {rule} derives F({x}, {y}) = {value:.9g} as the product of F at {sources[0]} "
                    f"and {sources[1]}, but it is already {table[key]:.9g}",
                    {"rule": rule, "xhat": x, "y": y, "existing": table[key], "derived": value, "from": sources},
                )
            return False
        table[key] = value
        rows.setdefault(key[0], set()).add(key[1])
        cols.setdefault(key[1], set()).add(key[0])
        return True

    for _ in range(g1.size * g2.size + 1):
        changed = False
        for ix in sorted(rows):
            ys = sorted(rows[ix])
            for a_pos, a in enumerate(ys):
                for b in ys[a_pos:]:
                    key = (ix, int(add2[a, b]))
                    changed |= assign(key, table[(ix, a)] * table[(ix, b)], "R1", [(ix, a), (ix, b)])
        for iy in sorted(cols):
            xs = sorted(cols[iy])
            for a_pos, a in enumerate(xs):
                for b in xs[a_pos:]:
                    key = (int(add1[a, b]), iy)
                    changed |= assign(key, table[(a, iy)] * table[(b, iy)], "R2", [(a, iy), (b, iy)])
        if not changed:
            break
    F = PseudoQuadFunction(g1, g2, {(g1.element(ix), g2.element(iy)): v for (ix, iy), v in sorted(table.items())})
    problem = pseudo_quadratic_violation(F, tol)
    if problem is not None:
        raise ExtensionConflict(f"closure is not pseudo-quadratic: {problem}", {})
    return F


def witness_residual(view: TwoUserView, F: PseudoQuadFunction) -> float:
    """Largest ``|phat_{y1,z}(xhat) - F(xhat, y1 - y2) phat_{y2,z}(xhat)|`` over the support."""
    g1, g2 = view.g1, view.g2
    phat = view.posterior_dfts
    sub = g2.sub_table
    lookup = {(g1.index(x), g2.index(y)): v for (x, y), v in F.values.items()}
    ys_of_z, xs_of_z = view.support_set_indices()
    worst = 0.0
    for z in range(view.output_size):
        for ix in xs_of_z[z]:
            for y1 in ys_of_z[z]:
                for y2 in ys_of_z[z]:
                    f = lookup.get((int(ix), int(sub[y1, y2])))
                    if f is None:
                        return math.inf
                    worst = max(worst, abs(phat[y1, z, ix] - f * phat[y2, z, ix]))
    return worst


# -- the decision ---------------------------------------------------------------

def alternating_sequences(depth: int) -> list[tuple[str, ...]]:
    """``(-,), (-, +), (-, +, -), ...`` up to ``depth`` signs."""
    return [tuple("-+"[i % 2] for i in range(n)) for n in range(1, depth + 1)]


def check_compatibility(
    view: TwoUserView,
    tol: Tolerances | None = None,
    cross_validate_depth: int = 0,
) -> CompatReport:
    """Is the channel polarization compatible with respect to the first user?

    ``cross_validate_depth > 0`` additionally synthesizes the alternating
    channels ``W^-, W^{-+}, ...`` and checks that each one's fingerprint is a
    restriction of the witness; mismatches are listed in ``diagnostics``.
    """
    tol = resolve(tol) if tol is not None else view.tol
    try:
        fp = fingerprint(view, tol)
    except IllDefinedFingerprint as exc:
        evidence = dict(exc.evidence, check=exc.check)
        return CompatReport(False, failure=CompatFailure(ILL_DEFINED, str(exc), evidence))
    try:
        F = extend_to_pseudo_quadratic(fp, tol.ratio)
    except ExtensionConflict as exc:
        return CompatReport(False, failure=CompatFailure(CONFLICT, str(exc), exc.evidence), fingerprint=fp)
    report = CompatReport(True, witness=F, fingerprint=fp)
    residual = witness_residual(view, F)
    if residual > tol.ratio:
        report.diagnostics.append(f"witness reproduces posterior transforms only to {residual:.3g}")
    if cross_validate_depth > 0:
        report.diagnostics.extend(_cross_validate(view, F, tol, cross_validate_depth))
    return report


def _cross_validate(view: TwoUserView, F: PseudoQuadFunction, tol: Tolerances, depth: int) -> list[str]:
    problems = []
    for signs in alternating_sequences(depth):
        w = synthesize(view.mac, signs, SynthesisOptions(merge_tolerance=tol.eps_zero), max_depth=depth)
        label = "".join(signs)
        try:
            fp = fingerprint(TwoUserView(w, tol), tol)
        except IllDefinedFingerprint as exc:
            problems.append(f"W^{label}: fingerprint ill-defined ({exc})")
            continue
        for key, v in fp.values.items():
            if key not in F:
                problems.append(f"W^{label}: fingerprint defined at {key} outside the witness domain")
            elif abs(F(*key) - v) > tol.ratio:
                problems.append(f"W^{label}: fingerprint {v:.9g} at {key} differs from witness {F(*key):.9g}")
    return problems


def prime_field_shortcut(view: TwoUserView, tol: Tolerances | None = None) -> int | None:
    """Smallest ``a`` in ``F_q`` with ``I(X + aY; Y | Z) = 0``, or ``None``.

    Only for ``G_1 = G_2 = Z_q`` with ``q`` prime.
    """
    tol = resolve(tol) if tol is not None else view.tol
    q = _prime_field_order(view)
    if q is None:
        raise ValueError(f"prime-field shortcut needs G_1 = G_2 = Z_q, q prime; got {view.g1} and {view.g2}")
    for a in range(q):
        if cond_mutual_info_shifted(view, a) < tol.eps_zero:
            return a
    return None


def coprime_shortcut(view: TwoUserView, tol: Tolerances | None = None) -> bool:
    """For coprime ``|G_1|, |G_2|``: compatible iff ``I(X; Y | Z) = 0``."""
    tol = resolve(tol) if tol is not None else view.tol
    if math.gcd(view.g1.size, view.g2.size) != 1:
        raise ValueError(f"co-prime shortcut needs coprime group orders, got {view.g1.size} and {view.g2.size}")
    return cond_mutual_info_xy_given_z(view) < tol.eps_zero


def _prime_field_order(view: TwoUserView) -> int | None:
    if view.g1.rank != 1 or view.g1 != view.g2:
        return None
    q = view.g1.orders[0]
    if q < 2 or any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
        return None
    return q


def applicable_shortcuts(view: TwoUserView, tol: Tolerances | None = None) -> dict[str, Any]:
    """Results of every shortcut whose precondition holds."""
    out: dict[str, Any] = {}
    if _prime_field_order(view) is not None:
        out["prime_field_a"] = prime_field_shortcut(view, tol)
    if math.gcd(view.g1.size, view.g2.size) == 1:
        out["coprime_compatible"] = coprime_shortcut(view, tol)
    return out


def check_region(mac: Mac, tol: Tolerances | None = None) -> dict[int, CompatReport]:
    """A verdict for every nonempty proper user subset ``S`` (as a bitmask).

    The region is preserved iff every verdict is compatible; the full set needs
    no check because the sum capacity is always preserved.
    """
    return {mask: check_subset(mac, mask, tol) for mask in proper_subsets(mac.m)}


def check_subset(mac: Mac, subset: Subset, tol: Tolerances | None = None) -> CompatReport:
    mask = as_mask(subset, mac.m)
    return check_compatibility(TwoUserView(two_user_reduction(mac, mask), tol), tol)
