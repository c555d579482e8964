import cmath
import json
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macpolar import corpus, standard
from macpolar.abelian import GroupSpec
from macpolar.channel import TwoUserView, cond_mutual_info_xy_given_z, from_function
from macpolar.compat import (
    CONFLICT,
    ILL_DEFINED,
    CompatReport,
    ExtensionConflict,
    IllDefinedFingerprint,
    PseudoQuadFunction,
    applicable_shortcuts,
    check_compatibility,
    check_region,
    check_subset,
    coprime_shortcut,
    extend_to_pseudo_quadratic,
    fingerprint,
    is_pseudo_quadratic,
    prime_field_shortcut,
    pseudo_quadratic_violation,
    witness_residual,
)
from macpolar.polarize import all_sequences, synthesize
from macpolar.tolerances import Tolerances

from conftest import joint_dict, naive_dft, random_two_user

Z2, Z4 = GroupSpec((2,)), GroupSpec((4,))


def full_table(g1, g2, fn):
    return PseudoQuadFunction(g1, g2, {(x, y): fn(x, y) for x in g1.elements() for y in g2.elements()})


def bicharacter(g1, g2, k):
    """``exp(2j pi k <x, y> / N)`` for cyclic groups of a common order ``N``."""
    n = g1.orders[0]
    return lambda x, y: cmath.exp(2j * cmath.pi * k * x[0] * y[0] / n)


# -- the validator ------------------------------------------------------------

def test_validator_examples():
    assert is_pseudo_quadratic(full_table(Z2, Z2, lambda x, y: (-1) ** (x[0] * y[0])))
    d = {((0,), (0,)): 1, ((1,), (1,)): 1}
    assert not is_pseudo_quadratic(PseudoQuadFunction(Z2, Z2, d))
    bad = full_table(Z2, Z2, lambda x, y: (-1) ** (x[0] * y[0]))
    bad.values[((1,), (0,))] = -1
    assert not is_pseudo_quadratic(bad)
    off_circle = full_table(Z2, Z2, lambda x, y: 1.0)
    off_circle.values[((1,), (1,))] = 0.5
    assert "unit circle" in pseudo_quadratic_violation(off_circle)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2,), (3,), (4,), (2, 2), (6,)]), st.sampled_from([(2,), (3,), (4,), (2, 2)]), st.data())
def test_constant_one_on_subgroup_products_is_pseudo_quadratic(o1, o2, data):
    g1, g2 = GroupSpec(o1), GroupSpec(o2)
    h1 = g1.subgroup_closure(data.draw(st.lists(st.sampled_from(g1.elements()), max_size=2)))
    h2 = g2.subgroup_closure(data.draw(st.lists(st.sampled_from(g2.elements()), max_size=2)))
    F = PseudoQuadFunction(g1, g2, {(x, y): 1.0 for x in h1 for y in h2})
    assert is_pseudo_quadratic(F)
    assert extend_to_pseudo_quadratic(F).domain == F.domain


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 6]), st.data())
def test_closure_reproduces_a_planted_bicharacter(n, data):
    g = GroupSpec((n,))
    k = data.draw(st.integers(0, n - 1))
    fn = bicharacter(g, g, k)
    seeds = data.draw(st.lists(st.tuples(st.sampled_from(g.elements()), st.sampled_from(g.elements())), max_size=4))
    partial = {(x, y): fn(x, y) for x, y in seeds}
    F = extend_to_pseudo_quadratic(PseudoQuadFunction(g, g, partial))
    assert F.domain >= set(partial)
    assert is_pseudo_quadratic(F)
    for (x, y), v in F.values.items():
        assert abs(v - fn(x, y)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.data())
def test_closure_detects_a_corrupted_entry(n, data):
    g = GroupSpec((n,))
    fn = bicharacter(g, g, 1)
    values = {(x, y): fn(x, y) for x in g.elements() for y in g.elements()}
    x = data.draw(st.sampled_from(g.elements()[1:]))
    y = data.draw(st.sampled_from(g.elements()[1:]))
    # on Z_2 a half turn maps one bicharacter to the other, so it is not a corruption
    turns = data.draw(st.sampled_from([0.1, 0.25] if n == 2 else [0.1, 0.25, 0.5]))
    values[(x, y)] *= cmath.exp(2j * cmath.pi * turns)
    with pytest.raises(ExtensionConflict):
        extend_to_pseudo_quadratic(PseudoQuadFunction(g, g, values))


def test_empty_fingerprint_extends_to_the_trivial_point():
    F = extend_to_pseudo_quadratic(PseudoQuadFunction(Z2, Z2, {}))
    assert F.values == {((0,), (0,)): 1}


def test_conflict_message_names_its_sources():
    values = {((1,), (1,)): -1.0, ((1,), (2,)): -1.0}
    with pytest.raises(ExtensionConflict) as err:
        extend_to_pseudo_quadratic(PseudoQuadFunction(Z2, Z4, values))
    assert err.value.evidence["rule"] == "R1"
    assert err.value.evidence["from"] == [((1,), (1,)), ((1,), (1,))]


# -- fingerprints of channels ---------------------------------------------------

def brute_fingerprint(mac):
    """Ratios of posterior transforms from explicit dicts, keyed by ``(xhat, y1 - y2)``."""
    g1, g2 = mac.input_groups
    joint = joint_dict(mac)
    p_yz = defaultdict(float)
    for ((x, y), z), p in joint.items():
        p_yz[(y, z)] += p
    out = defaultdict(list)
    for z in range(mac.output_size):
        ys = [y for y in g2.elements() if p_yz[(y, z)] > 1e-9]
        post = {y: {x: joint.get(((x, y), z), 0.0) / p_yz[(y, z)] for x in g1.elements()} for y in ys}
        hats = {y: naive_dft(g1.orders, post[y]) for y in ys}
        xs = [xh for xh in g1.elements() if any(abs(hats[y][xh]) > 1e-9 for y in ys)]
        for xh in xs:
            for y1 in ys:
                for y2 in ys:
                    out[(xh, g2.sub(y1, y2))].append(hats[y1][xh] / hats[y2][xh])
    return out


def test_bac_fingerprint_and_witness():
    view = TwoUserView(standard.binary_adder())
    fp = fingerprint(view)
    assert fp.domain == {(x, y) for x in [(0,), (1,)] for y in [(0,), (1,)]}
    assert abs(fp.values[((1,), (1,))] + 1) < 1e-12
    report = check_compatibility(view)
    assert report.compatible and report.failure is None
    assert abs(report.witness((1,), (1,)) + 1) < 1e-12
    assert report.witness.phase_table()[-1] == ((1,), (1,), 0.5)
    assert witness_residual(view, report.witness) < 1e-12


@pytest.mark.parametrize("mac", corpus.structured_corpus(12), ids=lambda m: m.name)
def test_fingerprint_matches_brute_force_ratios(mac):
    fp = fingerprint(TwoUserView(mac))
    ref = brute_fingerprint(mac)
    assert fp.domain == set(ref)
    for key, ratios in ref.items():
        assert all(abs(r - fp.values[key]) < 1e-7 for r in ratios)


@pytest.mark.parametrize("mac", corpus.structured_corpus(20), ids=lambda m: m.name)
def test_fingerprint_symmetry_and_roots_of_unity(mac):
    fp = fingerprint(TwoUserView(mac))
    g2 = mac.input_groups[1]
    for (x, y), v in fp.values.items():
        if (x, g2.neg(y)) in fp.domain:
            assert abs(fp.values[(x, g2.neg(y))] - v.conjugate()) < 1e-7
        assert abs(v ** g2.element_order(y) - 1) < 1e-6


def test_and_channel_fails_nonvanishing():
    view = TwoUserView(standard.and_channel())
    with pytest.raises(IllDefinedFingerprint) as err:
        fingerprint(view)
    assert err.value.check == "nonvanishing"
    report = check_compatibility(view)
    assert not report.compatible
    assert report.failure.stage == ILL_DEFINED
    assert report.failure.evidence["check"] == "nonvanishing"


def test_unequal_moduli_fail_unimodularity():
    # posteriors (0.7, 0.3) and (0.6, 0.4) at z = 0 have transforms 0.4 and 0.2 at xhat = 1
    t = np.array([[0.7, 0.3], [0.6, 0.4], [0.3, 0.7], [0.4, 0.6]])
    view = TwoUserView(standard.Mac((Z2, Z2), t))
    with pytest.raises(IllDefinedFingerprint) as err:
        fingerprint(view)
    assert err.value.check == "unimodular"
    assert abs(abs(err.value.evidence["ratio"]) - 2) < 1e-9 or abs(abs(err.value.evidence["ratio"]) - 0.5) < 1e-9


def test_conflict_channel_fails_extension_and_consistency():
    mac = standard.z2_z4_conflict()
    report = check_subset(mac, 1)
    assert not report.compatible
    assert report.failure.stage == CONFLICT
    assert report.fingerprint is not None
    assert ((1,), (1,)) in report.fingerprint.domain and ((1,), (2,)) in report.fingerprint.domain
    swapped = check_subset(mac, 2)
    assert swapped.failure.stage == ILL_DEFINED
    assert swapped.failure.evidence["check"] == "consistency"


def test_report_requires_exactly_one_outcome():
    with pytest.raises(ValueError):
        CompatReport(True)


def test_report_serializes_to_json():
    for mac in (standard.binary_adder(), standard.and_channel(), standard.z2_z4_conflict()):
        for rep in check_region(mac).values():
            json.dumps(rep.to_dict())


@pytest.mark.parametrize("mac", corpus.structured_corpus(20) + [standard.binary_adder(), standard.identity([(2,), (3,)])],
                         ids=lambda m: m.name)
def test_witness_reproduces_every_posterior_transform(mac):
    view = TwoUserView(mac)
    report = check_compatibility(view)
    assert report.compatible
    assert is_pseudo_quadratic(report.witness)
    assert witness_residual(view, report.witness) < 1e-7
    assert report.diagnostics == []


@pytest.mark.parametrize("mac", corpus.structured_corpus(10) + [standard.binary_adder()], ids=lambda m: m.name)
def test_polarized_fingerprints_restrict_the_witness(mac):
    F = check_compatibility(TwoUserView(mac)).witness
    for n in (1, 2):
        for s in all_sequences(n):
            fp = fingerprint(TwoUserView(synthesize(mac, s)))
            for key, v in fp.values.items():
                assert key in F, (s, key)
                assert abs(F(*key) - v) < 1e-7, (s, key)
    assert check_compatibility(TwoUserView(mac), cross_validate_depth=2).diagnostics == []


# -- shortcuts -----------------------------------------------------------------

def test_prime_field_shortcut_examples():
    assert prime_field_shortcut(TwoUserView(standard.binary_adder())) == 1
    assert prime_field_shortcut(TwoUserView(standard.and_channel())) is None
    sep = standard.separate_observations([(3,), (3,)], np.eye(3), np.full((3, 2), 0.5))
    assert prime_field_shortcut(TwoUserView(sep)) == 0
    with pytest.raises(ValueError):
        prime_field_shortcut(TwoUserView(standard.identity([(4,), (4,)])))
    with pytest.raises(ValueError):
        prime_field_shortcut(TwoUserView(standard.identity([(2,), (3,)])))


def test_coprime_shortcut_examples():
    assert coprime_shortcut(TwoUserView(standard.identity([(2,), (3,)])))
    both_zero = from_function([(2,), (3,)], lambda x, y: int(x[0] == 0 and y[0] == 0))
    view = TwoUserView(both_zero)
    assert cond_mutual_info_xy_given_z(view) > 0
    assert not coprime_shortcut(view)
    assert not check_compatibility(view).compatible
    with pytest.raises(ValueError):
        coprime_shortcut(TwoUserView(standard.binary_adder()))


def test_applicable_shortcuts():
    assert applicable_shortcuts(TwoUserView(standard.binary_adder())) == {"prime_field_a": 1}
    assert applicable_shortcuts(TwoUserView(standard.identity([(2,), (3,)]))) == {"coprime_compatible": True}
    assert applicable_shortcuts(TwoUserView(standard.z2_z4_conflict())) == {}


@pytest.mark.parametrize("mac", corpus.coprime_corpus(30) + corpus.prime_field_structured(20)
                         + corpus.prime_field_random(20), ids=lambda m: m.name)
def test_shortcuts_agree_with_the_full_checker(mac):
    view = TwoUserView(mac)
    verdict = check_compatibility(view).compatible
    for name, value in applicable_shortcuts(view).items():
        assert (value is not None if name == "prime_field_a" else value) == verdict


@settings(max_examples=40, deadline=None)
@given(random_two_user(max_product=9))
def test_shortcut_equivalence_on_random_channels(mac):
    view = TwoUserView(mac)
    verdict = check_compatibility(view).compatible
    for name, value in applicable_shortcuts(view).items():
        assert (value is not None if name == "prime_field_a" else value) == verdict


# -- regions -------------------------------------------------------------------

def test_region_examples():
    assert all(r.compatible for r in check_region(standard.binary_adder()).values())
    and_reports = check_region(standard.and_channel())
    assert not and_reports[1].compatible
    three = standard.identity([(2,), (2,), (2,)])
    reports = check_region(three)
    assert sorted(reports) == list(range(1, 7))
    assert all(r.compatible for r in reports.values())


def test_ratio_tolerance_controls_the_unimodularity_check():
    # transforms 1 and 1 - 2e-6 at xhat = 1 for the two posteriors at z = 0
    d = 1e-6
    t = np.array([[1.0, 0.0], [1 - d, d], [0.0, 1.0], [d, 1 - d]])
    view = TwoUserView(standard.Mac((Z2, Z2), t))
    strict = check_compatibility(view, Tolerances())
    assert strict.failure.evidence["check"] == "unimodular"
    loose = check_compatibility(view, Tolerances(ratio=1e-4))
    assert loose.compatible
