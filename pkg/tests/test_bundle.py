"""Bundles built from actions and from twisted groupoids."""

import pytest

from fellsem.angles import Angle
from fellsem.bundle import (BadMultiplierFamily, NotSaturated, SectionBundle,
                            build_bundle, canonical_multipliers, check_multiplier_family,
                            classify_bundle, extract_action, roundtrip_check,
                            verify_fell_bundle)
from fellsem.action import gauge_transform, verify_twisted_action
from fellsem.generators import (busby_smith_z2, cocycle_action, five_element_action,
                                random_gauge, random_valid_action)
from fellsem.groupoid import (TwoCocycle, bisection_semigroup, cyclic_group,
                              pair_groupoid, z2_nontrivial_cocycle)
from fellsem.partial_maps import CFunction


def test_busby_bundle_axioms(busby, rng):
    B = build_bundle(busby)
    ok, bad = verify_fell_bundle(B, rng=rng)
    assert ok, bad


def test_five_element_bundle_axioms(five, rng):
    B = build_bundle(five)
    ok, bad = verify_fell_bundle(B, rng=rng)
    assert ok, bad


def test_action_bundles_are_saturated_regular_semi_abelian(full_i2):
    info = classify_bundle(build_bundle(full_i2))
    assert info["saturated"] and info["semi_abelian"]
    assert all(info["regular"].values())


def test_busby_product_carries_the_twist(busby):
    B = build_bundle(busby)
    g = 1  # the order-two element
    f = CFunction.point_mass(B.carrier(g), 0)
    prod = B.mul(g, g, f, f)
    assert prod(0) == Angle("1/2")
    star = B.star(g, f)
    assert star(0) == Angle("1/2")  # conj(omega(g,g)) = conj(-1) = -1


def test_roundtrip_is_exact(busby, five, full_i2):
    for A in (busby, five, full_i2):
        ok, diff = roundtrip_check(A)
        assert ok, diff


def test_roundtrip_exact_on_gauged_actions(rng):
    for _ in range(5):
        A = random_valid_action(rng)
        ok, diff = roundtrip_check(A)
        assert ok, diff


def test_extracting_with_gauged_family_gives_gauged_action(five, rng):
    B = build_bundle(five)
    chi = random_gauge(five, rng)
    u = canonical_multipliers(B)
    gauged_u = {s: u[s].multiply(chi[s]) for s in five.S.elements()}
    check_multiplier_family(B, gauged_u)
    A2 = extract_action(B, gauged_u)
    assert A2.equals(gauge_transform(five, chi))


def test_bad_multiplier_family_rejected(five):
    B = build_bundle(five)
    u = canonical_multipliers(B)
    s = next(a for a in five.S.elements() if five.carrier(a))
    x = next(iter(five.carrier(s)))
    vals = {y: (2 + 0j if y == x else Angle(0)) for y in five.carrier(s)}
    u[s] = CFunction(five.carrier(s), vals)  # not unit modulus
    with pytest.raises(BadMultiplierFamily):
        check_multiplier_family(B, u)


def test_section_bundle_of_twisted_group(rng):
    G, tau = z2_nontrivial_cocycle()
    S, biss, wide = bisection_semigroup(G)
    B = SectionBundle(G, tau, S, biss)
    ok, bad = verify_fell_bundle(B, rng=rng)
    assert ok, bad
    assert classify_bundle(B)["saturated"]


def test_carrier_override_breaks_saturation(rng):
    G = cyclic_group(2)
    S, biss, wide = bisection_semigroup(G)
    g = next(i for i in S.elements() if biss[i] and not S.is_idempotent(i))
    B = SectionBundle(G, TwoCocycle.trivial(G), S, biss, carriers={g: frozenset()})
    ok, bad = verify_fell_bundle(B, rng=rng)
    assert ok, bad  # still a bundle, just not saturated
    info = classify_bundle(B)
    assert not info["saturated"]
    with pytest.raises(NotSaturated):
        extract_action(B, canonical_multipliers(B))


def test_pair_groupoid_section_bundle(rng):
    G = pair_groupoid([0, 1])
    S, biss, wide = bisection_semigroup(G)
    B = SectionBundle(G, TwoCocycle.trivial(G), S, biss)
    ok, bad = verify_fell_bundle(B, rng=rng)
    assert ok, bad
    info = classify_bundle(B)
    assert info["saturated"] and info["semi_abelian"]
