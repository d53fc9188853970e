"""Property-based invariants over randomly generated instances.

Generators delegate to tests/randgen.py; hypothesis drives the seeds so
shrinking reports a minimal failing seed rather than a minimal structure.
"""

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from rankfair.core import (clean, format_exact, is_clean, parse_exact,
                           validate_allocation, values_vector)
from rankfair.documents import (dumps, loads, parse_allocation,
                                parse_instance, serialize_allocation,
                                serialize_instance)
from rankfair.fairness import check_proportional, check_wprop1, envy_report
from rankfair.valuations import verify_matroid_rank

from randgen import (random_allocation, random_matroid_instance,
                     random_oxs_instance, random_scaled_instance)

seeds = st.integers(min_value=0, max_value=2**32 - 1)

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=997)
exacts = st.one_of(st.integers(min_value=-10**9, max_value=10**9), fractions)


@given(exacts)
def test_exact_round_trip(value):
    assert parse_exact(format_exact(value)) == Fraction(value)


@given(exacts)
def test_exact_format_is_canonical(value):
    text = format_exact(value)
    assert format_exact(parse_exact(text)) == text


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_generated_valuations_are_matroid_rank(seed):
    rng = random.Random(seed)
    instance = random_matroid_instance(rng)
    items = frozenset(instance.items)
    for agent in instance.agents:
        report = verify_matroid_rank(instance.valuation(agent), items)
        assert report.ok, report.axiom


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_envy_implication_chain(seed):
    rng = random.Random(seed)
    instance = random_matroid_instance(rng)
    allocation = random_allocation(rng, instance)
    report = envy_report(instance, allocation)
    for pair in report.pairs.values():
        if pair.ef:
            assert pair.efx0 and pair.efx_plus and pair.ef1 and pair.mef1
        if pair.efx0:
            assert pair.efx_plus_guarded
        if pair.efx_plus_guarded:
            assert pair.ef1
        if pair.ef1:
            assert pair.mef1


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_proportional_implies_wprop1(seed):
    rng = random.Random(seed)
    instance = random_matroid_instance(rng)
    allocation = random_allocation(rng, instance)
    prop_ok, _ = check_proportional(instance, allocation)
    if prop_ok:
        wprop_ok, _ = check_wprop1(instance, allocation)
        assert wprop_ok


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_clean_is_idempotent_and_value_preserving(seed):
    rng = random.Random(seed)
    instance = random_matroid_instance(rng)
    allocation = random_allocation(rng, instance)
    cleaned = clean(instance, allocation)
    assert is_clean(instance, cleaned)
    assert values_vector(instance, cleaned) == values_vector(instance, allocation)
    again = clean(instance, cleaned)
    assert again.bundles == cleaned.bundles
    assert not validate_allocation(instance, cleaned)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_instance_document_round_trip(seed):
    rng = random.Random(seed)
    maker = rng.choice([random_matroid_instance, random_oxs_instance,
                        random_scaled_instance])
    instance = maker(rng)
    recovered = parse_instance(loads(dumps(serialize_instance(instance))))
    assert recovered.agents == instance.agents
    assert recovered.items == instance.items
    for agent in instance.agents:
        for _ in range(12):
            subset = frozenset(item for item in instance.items
                               if rng.random() < 0.5)
            assert recovered.value(agent, subset) == instance.value(agent, subset)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_allocation_document_round_trip(seed):
    rng = random.Random(seed)
    instance = random_matroid_instance(rng)
    allocation = random_allocation(rng, instance)
    document = loads(dumps(serialize_allocation(allocation, instance)))
    recovered = parse_allocation(document, instance)
    assert recovered.bundles == allocation.bundles
    assert recovered.withheld == allocation.withheld
