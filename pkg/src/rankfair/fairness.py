"""Fairness and efficiency checkers for allocations of indivisible goods.

Envy-style criteria (EF, EF1, EFX variants, MEF1) are evaluated per ordered
agent pair and collected into a report.  Global criteria (proportionality,
WPROP1, equitability up to c items, maximin share, brute-force Pareto
optimality) are computed by dedicated functions; the exhaustive ones refuse
to run past an explicit enumeration budget instead of silently degrading.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Mapping, Optional

from .core import Allocation, BudgetExceeded, Instance

SUBSET_BUDGET = 2_000_000
PARTITION_BUDGET = 2_000_000
ENUMERATION_BUDGET = 2_000_000


@dataclass(frozen=True)
class PairCheck:
    """Envy diagnostics for one ordered pair (i evaluates j's bundle)."""

    envious: bool
    gap: object  # v_i(A_j) - v_i(A_i); positive exactly when envious
    ef: bool
    ef1: bool
    efx0: bool
    efx_plus: bool
    efx_plus_guarded: bool
    mef1: bool
    ef1_witness: Optional[str] = None
    efx0_violator: Optional[str] = None
    mef1_witness: Optional[str] = None


@dataclass(frozen=True)
class MmsEntry:
    share: object
    value: object
    ok: bool
    alpha: Optional[Fraction]


@dataclass(frozen=True)
class FairnessReport:
    """Per-pair envy flags plus optional global criteria.

    Global fields are None until the corresponding checker has been run;
    envy_report fills only the pair section.
    """

    pairs: Mapping[tuple, PairCheck]
    wprop1: Optional[bool] = None
    wprop1_margins: Optional[Mapping[str, object]] = None
    proportional: Optional[bool] = None
    proportional_margins: Optional[Mapping[str, object]] = None
    min_eqc: Optional[int] = None
    mms: Optional[Mapping[str, MmsEntry]] = None
    po: Optional[bool] = None
    po_witness: Optional[Allocation] = None

    def all_pairs(self, flag: str) -> bool:
        return all(getattr(check, flag) for check in self.pairs.values())

    @property
    def ef(self) -> bool:
        return self.all_pairs("ef")

    @property
    def ef1(self) -> bool:
        return self.all_pairs("ef1")

    @property
    def efx0(self) -> bool:
        return self.all_pairs("efx0")

    @property
    def efx_plus(self) -> bool:
        return self.all_pairs("efx_plus")

    @property
    def efx_plus_guarded(self) -> bool:
        return self.all_pairs("efx_plus_guarded")

    @property
    def mef1(self) -> bool:
        return self.all_pairs("mef1")

    def failing_pairs(self, flag: str):
        return [pair for pair, check in sorted(self.pairs.items())
                if not getattr(check, flag)]


def _pair_check(instance: Instance, allocation: Allocation, i: str, j: str) -> PairCheck:
    own_bundle = allocation.bundle(i)
    other_bundle = allocation.bundle(j)
    own = instance.value(i, own_bundle)
    other = instance.value(i, other_bundle)
    envious = own < other
    gap = other - own

    ordered = instance.sorted_items(other_bundle)
    reduced = {o: instance.value(i, other_bundle - {o}) for o in ordered}

    ef1_witness = None
    for o in ordered:
        if own >= reduced[o]:
            ef1_witness = o
            break
    ef1 = (not ordered) or ef1_witness is not None

    efx0_violator = None
    for o in ordered:
        if own < reduced[o]:
            efx0_violator = o
            break
    efx0 = efx0_violator is None

    if envious:
        # Only removals with a positive marginal gain are required to
        # eliminate the envy; zero-marginal items are exempt.
        efx_plus = all(own >= reduced[o] for o in ordered if other - reduced[o] > 0)
    else:
        efx_plus = True
    efx_plus_guarded = ef1 and efx_plus

    mef1_witness = None
    if envious:
        for o in ordered:
            merged = instance.value(i, own_bundle | (other_bundle - {o}))
            if own >= merged - own:
                mef1_witness = o
                break
        mef1 = mef1_witness is not None
    else:
        mef1 = True

    return PairCheck(
        envious=envious, gap=gap, ef=not envious, ef1=ef1, efx0=efx0,
        efx_plus=efx_plus, efx_plus_guarded=efx_plus_guarded, mef1=mef1,
        ef1_witness=ef1_witness if envious else None,
        efx0_violator=efx0_violator,
        mef1_witness=mef1_witness,
    )


def envy_report(instance: Instance, allocation: Allocation) -> FairnessReport:
    """Evaluate every ordered agent pair for the envy-style criteria."""
    pairs = {}
    for i in instance.agents:
        for j in instance.agents:
            if i != j:
                pairs[(i, j)] = _pair_check(instance, allocation, i, j)
    return FairnessReport(pairs=pairs)


def check_proportional(instance: Instance, allocation: Allocation):
    """Each agent must realize at least 1/n of her value for all items.

    Returns (ok, margins) where margin_i = v_i(A_i) - v_i(O)/n.
    """
    n = instance.n
    everything = frozenset(instance.items)
    margins = {}
    for i in instance.agents:
        entitlement = Fraction(instance.value(i, everything), 1) / n
        margins[i] = instance.value(i, allocation.bundle(i)) - entitlement
    return all(margin >= 0 for margin in margins.values()), margins


def check_wprop1(instance: Instance, allocation: Allocation):
    """Weak proportionality up to one item.

    margin_i = v_i(A_i) - [v_i(O)/n - max value of a single item outside A_i];
    the max over an empty set counts as zero.  Returns (ok, margins).
    """
    n = instance.n
    everything = frozenset(instance.items)
    margins = {}
    for i in instance.agents:
        outside = instance.sorted_items(everything - allocation.bundle(i))
        best_single = 0
        for o in outside:
            single = instance.value(i, frozenset({o}))
            if single > best_single:
                best_single = single
        threshold = Fraction(instance.value(i, everything), 1) / n - best_single
        margins[i] = instance.value(i, allocation.bundle(i)) - threshold
    return all(margin >= 0 for margin in margins.values()), margins


def _eqc_holds(instance: Instance, allocation: Allocation, c: int) -> bool:
    values = {i: instance.value(i, allocation.bundle(i)) for i in instance.agents}
    for j in instance.agents:
        bundle = allocation.bundle(j)
        if len(bundle) <= c:
            continue
        ordered = instance.sorted_items(bundle)
        worst_rival = min(values[i] for i in instance.agents if i != j)
        satisfied = False
        for removal in combinations(ordered, c):
            if worst_rival >= instance.value(j, bundle - frozenset(removal)):
                satisfied = True
                break
        if not satisfied:
            return False
    return True


def min_eqc(instance: Instance, allocation: Allocation, budget: int = SUBSET_BUDGET) -> int:
    """Smallest c such that the allocation is equitable up to c items.

    EQc requires, for every ordered pair (i, j) with |A_j| > c, some subset
    S of A_j with |S| = c and v_i(A_i) >= v_j(A_j minus S).  The check is
    exhaustive over subsets and refuses when the enumeration would exceed
    the budget.
    """
    if instance.n == 1:
        return 0
    sizes = [len(allocation.bundle(j)) for j in instance.agents]
    deepest = max(sizes)
    spent = 0
    for c in range(deepest + 1):
        spent += sum(comb(size, c) for size in sizes if size > c)
        if spent > budget:
            raise BudgetExceeded("equitability subset enumeration", spent, budget)
        if _eqc_holds(instance, allocation, c):
            return c
    # c = deepest leaves every pair vacuous, so the loop always returns.
    raise AssertionError("equitability scan failed to terminate")


def mms_share(instance: Instance, agent: str, budget: int = PARTITION_BUDGET):
    """Maximin share: best over complete n-partitions of the worst part.

    Parts may be empty, so the share is 0 whenever there are fewer items
    than agents.  Enumerates all n^m placements; refuses over budget.
    """
    n = instance.n
    items = instance.sorted_items(frozenset(instance.items))
    total = n ** len(items)
    if total > budget:
        raise BudgetExceeded("maximin-share partition enumeration", total, budget)
    best = None
    for pattern in product(range(n), repeat=len(items)):
        parts = [[] for _ in range(n)]
        for item, slot in zip(items, pattern):
            parts[slot].append(item)
        worst = min(instance.value(agent, frozenset(part)) for part in parts)
        if best is None or worst > best:
            best = worst
    return best


def check_mms(instance: Instance, allocation: Allocation,
              budget: int = PARTITION_BUDGET) -> Mapping[str, MmsEntry]:
    """Per-agent maximin-share satisfaction with the realized alpha ratio."""
    entries = {}
    for i in instance.agents:
        share = mms_share(instance, i, budget=budget)
        value = instance.value(i, allocation.bundle(i))
        if share == 0:
            alpha = None
        else:
            alpha = Fraction(value, 1) / Fraction(share, 1)
        entries[i] = MmsEntry(share=share, value=value, ok=value >= share, alpha=alpha)
    return entries


def check_po_bruteforce(instance: Instance, allocation: Allocation,
                        budget: int = ENUMERATION_BUDGET):
    """Exhaustive Pareto test over all (n+1)^m placements.

    Returns (True, None) when nothing dominates the allocation, otherwise
    (False, witness) with the first dominating allocation in enumeration
    order (items in index order, each placed with agent 1, agent 2, ...,
    withheld last).
    """
    n = instance.n
    items = instance.sorted_items(frozenset(instance.items))
    total = (n + 1) ** len(items)
    if total > budget:
        raise BudgetExceeded("allocation enumeration", total, budget)
    current = [instance.value(i, allocation.bundle(i)) for i in instance.agents]
    for pattern in product(range(n + 1), repeat=len(items)):
        bundles = [[] for _ in range(n)]
        for item, slot in zip(items, pattern):
            if slot < n:
                bundles[slot].append(item)
        better = False
        dominated = True
        for k, agent in enumerate(instance.agents):
            value = instance.value(agent, frozenset(bundles[k]))
            if value > current[k]:
                better = True
            elif value < current[k]:
                dominated = False
                break
        if dominated and better:
            witness = Allocation.from_bundles(
                instance,
                {agent: frozenset(bundles[k]) for k, agent in enumerate(instance.agents)},
            )
            return False, witness
    return True, None


def full_report(instance: Instance, allocation: Allocation,
                include_po: bool = False,
                subset_budget: int = SUBSET_BUDGET,
                partition_budget: int = PARTITION_BUDGET,
                enumeration_budget: int = ENUMERATION_BUDGET) -> FairnessReport:
    """Envy report augmented with every global criterion.

    The exhaustive sections raise BudgetExceeded rather than being skipped,
    so callers on large instances should request only what they can afford.
    """
    report = envy_report(instance, allocation)
    prop_ok, prop_margins = check_proportional(instance, allocation)
    wprop_ok, wprop_margins = check_wprop1(instance, allocation)
    report = replace(
        report,
        proportional=prop_ok, proportional_margins=prop_margins,
        wprop1=wprop_ok, wprop1_margins=wprop_margins,
        min_eqc=min_eqc(instance, allocation, budget=subset_budget),
        mms=check_mms(instance, allocation, budget=partition_budget),
    )
    if include_po:
        po_ok, po_witness = check_po_bruteforce(
            instance, allocation, budget=enumeration_budget)
        report = replace(report, po=po_ok, po_witness=po_witness)
    return report
