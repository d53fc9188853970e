"""Exhaustive enumeration ground truth for small instances.

Scans every placement of items (each goes to one agent or is withheld),
computes exact optima under several welfare objectives, and machine-checks
the structural relationships that hold between those optima under
matroid-rank valuations.  Every scan refuses to start once the number of
placements exceeds an explicit budget: this module is a measuring
instrument for tests, not a solver.

The verification routines run on any instance; their pass guarantees are
only promised for matroid-rank valuations, and running them on other
valuation classes is how the expected failures are demonstrated.
"""

from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping, Optional, Sequence

from .core import Allocation, BudgetExceeded, Instance

ORACLE_BUDGET = 2_000_000
WITNESS_CAP = 64

OBJECTIVES = ("usw", "egalitarian", "leximin", "mnw", "min_convex", "max_concave")


def sum_squares(vector) -> object:
    return sum(z * z for z in vector)


def sum_fourth(vector) -> object:
    return sum(z ** 4 for z in vector)


def iterated_power(vector) -> object:
    """Product of z**z over positive entries; 0 contributes the factor 1.

    On non-negative integer vectors this orders exactly like the sum of
    z*ln(z) (with the 0*ln(0)=0 limit convention) while staying in exact
    integer arithmetic.
    """
    out = 1
    for z in vector:
        if z > 0:
            out *= z ** z
    return out


CONVEX_BUILTINS: Mapping[str, Callable] = {
    "sum_squares": sum_squares,
    "sum_fourth": sum_fourth,
    "zlogz": iterated_power,
}


def nash_key(vector):
    """(support size, product over the support); bigger is better.

    The empty support gets product 1 so that any agent with positive value
    beats the all-zero vector on the first component already.
    """
    support = [z for z in vector if z > 0]
    prod = 1
    for z in support:
        prod *= z
    return (len(support), prod)


def leximin_key(vector):
    return tuple(sorted(vector))


@dataclass(frozen=True)
class OracleResult:
    objective: str
    optimal_value: object
    optimal_vector: tuple
    witnesses: tuple
    witness_count: int
    scanned: int


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    ok: bool
    detail: str = ""
    counterexample: Optional[dict] = None


@dataclass(frozen=True)
class EquivalenceReport:
    outcomes: tuple

    @property
    def ok(self) -> bool:
        return all(outcome.ok for outcome in self.outcomes)

    def outcome(self, name: str) -> CheckOutcome:
        for candidate in self.outcomes:
            if candidate.name == name:
                return candidate
        raise KeyError(name)


def _tables(instance: Instance):
    """Per-agent value table indexed by item-subset bitmask.

    Bit p of a mask corresponds to the p-th item in index order.
    """
    items = instance.sorted_items(frozenset(instance.items))
    m = len(items)
    subsets = [frozenset()] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        subsets[mask] = subsets[mask ^ low] | {items[low.bit_length() - 1]}
    tables = []
    for agent in instance.agents:
        valuation = instance.valuation(agent)
        tables.append([valuation.value(subsets[mask]) for mask in range(1 << m)])
    return items, subsets, tables


def _check_budget(instance: Instance, complete_only: bool, budget: int) -> int:
    base = instance.n if complete_only else instance.n + 1
    total = base ** instance.m
    if total > budget:
        raise BudgetExceeded("allocation enumeration", total, budget)
    return total


def _scan(instance, items, tables, complete_only):
    """Yield (pattern, masks, vector) over all placements in lex order.

    Pattern digit k < n sends the item to agent k (index order); digit n
    withholds it and is absent when complete_only is set.
    """
    n = instance.n
    base = n if complete_only else n + 1
    for pattern in product(range(base), repeat=len(items)):
        masks = [0] * n
        for pos, digit in enumerate(pattern):
            if digit < n:
                masks[digit] |= 1 << pos
        vector = tuple(tables[k][masks[k]] for k in range(n))
        yield pattern, masks, vector


def _pattern_to_allocation(instance: Instance, items, pattern) -> Allocation:
    bundles = {agent: set() for agent in instance.agents}
    for pos, digit in enumerate(pattern):
        if digit < instance.n:
            bundles[instance.agents[digit]].add(items[pos])
    return Allocation.from_bundles(
        instance, {agent: frozenset(members) for agent, members in bundles.items()})


def enumerate_allocations(instance: Instance, complete_only: bool = False,
                          budget: int = ORACLE_BUDGET):
    """Stream every allocation (including withholding) in lexicographic order."""
    _check_budget(instance, complete_only, budget)
    items, _, tables = _tables(instance)
    for pattern, _, _ in _scan(instance, items, tables, complete_only):
        yield _pattern_to_allocation(instance, items, pattern)


def _objective_key(objective: str, convex):
    if objective == "usw":
        return lambda vector: sum(vector)
    if objective == "egalitarian":
        return lambda vector: min(vector)
    if objective == "leximin":
        return leximin_key
    if objective == "mnw":
        return nash_key
    if objective == "min_convex":
        phi = CONVEX_BUILTINS[convex] if isinstance(convex, str) else convex
        return lambda vector: (sum(vector), -phi(vector))
    if objective == "max_concave":
        psi = CONVEX_BUILTINS[convex] if isinstance(convex, str) else convex
        if psi is iterated_power or convex is None:
            return lambda vector: (sum(vector), nash_key(vector))
        return lambda vector: (sum(vector), psi(vector))
    raise ValueError("unknown objective: %r" % (objective,))


def _reported_optimum(objective: str, key, vector, convex):
    if objective in ("usw", "egalitarian", "leximin", "mnw"):
        return key
    if objective == "min_convex":
        phi = CONVEX_BUILTINS[convex] if isinstance(convex, str) else convex
        return (key[0], phi(vector))
    return key


def oracle_optimal(instance: Instance, objective: str, convex="sum_squares",
                   complete_only: bool = False, budget: int = ORACLE_BUDGET,
                   witness_cap: int = WITNESS_CAP) -> OracleResult:
    """Exact optimum of the objective by full enumeration.

    usw and egalitarian maximize their scalar; leximin maximizes the
    ascending sorted vector lexicographically; mnw maximizes support size
    and then the product over the support.  min_convex minimizes the given
    symmetric convex function among utilitarian-optimal allocations, and
    max_concave maximizes a symmetric concave one there (the default
    compares like the sum of ln z with the largest-support refinement).
    Witnesses come out in enumeration order, capped at witness_cap.
    """
    if objective not in OBJECTIVES:
        raise ValueError("unknown objective: %r" % (objective,))
    if objective == "max_concave" and convex == "sum_squares":
        convex = None
    _check_budget(instance, complete_only, budget)
    items, _, tables = _tables(instance)
    key_of = _objective_key(objective, convex)

    best_key = None
    best_vector = None
    winners = []
    winner_count = 0
    scanned = 0
    for pattern, _, vector in _scan(instance, items, tables, complete_only):
        scanned += 1
        key = key_of(vector)
        if best_key is None or key > best_key:
            best_key = key
            best_vector = vector
            winners = [pattern]
            winner_count = 1
        elif key == best_key:
            winner_count += 1
            if len(winners) < witness_cap:
                winners.append(pattern)

    witnesses = tuple(_pattern_to_allocation(instance, items, pattern)
                      for pattern in winners)
    return OracleResult(
        objective=objective,
        optimal_value=_reported_optimum(objective, best_key, best_vector, convex),
        optimal_vector=best_vector,
        witnesses=witnesses,
        witness_count=winner_count,
        scanned=scanned,
    )


def _mask_clean(tables, masks) -> bool:
    for k, mask in enumerate(masks):
        table = tables[k]
        remaining = mask
        while remaining:
            low = remaining & -remaining
            if table[mask] == table[mask ^ low]:
                return False
            remaining ^= low
    return True


def _mask_ef1(tables, masks) -> bool:
    n = len(masks)
    for i in range(n):
        own = tables[i][masks[i]]
        for j in range(n):
            if i == j:
                continue
            mj = masks[j]
            if own >= tables[i][mj]:
                continue
            passed = False
            remaining = mj
            while remaining:
                low = remaining & -remaining
                if own >= tables[i][mj ^ low]:
                    passed = True
                    break
                remaining ^= low
            if not passed:
                return False
    return True


def _dominates(winner, loser) -> bool:
    better = False
    for a, b in zip(winner, loser):
        if a < b:
            return False
        if a > b:
            better = True
    return better


def verify_equivalences(instance: Instance, budget: int = ORACLE_BUDGET) -> EquivalenceReport:
    """Machine-check the structural claims that full enumeration can decide.

    Six outcomes, all by exhaustive scan:

    - pareto_implies_usw_optimal: every undominated valuation vector has
      maximal sum.
    - optimizer_sets_coincide: the sorted-vector sets of the leximin
      optima, the Nash-welfare optima, the sum-of-squares and
      sum-of-fourth-powers minimizers among utilitarian optima, and the
      log-sum maximizers among utilitarian optima are all the same
      singleton.
    - clean_leximin_ef1 / clean_mnw_ef1: every clean optimal allocation
      of the respective kind is envy-free up to one item.
    - usw_optimal_reachability: every utilitarian-optimal allocation that
      is not leximin admits a one-unit transfer from a richer agent
      (by at least 2) to a poorer one that lands on another achievable
      utilitarian-optimal vector.
    - pigou_dalton_consistency: across achievable utilitarian-optimal
      vector pairs related by such a transfer, the convex gauges strictly
      decrease and the Nash key strictly increases.

    All six provably hold for matroid-rank valuations; counterexamples on
    other valuation classes are reported, not raised.
    """
    _check_budget(instance, False, budget)
    items, _, tables = _tables(instance)

    vector_first: dict = {}
    for pattern, _, vector in _scan(instance, items, tables, False):
        if vector not in vector_first:
            vector_first[vector] = pattern

    vectors = set(vector_first)
    max_usw = max(sum(vector) for vector in vectors)
    usw_optimal = {vector for vector in vectors if sum(vector) == max_usw}
    outcomes = []

    # (a) Pareto optimality forces utilitarian optimality.
    pareto_gap = None
    for vector in sorted(vectors):
        if sum(vector) == max_usw:
            continue
        dominated = False
        for k in range(len(vector)):
            bumped = tuple(z + 1 if idx == k else z for idx, z in enumerate(vector))
            if bumped in vectors:
                dominated = True
                break
        if not dominated:
            dominated = any(_dominates(other, vector) for other in vectors)
        if not dominated:
            pareto_gap = vector
            break
    outcomes.append(CheckOutcome(
        name="pareto_implies_usw_optimal",
        ok=pareto_gap is None,
        detail="" if pareto_gap is None else
        "undominated vector with non-maximal sum: %s (sum %s < %s)" % (
            pareto_gap, sum(pareto_gap), max_usw),
        counterexample=None if pareto_gap is None else {
            "vector": pareto_gap,
            "allocation": _pattern_to_allocation(instance, items, vector_first[pareto_gap]),
        },
    ))

    # (b) The five optimizer families single out the same sorted vector.
    lex_best = max(leximin_key(vector) for vector in vectors)
    leximin_set = {leximin_key(v) for v in vectors if leximin_key(v) == lex_best}
    nash_best = max(nash_key(vector) for vector in vectors)
    nash_set = {leximin_key(v) for v in vectors if nash_key(v) == nash_best}
    sq_best = min(sum_squares(vector) for vector in usw_optimal)
    sq_set = {leximin_key(v) for v in usw_optimal if sum_squares(v) == sq_best}
    quartic_best = min(sum_fourth(vector) for vector in usw_optimal)
    quartic_set = {leximin_key(v) for v in usw_optimal if sum_fourth(v) == quartic_best}
    log_best = max(nash_key(vector) for vector in usw_optimal)
    log_set = {leximin_key(v) for v in usw_optimal if nash_key(v) == log_best}
    families = {
        "leximin": leximin_set,
        "mnw": nash_set,
        "min_sum_squares_among_usw_optimal": sq_set,
        "min_sum_fourth_among_usw_optimal": quartic_set,
        "max_log_sum_among_usw_optimal": log_set,
    }
    coincide = all(family == leximin_set for family in families.values())
    singleton = all(len(family) == 1 for family in families.values())
    outcomes.append(CheckOutcome(
        name="optimizer_sets_coincide",
        ok=coincide and singleton,
        detail="" if coincide and singleton else
        "optimizer families diverge: %s" % (
            {name: sorted(family) for name, family in families.items()},),
        counterexample=None if coincide and singleton else {
            name: sorted(family) for name, family in families.items()},
    ))

    # (c) Clean optima of either kind are envy-free up to one item.
    lex_violation = None
    nash_violation = None
    for pattern, masks, vector in _scan(instance, items, tables, False):
        is_lex = leximin_key(vector) == lex_best
        is_nash = nash_key(vector) == nash_best
        if not (is_lex or is_nash):
            continue
        if not _mask_clean(tables, masks):
            continue
        if _mask_ef1(tables, masks):
            continue
        if is_lex and lex_violation is None:
            lex_violation = (pattern, vector)
        if is_nash and nash_violation is None:
            nash_violation = (pattern, vector)
        if lex_violation is not None and nash_violation is not None:
            break
    for name, violation in (("clean_leximin_ef1", lex_violation),
                            ("clean_mnw_ef1", nash_violation)):
        outcomes.append(CheckOutcome(
            name=name,
            ok=violation is None,
            detail="" if violation is None else
            "clean optimal allocation with vector %s violates EF1" % (violation[1],),
            counterexample=None if violation is None else {
                "vector": violation[1],
                "allocation": _pattern_to_allocation(instance, items, violation[0]),
            },
        ))

    # (d) Non-leximin utilitarian optima can always move one unit down.
    unreachable = None
    for vector in sorted(usw_optimal):
        if leximin_key(vector) == lex_best:
            continue
        reachable = False
        for i in range(len(vector)):
            for j in range(len(vector)):
                if vector[j] >= vector[i] + 2:
                    shifted = list(vector)
                    shifted[i] += 1
                    shifted[j] -= 1
                    if tuple(shifted) in usw_optimal:
                        reachable = True
                        break
            if reachable:
                break
        if not reachable:
            unreachable = vector
            break
    outcomes.append(CheckOutcome(
        name="usw_optimal_reachability",
        ok=unreachable is None,
        detail="" if unreachable is None else
        "utilitarian-optimal vector %s admits no balancing one-unit transfer"
        % (unreachable,),
        counterexample=None if unreachable is None else {
            "vector": unreachable,
            "allocation": _pattern_to_allocation(
                instance, items, vector_first[unreachable]),
        },
    ))

    # (e) One-unit balancing transfers move every gauge the right way.
    gauge_breach = None
    for vector in sorted(usw_optimal):
        for i in range(len(vector)):
            for j in range(len(vector)):
                if vector[j] < vector[i] + 2:
                    continue
                shifted = list(vector)
                shifted[i] += 1
                shifted[j] -= 1
                shifted = tuple(shifted)
                if shifted not in usw_optimal:
                    continue
                ok = (sum_squares(shifted) < sum_squares(vector)
                      and sum_fourth(shifted) < sum_fourth(vector)
                      and nash_key(shifted) > nash_key(vector))
                if not ok:
                    gauge_breach = (vector, shifted)
                    break
            if gauge_breach:
                break
        if gauge_breach:
            break
    outcomes.append(CheckOutcome(
        name="pigou_dalton_consistency",
        ok=gauge_breach is None,
        detail="" if gauge_breach is None else
        "transfer %s -> %s failed to improve every gauge" % gauge_breach,
        counterexample=None if gauge_breach is None else {
            "before": gauge_breach[0], "after": gauge_breach[1]},
    ))

    return EquivalenceReport(outcomes=tuple(outcomes))


def max_usw_value(instance: Instance, complete_only: bool = False,
                  budget: int = ORACLE_BUDGET):
    """Maximum utilitarian welfare over the enumerated allocations."""
    _check_budget(instance, complete_only, budget)
    items, _, tables = _tables(instance)
    return max(sum(vector)
               for _, _, vector in _scan(instance, items, tables, complete_only))


def usw_optimal_all_clean_complete(instance: Instance,
                                   budget: int = ORACLE_BUDGET) -> bool:
    """Whether every utilitarian-optimal allocation is clean and complete.

    For matroid-rank valuations this holds exactly when the maximal
    utilitarian welfare equals the number of items.
    """
    _check_budget(instance, False, budget)
    items, _, tables = _tables(instance)
    best = None
    witnesses = []
    for pattern, masks, vector in _scan(instance, items, tables, False):
        total = sum(vector)
        if best is None or total > best:
            best = total
            witnesses = [(pattern, masks)]
        elif total == best:
            witnesses.append((pattern, masks))
    n = instance.n
    for pattern, masks in witnesses:
        if any(digit == n for digit in pattern):
            return False
        if not _mask_clean(tables, masks):
            return False
    return True
