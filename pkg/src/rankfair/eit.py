"""Envy-induced transfers, the envy-graph baseline, waste and price of fairness.

Two transfer procedures share the same core move (take an item out of an
envied bundle, give it to the envious agent):

* ``eit_ef1`` works on matroid rank valuations.  Starting from a clean
  utilitarian-optimal allocation, every transfer keeps the allocation clean
  and welfare-optimal, the squared-values potential drops by at least 2 per
  step, and the loop stops on an EF1 allocation within m^2/2 steps.

* ``eit_general`` is the heuristic for weighted assignment valuations.  It
  has no termination guarantee, so it runs under a step budget and reports
  exhaustion explicitly instead of looping forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    Allocation,
    AllocationError,
    InapplicableAlgorithm,
    Instance,
    TransferabilityViolated,
    assert_valid,
    clean,
    format_exact,
    is_clean,
    marginal_gain,
    values_vector,
)
from .matching import max_weight_matching
from .matroid_intersection import max_common_independent_set
from .valuations import AssignmentValuation

WITHHELD = "-"  # stands in for the withheld pool in transfer logs


@dataclass(frozen=True)
class EnvyRecord:
    """One envious ordered pair.

    ``gap`` is how much the envious agent prefers the other bundle;
    ``ef1_witness`` is some item whose removal from the envied bundle kills
    the envy, or None exactly when the pair violates EF1.
    """

    envious: str
    envied: str
    gap: object
    ef1_witness: object


@dataclass(frozen=True)
class TransferStep:
    step: int
    item: str
    source: str
    target: str
    phi_before: object
    phi_after: object


@dataclass
class TransferLog:
    steps: list = field(default_factory=list)

    def append(self, item, source, target, phi_before, phi_after):
        self.steps.append(
            TransferStep(len(self.steps) + 1, item, source, target, phi_before, phi_after)
        )

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def to_tsv(self) -> str:
        lines = ["step\titem\tfrom\tto\tphi_before\tphi_after"]
        for s in self.steps:
            lines.append(
                f"{s.step}\t{s.item}\t{s.source}\t{s.target}\t"
                f"{format_exact(s.phi_before)}\t{format_exact(s.phi_after)}"
            )
        return "\n".join(lines) + "\n"


def potential_phi(instance: Instance, allocation: Allocation):
    """Sum of squared bundle values; the termination potential for transfers."""
    return sum(v * v for v in values_vector(instance, allocation))


def envy_records(instance: Instance, allocation: Allocation) -> list:
    """All envious ordered pairs, agents scanned in instance order."""
    out = []
    for i in instance.agents:
        vi = instance.valuation(i)
        mine = vi.value(allocation.bundle(i))
        for j in instance.agents:
            if i == j:
                continue
            theirs_bundle = allocation.bundle(j)
            theirs = vi.value(theirs_bundle)
            if theirs <= mine:
                continue
            witness = None
            for o in instance.sorted_items(theirs_bundle):
                if mine >= vi.value(theirs_bundle - {o}):
                    witness = o
                    break
            out.append(EnvyRecord(i, j, theirs - mine, witness))
    return out


def _violates_ef1(instance, allocation, i, j) -> bool:
    vi = instance.valuation(i)
    mine = vi.value(allocation.bundle(i))
    theirs_bundle = allocation.bundle(j)
    if mine >= vi.value(theirs_bundle):
        return False
    return all(mine < vi.value(theirs_bundle - {o}) for o in theirs_bundle)


def _first_ef1_violation(instance, allocation):
    for i in instance.agents:
        for j in instance.agents:
            if i != j and _violates_ef1(instance, allocation, i, j):
                return i, j
    return None


def find_transferable_item(
    instance: Instance, allocation: Allocation, envious: str, envied: str
) -> str:
    """Lowest-index item in the envied bundle with positive marginal gain.

    For monotone submodular valuations such an item always exists whenever
    the envy does; if none is found the input was not submodular and
    TransferabilityViolated says so.
    """
    v = instance.valuation(envious)
    mine = allocation.bundle(envious)
    for o in instance.sorted_items(allocation.bundle(envied)):
        if marginal_gain(v, mine, o) > 0:
            return o
    raise TransferabilityViolated(envious, envied)


def _move(allocation: Allocation, item: str, source, target) -> Allocation:
    bundles = {a: set(b) for a, b in allocation.bundles.items()}
    withheld = set(allocation.withheld)
    if source == WITHHELD:
        withheld.discard(item)
    else:
        bundles[source].discard(item)
    if target == WITHHELD:
        withheld.add(item)
    else:
        bundles.setdefault(target, set()).add(item)
    return Allocation(bundles, withheld)


def eit_ef1(instance: Instance, initial: Allocation | None = None) -> tuple:
    """Clean, utilitarian-optimal, EF1 allocation by envy-induced transfers.

    Valuations must be matroid rank functions.  ``initial``, when given,
    must be a valid, clean, utilitarian-optimal allocation (re-validated
    here, AllocationError otherwise); by default the matroid-intersection
    optimum is used.  Pairs are scanned in instance order and the
    lowest-index transferable item moves first, so runs are reproducible.

    Returns (allocation, TransferLog).
    """
    optimum = max_common_independent_set(instance)
    best_usw = sum(values_vector(instance, optimum))
    if initial is None:
        allocation = optimum
    else:
        assert_valid(instance, initial)
        if not is_clean(instance, initial):
            raise AllocationError("initial allocation is not clean")
        initial_usw = sum(values_vector(instance, initial))
        if initial_usw != best_usw:
            raise AllocationError(
                f"initial allocation is not utilitarian optimal "
                f"(welfare {initial_usw}, optimum {best_usw})"
            )
        allocation = initial
    log = TransferLog()
    bound = instance.m * instance.m // 2 + 1
    for _ in range(bound):
        pair = _first_ef1_violation(instance, allocation)
        if pair is None:
            return allocation, log
        i, j = pair
        o = find_transferable_item(instance, allocation, i, j)
        phi_before = potential_phi(instance, allocation)
        allocation = _move(allocation, o, j, i)
        log.append(o, j, i, phi_before, potential_phi(instance, allocation))
    raise RuntimeError(
        "transfer loop exceeded the m^2/2 step bound; "
        "valuations are probably not matroid rank functions"
    )


@dataclass
class EitGeneralResult:
    allocation: Allocation
    log: TransferLog
    steps: int
    exhausted: bool  # True when the step budget ran out before EF1 held


def _require_assignment(instance: Instance, what: str):
    for a in instance.agents:
        if not isinstance(instance.valuation(a), AssignmentValuation):
            raise InapplicableAlgorithm(
                f"{what} needs assignment valuations; agent {a!r} has "
                f"{type(instance.valuation(a)).__name__}"
            )


def _global_optimum_matching(instance: Instance):
    """Max-weight matching of all items to (agent, member) pairs.

    Its total weight is the maximum utilitarian welfare for assignment
    valuations, since the per-bundle matchings are independent.
    """
    members = []
    weight_of = {}
    for a in instance.agents:
        v = instance.valuation(a)
        for mb in v.members:
            node = (a, mb)
            members.append(node)
            weight_of[node] = v.weights[mb]
    weight = lambda node, item: weight_of[node].get(item, 0)
    return max_weight_matching(list(instance.items), members, weight)


def initial_assignment_allocation(instance: Instance) -> Allocation:
    """Clean utilitarian-optimal start: global matching, then cleaning."""
    _, witness = _global_optimum_matching(instance)
    bundles = {a: set() for a in instance.agents}
    for item, (agent, _member) in witness.items():
        bundles[agent].add(item)
    return clean(instance, Allocation.from_bundles(instance, bundles))


def _unused_items(instance, valuation, bundle):
    _, witness = valuation.assignment_value(bundle)
    return [o for o in instance.sorted_items(bundle) if o not in witness]


def eit_general(instance: Instance, budget: int | None = None) -> EitGeneralResult:
    """Envy-induced transfers for weighted assignment valuations.

    Per round: among all pairs (i, j) where i envies j beyond one item and
    all items o in j's bundle with positive marginal gain for i, the triple
    maximizing  gain_i(o) + loss_j(o)  moves (ties: lowest i, then j, then
    o).  The donor is backfilled with the withheld item of maximum positive
    marginal gain (lowest index on ties), and items left unused by the new
    witness matchings are revoked and cascaded to the agent with the
    largest positive marginal gain, withheld when nobody gains; the
    recipient's bundle is cascaded first and then every bundle is swept, so
    no unused item survives a round.

    Termination is not guaranteed; after ``budget`` rounds (default
    10*m^2) the current allocation is returned with ``exhausted=True``.
    """
    _require_assignment(instance, "envy-induced transfers")
    m = instance.m
    if budget is None:
        budget = 10 * m * m
    allocation = initial_assignment_allocation(instance)
    log = TransferLog()
    steps = 0

    def phi():
        return potential_phi(instance, allocation)

    def revoke_and_cascade(item, holder):
        # hand the revoked item along positive marginal gains; every hop
        # strictly raises the receiving agent's value while no other value
        # changes, so states never repeat; the bound is a safety net only
        nonlocal allocation
        source = holder
        for _hop in range(10 * instance.n * m + 10):
            before = phi()
            allocation = _move(allocation, item, source, WITHHELD)
            gains = [
                (marginal_gain(instance.valuation(k), allocation.bundle(k), item), k)
                for k in instance.agents
            ]
            best = max(g for g, _ in gains)
            if best <= 0:
                log.append(item, source, WITHHELD, before, phi())
                return
            receiver = next(k for g, k in gains if g == best)
            allocation = _move(allocation, item, WITHHELD, receiver)
            log.append(item, source, receiver, before, phi())
            unused = _unused_items(
                instance, instance.valuation(receiver), allocation.bundle(receiver)
            )
            if not unused:
                return
            item, source = unused[0], receiver
        raise RuntimeError("revocation cascade failed to settle")

    def sweep_unused(first: str):
        # recipient first, then instance order, until no witness matching
        # leaves an item of its own bundle aside
        order = [first] + [a for a in instance.agents if a != first]
        settled = False
        while not settled:
            settled = True
            for k in order:
                unused = _unused_items(instance, instance.valuation(k), allocation.bundle(k))
                if unused:
                    settled = False
                    revoke_and_cascade(unused[0], k)
                    break

    while True:
        best_key = None
        best_triple = None
        for i in instance.agents:
            vi = instance.valuation(i)
            mine = allocation.bundle(i)
            base = vi.value(mine)
            for j in instance.agents:
                if i == j or not _violates_ef1(instance, allocation, i, j):
                    continue
                vj = instance.valuation(j)
                theirs = allocation.bundle(j)
                theirs_value = vj.value(theirs)
                for o in instance.sorted_items(theirs):
                    gain_i = vi.value(mine | {o}) - base
                    if gain_i <= 0:
                        continue
                    keep_j = theirs_value - vj.value(theirs - {o})
                    key = gain_i + keep_j
                    if best_key is None or key > best_key:
                        best_key = key
                        best_triple = (i, j, o)
        if best_triple is None:
            return EitGeneralResult(allocation, log, steps, exhausted=False)
        if steps >= budget:
            return EitGeneralResult(allocation, log, steps, exhausted=True)
        steps += 1
        i, j, o = best_triple
        before = phi()
        allocation = _move(allocation, o, j, i)
        log.append(o, j, i, before, phi())
        # donor backfill: best withheld item, if any helps
        vj = instance.valuation(j)
        best_gain = 0
        best_item = None
        for w in instance.sorted_items(allocation.withheld):
            g = marginal_gain(vj, allocation.bundle(j), w)
            if g > best_gain:
                best_gain = g
                best_item = w
        if best_item is not None:
            before = phi()
            allocation = _move(allocation, best_item, WITHHELD, j)
            log.append(best_item, WITHHELD, j, before, phi())
        sweep_unused(i)


def envy_graph_baseline(instance: Instance) -> Allocation:
    """Greedy envy-graph procedure with the max-marginal-gain heuristic.

    Each round allocates one unallocated item: among agents currently
    envied by no one, the (agent, item) pair of maximum marginal gain wins
    (ties: lowest agent index, then lowest item index).  When every agent
    is envied, the shortest envy cycle rotates bundles (each envious agent
    on the cycle takes the bundle it envies) until someone is unenvied.
    The result is complete and EF1 for any monotone valuations; it carries
    no efficiency guarantee and can even miss Pareto optimality.
    """
    bundles = {a: frozenset() for a in instance.agents}
    remaining = list(instance.items)

    def envy_edges():
        edges = {}
        for i in instance.agents:
            vi = instance.valuation(i)
            mine = vi.value(bundles[i])
            edges[i] = [
                j for j in instance.agents if j != i and vi.value(bundles[j]) > mine
            ]
        return edges

    def unenvied_agents(edges):
        envied = set()
        for outs in edges.values():
            envied.update(outs)
        return [a for a in instance.agents if a not in envied]

    def shortest_cycle(edges):
        best = None
        for start in instance.agents:
            queue = [(start, [start])]
            seen = {start}
            while queue:
                node, path = queue.pop(0)
                for nxt in edges[node]:
                    if nxt == start:
                        if best is None or len(path) < len(best):
                            best = path
                    elif nxt not in seen:
                        seen.add(nxt)
                        queue.append((nxt, path + [nxt]))
        return best

    max_rounds = len(remaining) * (instance.n**2 + 1) + instance.n**2
    for _round in range(max_rounds):
        if not remaining:
            break
        edges = envy_edges()
        free = unenvied_agents(edges)
        if not free:
            cycle = shortest_cycle(edges)
            if cycle is None:
                raise RuntimeError("every agent envied but the envy graph is acyclic")
            old = {a: bundles[a] for a in cycle}
            for idx, agent in enumerate(cycle):
                bundles[agent] = old[cycle[(idx + 1) % len(cycle)]]
            continue
        best = None
        for agent in free:
            v = instance.valuation(agent)
            base = v.value(bundles[agent])
            for item in remaining:
                gain = v.value(bundles[agent] | {item}) - base
                if best is None or gain > best[0]:
                    best = (gain, agent, item)
        _, agent, item = best
        bundles[agent] = bundles[agent] | {item}
        remaining.remove(item)
    if remaining:
        raise RuntimeError("envy-graph rounds exhausted before allocating everything")
    return Allocation.from_bundles(instance, bundles)


def waste(instance: Instance, allocation: Allocation) -> tuple:
    """(count, percentage) of allocated items doing no good where they sit.

    An allocated item is wasted when its holder's witness matching leaves
    it unassigned although some other agent has positive marginal gain for
    it.  Withheld items are not counted.  Requires assignment valuations
    (the notion of "unassigned under the witness" has no meaning otherwise).
    """
    _require_assignment(instance, "waste accounting")
    wasted = 0
    for h in instance.agents:
        bundle = allocation.bundle(h)
        if not bundle:
            continue
        _, witness = instance.valuation(h).assignment_value(bundle)
        for o in instance.sorted_items(bundle):
            if o in witness:
                continue
            for other in instance.agents:
                if other == h:
                    continue
                if marginal_gain(instance.valuation(other), allocation.bundle(other), o) > 0:
                    wasted += 1
                    break
    m = instance.m
    return wasted, (Fraction(100 * wasted, m) if m else Fraction(0))


def max_utilitarian_welfare(instance: Instance):
    """Exact optimal welfare for assignment instances (global matching)."""
    _require_assignment(instance, "welfare optimum")
    total, _ = _global_optimum_matching(instance)
    return total


def price_of_fairness(instance: Instance, allocation: Allocation):
    """Optimal welfare divided by achieved welfare.

    Exact Fraction >= 1 normally; a positive optimum over zero achieved
    welfare gives math.inf, and the 0/0 corner is defined as 1.
    """
    optimum = max_utilitarian_welfare(instance)
    achieved = sum(values_vector(instance, allocation))
    if achieved == 0:
        return 1 if optimum == 0 else math.inf
    return Fraction(optimum) / Fraction(achieved)
