"""Clean utilitarian-optimal allocations via matroid intersection.

Ground set: pairs (agent, item).  Two matroids live on it.  The partition
side allows at most one copy of each item; the union side allows a set
exactly when every agent's incident items form a clean bundle for them
(value equals size).  A maximum common independent set therefore *is* a
clean allocation of maximum utilitarian welfare, and is found here by
repeated shortest augmenting paths in the exchange graph.

Only use this on instances whose valuations are matroid rank functions
(binary-marginal, monotone, submodular); anything else either fails an
independence query mid-run (raising NonMatroidOracle with the offending
agent) or silently computes nonsense, which is why the CLI gates access
behind declared families or an explicit verification pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Allocation, Instance, NonMatroidOracle


@dataclass(frozen=True, order=True)
class GroundElement:
    """One (agent, item) pair of the intersection ground set."""

    agent: str
    item: str


class PartitionOracle:
    """Independent iff no item appears with two different agents."""

    def __init__(self, instance: Instance):
        self.instance = instance

    def independent(self, elements) -> bool:
        seen = set()
        for e in elements:
            if e.item in seen:
                return False
            seen.add(e.item)
        return True


class UnionOracle:
    """Independent iff every agent's incident item set is a clean bundle.

    With matroid rank valuations that reads: v_a(items of a) == their count.
    """

    def __init__(self, instance: Instance):
        self.instance = instance

    def independent(self, elements) -> bool:
        per_agent = {}
        for e in elements:
            per_agent.setdefault(e.agent, set()).add(e.item)
        for agent, items in per_agent.items():
            if self.instance.value(agent, items) != len(items):
                return False
        return True

    def offending_agent(self, elements):
        per_agent = {}
        for e in elements:
            per_agent.setdefault(e.agent, set()).add(e.item)
        for agent in self.instance.agents:
            items = per_agent.get(agent, set())
            if self.instance.value(agent, items) != len(items):
                return agent
        return None


def find_circuit(oracle, independent_set, element: GroundElement):
    """Unique circuit of ``independent_set + element``, or None.

    Requires ``independent_set`` to be independent in ``oracle`` (ValueError
    otherwise).  If the augmented set is still independent there is no
    circuit.  Otherwise the circuit is the element together with every x in
    the set whose removal restores independence; for matroids that set is
    the unique minimal dependent subset.
    """
    X = frozenset(independent_set)
    if not oracle.independent(X):
        raise ValueError("find_circuit requires an independent base set")
    if element in X:
        raise ValueError("element already belongs to the set")
    augmented = X | {element}
    if oracle.independent(augmented):
        return None
    circuit = {element}
    for x in sorted(X):
        if oracle.independent(augmented - {x}):
            circuit.add(x)
    return frozenset(circuit)


@dataclass(frozen=True)
class ExchangeGraph:
    """Exchange graph of a common independent set X.

    ``sources``: elements outside X addable on the partition side (item
    unused).  ``sinks``: elements outside X addable on the union side (the
    agent absorbs the item cleanly).  ``arcs`` maps each vertex to its
    successor list: from y outside X to the members of its union-side
    circuit, and from x inside X to the outside elements whose
    partition-side circuit contains x.  Augmenting along a shortest
    source-to-sink path keeps X common independent.
    """

    vertices: tuple
    sources: tuple
    sinks: tuple
    arcs: dict = field(hash=False)


def build_exchange_graph(instance: Instance, X) -> ExchangeGraph:
    X = frozenset(X)
    partition = PartitionOracle(instance)
    union = UnionOracle(instance)
    ground = [
        GroundElement(a, o) for a in instance.agents for o in instance.items
    ]
    outside = [e for e in ground if e not in X]
    sources = []
    sinks = []
    arcs = {e: [] for e in ground}
    for y in outside:
        c_union = find_circuit(union, X, y)
        c_part = find_circuit(partition, X, y)
        if c_part is None:
            sources.append(y)
        if c_union is None:
            sinks.append(y)
        if c_union is not None:
            for x in sorted(c_union - {y}):
                arcs[y].append(x)
        if c_part is not None:
            for x in sorted(c_part - {y}):
                arcs[x].append(y)
    for e in arcs:
        arcs[e].sort()
    return ExchangeGraph(
        vertices=tuple(ground),
        sources=tuple(sorted(sources)),
        sinks=tuple(sorted(sinks)),
        arcs=arcs,
    )


def _shortest_augmenting_path(graph: ExchangeGraph):
    """Shortest source-to-sink path; ties by lexicographically least vertices.

    Returns the vertex sequence or None.  Distance-to-sink is computed by a
    reverse breadth-first search, then the path is grown greedily: start at
    the least source of minimal distance and always step to the least
    successor one layer closer to a sink.
    """
    sinks = set(graph.sinks)
    if not sinks or not graph.sources:
        return None
    reverse = {v: [] for v in graph.vertices}
    for v, outs in graph.arcs.items():
        for w in outs:
            reverse[w].append(v)
    dist = {v: 0 for v in sinks}
    frontier = sorted(sinks)
    while frontier:
        nxt = []
        for v in frontier:
            for u in reverse[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = sorted(set(nxt))
    reachable = [s for s in graph.sources if s in dist]
    if not reachable:
        return None
    best = min(dist[s] for s in reachable)
    node = min(s for s in reachable if dist[s] == best)
    path = [node]
    while dist[node] > 0:
        node = min(w for w in graph.arcs[node] if dist.get(w) == dist[node] - 1)
        path.append(node)
    return path


def max_common_independent_set(instance: Instance) -> Allocation:
    """Clean allocation of maximum utilitarian welfare.

    Runs at most m augmentations; every augmentation grows the common
    independent set by exactly one element.  After each augmentation the
    new set is re-checked against both matroids; a failure means some
    valuation is not actually a matroid rank function and is reported as
    NonMatroidOracle naming that agent.
    """
    partition = PartitionOracle(instance)
    union = UnionOracle(instance)
    X = frozenset()
    while True:
        graph = build_exchange_graph(instance, X)
        path = _shortest_augmenting_path(graph)
        if path is None:
            break
        X = X ^ frozenset(path)
        if not partition.independent(X):
            raise NonMatroidOracle(
                path[-1].agent, "augmentation produced a duplicated item"
            )
        if not union.independent(X):
            agent = union.offending_agent(X)
            raise NonMatroidOracle(
                agent, "augmentation produced an unclean bundle"
            )
    bundles = {a: set() for a in instance.agents}
    for e in X:
        bundles[e.agent].add(e.item)
    return Allocation.from_bundles(instance, bundles)
