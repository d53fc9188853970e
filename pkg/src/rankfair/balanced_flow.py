"""Leximin allocations for unit-weight assignment valuations via network flow.

The instance becomes a four-layer unit-capacity network: source -> group ->
member -> item -> sink, with a member-item arc exactly where the member is
adjacent to the item.  Any integral maximum flow is a clean utilitarian
optimal allocation (group h receives the items its members absorb, and the
out-flow f(s,h) equals v_h(A_h)).  Among all maximum flows, the one whose
out-flow vector is leximin-maximal is found by making the source arcs
convex: the k-th unit entering group h costs 2k-1, so a flow of k units
costs k^2, and a min-cost maximum flow minimizes the sum of squared
out-flows, which picks the leximin (equivalently Nash-optimal) vector.

Costs are small non-negative integers, so successive shortest paths with
Johnson potentials and an index-keyed Dijkstra stay exact and deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace

from .core import Allocation, AllocationError, InapplicableAlgorithm, Instance
from .valuations import AssignmentValuation, BinaryAssignmentValuation


@dataclass(frozen=True)
class FlowEdge:
    tail: tuple
    head: tuple
    capacity: int
    cost: int = 0
    flow: int = 0


@dataclass(frozen=True)
class FlowNetwork:
    """Edge list network; node names are structured tuples.

    ("s",) and ("t",) are the terminals, ("g", agent) the group layer,
    ("m", agent, member) the member layer, ("o", item) the item layer.
    """

    nodes: tuple
    edges: tuple
    source: tuple = ("s",)
    sink: tuple = ("t",)

    def out_flows(self) -> dict:
        """Flow leaving the source, keyed by agent."""
        return {
            e.head[1]: e.flow for e in self.edges if e.tail == self.source
        }


def _node_label(node: tuple) -> str:
    return "/".join(str(part) for part in node)


def network_dump(network: FlowNetwork) -> str:
    """Tab-separated edge list: tail, head, capacity, cost, flow."""
    lines = ["tail\thead\tcapacity\tcost\tflow"]
    for e in network.edges:
        lines.append(
            f"{_node_label(e.tail)}\t{_node_label(e.head)}\t{e.capacity}\t{e.cost}\t{e.flow}"
        )
    return "\n".join(lines) + "\n"


def _adjacency(instance: Instance) -> dict:
    """agent -> member -> sorted item list; rejects non-unit weights."""
    adj = {}
    for a in instance.agents:
        v = instance.valuation(a)
        if isinstance(v, BinaryAssignmentValuation):
            adj[a] = {mb: instance.sorted_items(v.adjacency[mb]) for mb in v.members}
        elif isinstance(v, AssignmentValuation):
            rows = {}
            for mb in v.members:
                for item, w in v.weights[mb].items():
                    if w != 1:
                        raise InapplicableAlgorithm(
                            f"flow construction needs unit weights; agent {a!r} "
                            f"member {mb!r} weighs {item!r} at {w}"
                        )
                rows[mb] = instance.sorted_items(v.weights[mb])
            adj[a] = rows
        else:
            raise InapplicableAlgorithm(
                f"flow construction needs assignment valuations; agent {a!r} "
                f"has {type(v).__name__}"
            )
    return adj


def build_flow_network(instance: Instance) -> FlowNetwork:
    """Zero-flow network for a unit-weight assignment instance."""
    adj = _adjacency(instance)
    m = instance.m
    s, t = ("s",), ("t",)
    nodes = [s]
    edges = []
    for a in instance.agents:
        nodes.append(("g", a))
        edges.append(FlowEdge(s, ("g", a), capacity=m))
    for a in instance.agents:
        for mb in instance.valuation(a).members:
            nodes.append(("m", a, mb))
            edges.append(FlowEdge(("g", a), ("m", a, mb), capacity=1))
    for a in instance.agents:
        for mb in instance.valuation(a).members:
            for item in adj[a][mb]:
                edges.append(FlowEdge(("m", a, mb), ("o", item), capacity=1))
    for item in instance.items:
        nodes.append(("o", item))
        edges.append(FlowEdge(("o", item), t, capacity=1))
    nodes.append(t)
    return FlowNetwork(nodes=tuple(nodes), edges=tuple(edges))


class _MinCostFlow:
    """Successive shortest paths on unit arcs, exact integer costs."""

    def __init__(self, node_count: int):
        self.node_count = node_count
        self.head = []
        self.cap = []
        self.cost = []
        self.adj = [[] for _ in range(node_count)]

    def add_arc(self, u: int, v: int, cap: int, cost: int) -> int:
        idx = len(self.head)
        self.head.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.adj[u].append(idx)
        self.head.append(u)
        self.cap.append(0)
        self.cost.append(-cost)
        self.adj[v].append(idx + 1)
        return idx

    def run(self, s: int, t: int) -> None:
        """Max flow of min cost; pushes one unit per shortest path.

        Among equal-cost augmenting paths the lexicographically smallest
        node-index sequence wins, so the flow witness is deterministic.
        Labels are (reduced distance, simple path); extending a path keeps
        the lexicographic order between labels of a common endpoint, so the
        label-correcting search below converges to the lex-least optimum.
        """
        n = self.node_count
        potential = [0] * n
        while True:
            best: list = [None] * n
            best[s] = (0, (s,))
            heap = [best[s]]
            while heap:
                label = heapq.heappop(heap)
                d, path = label
                u = path[-1]
                if label > best[u]:
                    continue
                for idx in self.adj[u]:
                    if self.cap[idx] <= 0:
                        continue
                    v = self.head[idx]
                    if v in path:
                        continue
                    cand = (d + self.cost[idx] + potential[u] - potential[v],
                            path + (v,))
                    if best[v] is None or cand < best[v]:
                        best[v] = cand
                        heapq.heappush(heap, cand)
            if best[t] is None:
                return
            dist_t = best[t][0]
            for v in range(n):
                if best[v] is not None:
                    potential[v] += min(best[v][0], dist_t)
            path = best[t][1]
            for u, v in zip(path, path[1:]):
                idx = min((i for i in self.adj[u]
                           if self.head[i] == v and self.cap[i] > 0),
                          key=lambda i: (self.cost[i], i))
                self.cap[idx] -= 1
                self.cap[idx ^ 1] += 1

    def flow_on(self, idx: int) -> int:
        return self.cap[idx ^ 1]


def balanced_max_flow(network: FlowNetwork) -> FlowNetwork:
    """Maximum flow whose source out-flow vector is leximin-maximal.

    Expands every source arc of capacity c into c parallel unit arcs with
    costs 1, 3, 5, ..., so that pushing k units into a group costs k^2,
    then runs min-cost max-flow.  Returns a copy of the network with the
    ``flow`` fields filled in (aggregated over the parallel arcs).
    """
    index = {node: k for k, node in enumerate(network.nodes)}
    solver = _MinCostFlow(len(network.nodes))
    arc_groups = []
    for e in network.edges:
        u, v = index[e.tail], index[e.head]
        if e.tail == network.source:
            arcs = [
                solver.add_arc(u, v, 1, 2 * k + 1) for k in range(e.capacity)
            ]
        else:
            arcs = [solver.add_arc(u, v, e.capacity, e.cost)]
        arc_groups.append(arcs)
    solver.run(index[network.source], index[network.sink])
    flowed = tuple(
        replace(e, flow=sum(solver.flow_on(idx) for idx in arcs))
        for e, arcs in zip(network.edges, arc_groups)
    )
    return FlowNetwork(nodes=network.nodes, edges=flowed, source=network.source, sink=network.sink)


def flow_to_allocation(network: FlowNetwork, instance: Instance) -> Allocation:
    """Read the allocation off a flowed network.

    Items whose member arc carries one unit go to that member's group; items
    with no flow are withheld.  Zero total flow therefore withholds
    everything.  Non-integral or over-unit flows are structural corruption
    and raise ValueError.
    """
    bundles = {a: set() for a in instance.agents}
    for e in network.edges:
        if e.tail[0] == "m" and e.head[0] == "o":
            if e.flow not in (0, 1):
                raise ValueError(
                    f"non-unit flow {e.flow!r} on arc {_node_label(e.tail)} -> "
                    f"{_node_label(e.head)}"
                )
            if e.flow == 1:
                bundles[e.tail[1]].add(e.head[1])
    return Allocation.from_bundles(instance, bundles)


def leximin_flow_allocation(instance: Instance) -> tuple:
    """Build, solve and read back: returns (allocation, flowed network).

    Sanity-checks that each group's source out-flow equals its realized
    value under the extracted allocation; a mismatch means the solver or
    the extraction is corrupt.
    """
    network = balanced_max_flow(build_flow_network(instance))
    allocation = flow_to_allocation(network, instance)
    out = network.out_flows()
    for agent in instance.agents:
        realized = instance.value(agent, allocation.bundle(agent))
        if out.get(agent, 0) != realized:
            raise AllocationError(
                f"source out-flow {out.get(agent, 0)} of group {agent!r} "
                f"differs from its realized value {realized}"
            )
    return allocation, network
