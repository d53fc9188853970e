"""Deterministic bipartite matching, exact arithmetic.

Single matching engine behind every assignment-style valuation and the
waste accounting.  Determinism of the returned witness matters (two runs on
the same input must agree item for item), so every tie-break follows the
caller-supplied item and member orders: items are inserted in order, and
alternating paths are found with a fixed relaxation order that only accepts
strict improvements.
"""

from __future__ import annotations


def max_cardinality_matching(items, members, adjacent) -> dict:
    """Maximum-cardinality matching of items to members.

    ``adjacent(member, item)`` says whether a pair is allowed.  Items are
    inserted in the given order, augmenting paths probe members in the given
    order.  Returns {item: member} for the matched items.
    """
    members = list(members)
    matched_item = {}  # member -> item

    def try_place(item, banned):
        for member in members:
            if member in banned or not adjacent(member, item):
                continue
            banned.add(member)
            if member not in matched_item or try_place(matched_item[member], banned):
                matched_item[member] = item
                return True
        return False

    for item in items:
        try_place(item, set())
    return {item: member for member, item in matched_item.items()}


def max_weight_matching(items, members, weight) -> tuple:
    """Maximum-weight matching of items to members; items may stay unmatched.

    ``weight(member, item)`` must return an exact number (int or Fraction);
    non-positive weights are treated as absent edges, so the witness never
    pairs an item with a member that values it at zero.

    Returns (total weight, {item: member}).

    Method: successive augmentation.  Each round finds the alternating path
    of maximum net gain from any unmatched item to any free member
    (Bellman-Ford style relaxation over the residual graph; exact arithmetic)
    and applies it while the gain is positive.  After every round the current
    matching has maximum weight among matchings of its size, which is what
    makes the greedy stop rule correct.
    """
    items = list(items)
    members = list(members)
    edges = {}  # (item, member) -> weight, positive only
    for it in items:
        for mb in members:
            w = weight(mb, it)
            if w > 0:
                edges[(it, mb)] = w
    match_of_item = {}   # item -> member
    match_of_member = {}  # member -> item

    while True:
        # nodes: ("i", item) and ("m", member); gains are maximized
        gain = {}
        parent = {}
        for it in items:
            if it not in match_of_item:
                gain[("i", it)] = 0
        if not gain:
            break
        # relax until stable; path length is bounded by node count
        for _ in range(len(items) + len(members) + 1):
            improved = False
            for it in items:
                gi = gain.get(("i", it))
                if gi is None:
                    continue
                for mb in members:
                    w = edges.get((it, mb))
                    if w is None or match_of_item.get(it) == mb:
                        continue
                    g = gi + w
                    node = ("m", mb)
                    if node not in gain or g > gain[node]:
                        gain[node] = g
                        parent[node] = ("i", it)
                        improved = True
                    # member -> its matched item (undo that edge)
                    if mb in match_of_member:
                        it2 = match_of_member[mb]
                        g2 = gain[node] - edges[(it2, mb)]
                        node2 = ("i", it2)
                        if node2 not in gain or g2 > gain[node2]:
                            gain[node2] = g2
                            parent[node2] = node
                            improved = True
            if not improved:
                break
        best = None
        for mb in members:
            if mb in match_of_member:
                continue
            node = ("m", mb)
            if node in gain and gain[node] > 0:
                if best is None or gain[node] > gain[best]:
                    best = node
        if best is None:
            break
        # reconstruct the alternating path, then flip its edges
        adds = []
        removes = []
        node = best
        for _ in range(len(items) + len(members) + 1):
            prev = parent.get(node)
            if node[0] == "m":
                adds.append((prev[1], node[1]))
                node = prev
            else:
                if prev is None:
                    break
                removes.append((node[1], prev[1]))
                node = prev
        else:
            raise RuntimeError("augmenting path reconstruction did not terminate")
        for it, mb in removes:
            del match_of_item[it]
            del match_of_member[mb]
        for it, mb in adds:
            match_of_item[it] = mb
            match_of_member[mb] = it

    total = sum(edges[(it, mb)] for it, mb in match_of_item.items())
    return total, dict(match_of_item)
