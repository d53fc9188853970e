"""Valuation families and the exhaustive matroid-rank verifier.

All families expose value(bundle) with exact results.  The assignment
families additionally expose assignment_value(bundle), returning the value
together with a deterministic witness matching of bundle items to members;
the witness never pairs an item with a member that weights it zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import BudgetExceeded
from .matching import max_cardinality_matching, max_weight_matching

EXHAUSTIVE_LIMIT = 14


def _norm(value):
    """Collapse integral Fractions to int; leave everything else alone."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


@dataclass(frozen=True)
class BinaryAdditiveValuation:
    """v(S) = number of approved items inside S."""

    approved: frozenset

    def __post_init__(self):
        object.__setattr__(self, "approved", frozenset(self.approved))

    def value(self, bundle) -> int:
        return len(self.approved & frozenset(bundle))


class AssignmentValuation:
    """v(S) = weight of a maximum-weight matching of S's items to members.

    ``weights`` maps member -> {item: weight}; weights must be non-negative
    ints or Fractions, and zero weights are equivalent to absent entries.
    Member order is the order of ``members``; it drives witness tie-breaks.
    """

    def __init__(self, members, weights: Mapping):
        self.members = tuple(members)
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate member identifiers")
        wt = {}
        for member in self.members:
            row = {}
            for item, w in dict(weights.get(member, {})).items():
                w = w if isinstance(w, int) else Fraction(w)
                if w < 0:
                    raise ValueError(f"negative weight for ({member!r}, {item!r})")
                if w > 0:
                    row[item] = _norm(w)
            wt[member] = row
        self.weights = wt
        self._cache = {}

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.members == other.members
            and self.weights == other.weights
        )

    def __repr__(self):
        return f"{type(self).__name__}(members={self.members!r})"

    def weight(self, member, item):
        return self.weights[member].get(item, 0)

    def assignment_value(self, bundle) -> tuple:
        """(value, witness) where witness maps items to distinct members."""
        bundle = frozenset(bundle)
        hit = self._cache.get(bundle)
        if hit is None:
            items = sorted(bundle)
            total, witness = max_weight_matching(items, self.members, self.weight)
            hit = (_norm(total), witness)
            self._cache[bundle] = hit
        return hit

    def value(self, bundle):
        return self.assignment_value(bundle)[0]


class BinaryAssignmentValuation(AssignmentValuation):
    """Assignment valuation with 0/1 weights, given as adjacency lists.

    v(S) is then the size of a maximum matching of S's items to members,
    i.e. the rank of S in the transversal matroid of the adjacency graph.
    """

    def __init__(self, adjacency: Mapping):
        members = tuple(adjacency)
        weights = {mb: {it: 1 for it in items} for mb, items in adjacency.items()}
        super().__init__(members, weights)
        self.adjacency = {mb: frozenset(items) for mb, items in adjacency.items()}

    def assignment_value(self, bundle) -> tuple:
        bundle = frozenset(bundle)
        hit = self._cache.get(bundle)
        if hit is None:
            items = sorted(bundle)
            witness = max_cardinality_matching(
                items, self.members, lambda mb, it: it in self.adjacency[mb]
            )
            hit = (len(witness), witness)
            self._cache[bundle] = hit
        return hit


@dataclass(frozen=True)
class TruncatedValuation:
    """v(S) = min(inner value, cap).  Caps a binary-marginal valuation.

    Capping preserves binary marginals, monotonicity and submodularity, so
    truncating a matroid rank function yields another matroid rank function.
    """

    inner: object
    cap: int

    def __post_init__(self):
        if (isinstance(self.cap, bool) or not isinstance(self.cap, int)
                or self.cap < 0):
            raise ValueError(f"cap must be a non-negative integer, got {self.cap!r}")

    def value(self, bundle):
        return min(self.inner.value(frozenset(bundle)), self.cap)


@dataclass(frozen=True)
class ScaledValuation:
    """v(S) = lam * inner(S) for a positive rational lam.

    With a binary-marginal inner valuation, marginal gains are 0 or lam, so
    a bundle is clean exactly when it is worth lam times its size.  For
    lam != 1 this family leaves the matroid-rank class on purpose.
    """

    inner: object
    lam: Fraction

    def __post_init__(self):
        lam = self.lam if isinstance(self.lam, int) else Fraction(self.lam)
        if lam <= 0:
            raise ValueError(f"scale factor must be positive, got {self.lam!r}")
        object.__setattr__(self, "lam", _norm(lam))

    def value(self, bundle):
        return _norm(self.lam * self.inner.value(frozenset(bundle)))


@dataclass(frozen=True)
class AllOrNothingValuation:
    """v(S) = 1 if S contains every required item, else 0.

    With two or more required items this valuation is not submodular (the
    marginal gain of the last missing piece jumps from 0 to 1), which makes
    it the canonical negative control for matroid-rank checks.
    """

    required: frozenset

    def __post_init__(self):
        object.__setattr__(self, "required", frozenset(self.required))

    def value(self, bundle) -> int:
        return 1 if self.required <= frozenset(bundle) else 0


def truncate(valuation, cap: int) -> TruncatedValuation:
    return TruncatedValuation(valuation, cap)


def scale(valuation, lam) -> ScaledValuation:
    return ScaledValuation(valuation, lam)


@dataclass(frozen=True)
class RankReport:
    """Outcome of verify_matroid_rank.

    ``ok`` is the verdict; on failure ``axiom`` names the broken property
    ("empty value", "monotonicity", "binary marginals", "cardinality bound",
    "submodularity") and ``witness`` is a dict with the offending subset(s),
    item(s) and values.  ``subsets_checked`` records the scan size.
    """

    ok: bool
    axiom: str = ""
    witness: dict = field(default_factory=dict)
    subsets_checked: int = 0


def verify_matroid_rank(valuation, items, limit: int = EXHAUSTIVE_LIMIT) -> RankReport:
    """Exhaustively certify that ``valuation`` is a matroid rank function.

    Checks, over every subset of ``items``: value of the empty set is zero,
    0 <= v(S) <= |S|, marginal gains lie in {0, 1} (monotone), and the
    local submodularity condition  v(S + o) - v(S) >= v(S + o' + o) - v(S + o')
    for all o != o' outside S.  Together these are equivalent to the rank
    axioms of a matroid.

    The scan is exact and exponential; instances with more than ``limit``
    items are refused with BudgetExceeded rather than silently sampled.
    The first counterexample in deterministic scan order (subsets by
    ascending bitmask, items by ascending index) is reported.
    """
    items = list(items)
    m = len(items)
    if m > limit:
        raise BudgetExceeded("exhaustive matroid-rank verification", 2**m, 2**limit)

    table = [0] * (2**m)
    subset = [frozenset()] * (2**m)
    for mask in range(2**m):
        if mask:
            low = (mask & -mask).bit_length() - 1
            subset[mask] = subset[mask ^ (1 << low)] | {items[low]}
        table[mask] = valuation.value(subset[mask])
    checked = 2**m

    if table[0] != 0:
        return RankReport(False, "empty value", {"value": table[0]}, checked)

    for mask in range(2**m):
        size = mask.bit_count()
        if not 0 <= table[mask] <= size:
            return RankReport(
                False,
                "cardinality bound",
                {"subset": subset[mask], "value": table[mask], "size": size},
                checked,
            )
        for k in range(m):
            bit = 1 << k
            if mask & bit:
                continue
            gain = table[mask | bit] - table[mask]
            if gain < 0:
                return RankReport(
                    False,
                    "monotonicity",
                    {"subset": subset[mask], "item": items[k], "gain": gain},
                    checked,
                )
            if gain not in (0, 1):
                return RankReport(
                    False,
                    "binary marginals",
                    {"subset": subset[mask], "item": items[k], "gain": gain},
                    checked,
                )

    # local submodularity: adding context never raises a marginal gain
    for mask in range(2**m):
        for k in range(m):
            bit = 1 << k
            if mask & bit:
                continue
            gain_here = table[mask | bit] - table[mask]
            for k2 in range(m):
                bit2 = 1 << k2
                if k2 == k or mask & bit2:
                    continue
                gain_later = table[mask | bit2 | bit] - table[mask | bit2]
                if gain_here < gain_later:
                    return RankReport(
                        False,
                        "submodularity",
                        {
                            "subset": subset[mask],
                            "item": items[k],
                            "context_item": items[k2],
                            "gain_without": gain_here,
                            "gain_with": gain_later,
                        },
                        checked,
                    )
    return RankReport(True, subsets_checked=checked)


def spot_check_matroid_rank(valuation, items, samples: int, seed: int) -> RankReport:
    """Probabilistic variant for instances too large to scan exhaustively.

    Samples random (subset, item, context item) triples and checks the same
    axioms on them.  A pass is NOT a certificate, only a failure is
    conclusive; callers must label results accordingly.
    """
    import random

    items = list(items)
    rng = random.Random(seed)
    checked = 0
    for _ in range(samples):
        sub = frozenset(it for it in items if rng.random() < 0.5)
        outside = [it for it in items if it not in sub]
        checked += 1
        base = valuation.value(sub)
        if not 0 <= base <= len(sub):
            return RankReport(
                False, "cardinality bound", {"subset": sub, "value": base}, checked
            )
        if not outside:
            continue
        o = rng.choice(outside)
        gain = valuation.value(sub | {o}) - base
        if gain < 0:
            return RankReport(False, "monotonicity", {"subset": sub, "item": o, "gain": gain}, checked)
        if gain not in (0, 1):
            return RankReport(
                False, "binary marginals", {"subset": sub, "item": o, "gain": gain}, checked
            )
        rest = [it for it in outside if it != o]
        if rest:
            o2 = rng.choice(rest)
            with_ctx = valuation.value(sub | {o2, o}) - valuation.value(sub | {o2})
            if gain < with_ctx:
                return RankReport(
                    False,
                    "submodularity",
                    {
                        "subset": sub,
                        "item": o,
                        "context_item": o2,
                        "gain_without": gain,
                        "gain_with": with_ctx,
                    },
                    checked,
                )
    return RankReport(True, subsets_checked=checked)
