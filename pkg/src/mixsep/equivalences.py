"""Weak barbed bisimilarity, coupled similarity, and junk detection.

Both equivalences are computed as greatest fixpoints over the product of two
finite reduction graphs.  The weak-reachability closure of each graph is
precomputed, so a challenge ``s => s'`` quantifies over the reachable set of
``s`` and a response likewise.  Cross-calculus comparisons work over the
shared alphabet of free names: a session barb ``y`` on one side matches a
session barb ``y`` on the other by name identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .semantics import (
    Barb, ReductionGraph, TruncatedError, barbs, enumerate_steps,
)
from .terms import Term


@dataclass(frozen=True)
class RelationWitness:
    """A relation over state pairs, checkable against its defining clauses."""

    kind: str  # "bisimulation" or "coupled-simulation-pair"
    pairs: frozenset[tuple[int, int]]

    def to_json(self) -> dict:
        return {"kind": self.kind, "pairs": sorted(self.pairs)}


def _require_complete(*graphs: ReductionGraph) -> None:
    for g in graphs:
        if g.truncated:
            raise TruncatedError(
                "equivalence checking needs a complete reduction graph")


def _closures(g: ReductionGraph) -> list[frozenset[int]]:
    return [g.reachable(s) for s in range(len(g.terms))]


def _weak_barb_sets(g: ReductionGraph,
                    reach: list[frozenset[int]]) -> list[frozenset[Barb]]:
    out = []
    for s in range(len(g.terms)):
        acc: set[Barb] = set()
        for d in reach[s]:
            acc |= g.barbmap[d]
        out.append(frozenset(acc))
    return out


def bisimulation_relation(
    gA: ReductionGraph, gB: ReductionGraph,
) -> set[tuple[int, int]]:
    """The greatest weak reduction barbed bisimulation between two graphs."""
    _require_complete(gA, gB)
    reach_a, reach_b = _closures(gA), _closures(gB)
    wb_a = _weak_barb_sets(gA, reach_a)
    wb_b = _weak_barb_sets(gB, reach_b)

    related = {
        (s, t)
        for s in range(len(gA.terms))
        for t in range(len(gB.terms))
        if wb_a[s] == wb_b[t]
    }
    changed = True
    while changed:
        changed = False
        for (s, t) in list(related):
            ok = all(
                any((s2, t2) in related for t2 in reach_b[t])
                for s2 in gA.successors(s)
            ) and all(
                any((s2, t2) in related for s2 in reach_a[s])
                for t2 in gB.successors(t)
            )
            if not ok:
                related.discard((s, t))
                changed = True
    return related


def weakly_bisimilar(
    gA: ReductionGraph, gB: ReductionGraph, a: int, b: int,
) -> tuple[bool, RelationWitness | None]:
    """Weak reduction barbed bisimilarity of state ``a`` in gA and ``b`` in gB."""
    related = bisimulation_relation(gA, gB)
    if (a, b) in related:
        return True, RelationWitness("bisimulation", frozenset(related))
    return False, None


def validate_bisimulation(
    gA: ReductionGraph, gB: ReductionGraph, w: RelationWitness,
) -> bool:
    """Re-check a claimed bisimulation against the defining clauses."""
    reach_a, reach_b = _closures(gA), _closures(gB)
    wb_a = _weak_barb_sets(gA, reach_a)
    wb_b = _weak_barb_sets(gB, reach_b)
    for (s, t) in w.pairs:
        if wb_a[s] != wb_b[t]:
            return False
        for s2 in gA.successors(s):
            if not any((s2, t2) in w.pairs for t2 in reach_b[t]):
                return False
        for t2 in gB.successors(t):
            if not any((s2, t2) in w.pairs for s2 in reach_a[s]):
                return False
    return True


def coupled_similar(
    gA: ReductionGraph, gB: ReductionGraph, a: int, b: int,
) -> tuple[bool, tuple[RelationWitness, RelationWitness] | None]:
    """Coupled similarity: coupled simulations in both directions."""
    _require_complete(gA, gB)
    r1 = _coupled_simulation(gA, gB)
    r2 = _coupled_simulation(gB, gA)
    if (a, b) in r1 and (b, a) in r2:
        return True, (
            RelationWitness("coupled-simulation-pair", frozenset(r1)),
            RelationWitness("coupled-simulation-pair", frozenset(r2)),
        )
    return False, None


def _coupled_simulation(
    gA: ReductionGraph, gB: ReductionGraph,
) -> set[tuple[int, int]]:
    """Greatest coupled simulation of gA states by gB states.

    A pair (s, t) survives if t simulates every move of s, s's weak barbs are
    included in t's, and t can commit: some t => t' with (t', s) in the
    converse-completable sense of the coupling clause.
    """
    reach_a, reach_b = _closures(gA), _closures(gB)
    wb_a = _weak_barb_sets(gA, reach_a)
    wb_b = _weak_barb_sets(gB, reach_b)

    fwd = {
        (s, t)
        for s in range(len(gA.terms))
        for t in range(len(gB.terms))
        if wb_a[s] <= wb_b[t]
    }
    bwd = {
        (t, s)
        for t in range(len(gB.terms))
        for s in range(len(gA.terms))
        if wb_b[t] <= wb_a[s]
    }
    changed = True
    while changed:
        changed = False
        for (s, t) in list(fwd):
            ok = all(
                any((s2, t2) in fwd for t2 in reach_b[t])
                for s2 in gA.successors(s)
            ) and all(
                # coupling: every s => s' admits t => t' with (t', s') related
                any((t2, s2) in bwd for t2 in reach_b[t])
                for s2 in reach_a[s]
            )
            if not ok:
                fwd.discard((s, t))
                changed = True
        for (t, s) in list(bwd):
            ok = all(
                any((t2, s2) in bwd for s2 in reach_a[s])
                for t2 in gB.successors(t)
            ) and all(
                any((s2, t2) in fwd for s2 in reach_a[s])
                for t2 in reach_b[t]
            )
            if not ok:
                bwd.discard((t, s))
                changed = True
    return fwd


def validate_coupled_simulation(
    gA: ReductionGraph, gB: ReductionGraph,
    w: RelationWitness, converse: RelationWitness,
) -> bool:
    """Re-check the simulation, barb-inclusion and coupling clauses."""
    reach_a, reach_b = _closures(gA), _closures(gB)
    wb_a = _weak_barb_sets(gA, reach_a)
    wb_b = _weak_barb_sets(gB, reach_b)
    for (s, t) in w.pairs:
        if not wb_a[s] <= wb_b[t]:
            return False
        for s2 in gA.successors(s):
            if not any((s2, t2) in w.pairs for t2 in reach_b[t]):
                return False
        for s2 in reach_a[s]:
            if not any((t2, s2) in converse.pairs for t2 in reach_b[t]):
                return False
    return True


def is_junk(calculus: str, t: Term) -> bool:
    """Stuck and barb-free: invisible up to weak barbed bisimilarity."""
    return not enumerate_steps(calculus, t) and not barbs(calculus, t)
