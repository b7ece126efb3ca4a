"""Conflict and distributability analysis, synchronisation patterns M and star.

A conflict means two steps of the same source consume the same guard
occurrence (a choice, prefix, or conditional) — each disables the other.
Distributable steps can instead be performed by disjoint parallel components
of the standard form.  Occurrences consumed under a replication never count
for either notion: each such step conceptually takes its own fresh unfolding.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .canonical import term_key
from .semantics import ReductionStep, enumerate_steps
from .terms import CMVP, Name, Term, TermError


@dataclass(frozen=True)
class PatternWitness:
    kind: str  # "M" or "star"
    steps: tuple[ReductionStep, ...]
    conflicts: tuple[tuple[int, int], ...]
    distributable_pairs: tuple[tuple[int, int], ...]

    def to_json(self, step_ids: list[int] | None = None) -> dict:
        ids = step_ids if step_ids is not None else list(range(len(self.steps)))
        return {
            "kind": self.kind,
            "steps": ids,
            "conflicts": [list(c) for c in self.conflicts],
            "distributable": [list(d) for d in self.distributable_pairs],
        }


def _consumed(step: ReductionStep) -> frozenset:
    return frozenset(o for o in step.footprint.occurrences if not o.replicated)


def in_conflict(a: ReductionStep, b: ReductionStep) -> bool:
    """Do the two steps compete for a guard occurrence of their shared source?"""
    if term_key(a.source) != term_key(b.source):
        raise TermError("conflict is only defined for steps of the same term")
    if a == b:
        return False
    return bool(_consumed(a) & _consumed(b))


def distributable(t: Term, steps: list[ReductionStep]) -> bool:
    """Can the steps be performed by pairwise disjoint parallel components?"""
    key = term_key(t)
    for s in steps:
        if term_key(s.source) != key:
            raise TermError("distributability needs steps of the given term")
    used: set[int] = set()
    for s in steps:
        comps = {o.path[0] for o in _consumed(s)}
        if comps & used:
            return False
        used |= comps
    return True


def iter_pattern_m(calculus: str, t: Term):
    """All M witnesses, in deterministic order over step triples."""
    steps = enumerate_steps(calculus, t)
    conflict = _conflict_matrix(steps)
    for b in range(len(steps)):
        partners = [i for i in range(len(steps)) if conflict[b][i]]
        for a, c in combinations(sorted(partners), 2):
            if conflict[a][c]:
                continue
            if distributable(t, [steps[a], steps[c]]):
                yield PatternWitness(
                    "M", (steps[a], steps[b], steps[c]),
                    ((0, 1), (1, 2)), ((0, 2),))


def find_pattern_m(calculus: str, t: Term) -> PatternWitness | None:
    """Three steps a, b, c with conflicts a-b and b-c and {a, c} distributable."""
    return next(iter_pattern_m(calculus, t), None)


def find_pattern_star(calculus: str, t: Term,
                      distinct_targets: bool = True) -> PatternWitness | None:
    """Five steps with pairwise distinct results whose conflict graph is a
    5-cycle and whose non-neighbours are distributable.

    With ``distinct_targets=False`` the distinct-result clause is dropped;
    the weaker pattern depends only on step footprints, so its absence over a
    corpus rules out the full pattern over every payload/continuation variant
    of that corpus.
    """
    steps = enumerate_steps(calculus, t)
    n = len(steps)
    if n < 5:
        return None
    conflict = _conflict_matrix(steps)
    degree = [sum(row) for row in conflict]
    # every node of a 5-cycle needs two conflict partners among the chosen five
    candidates = [i for i in range(n) if degree[i] >= 2]
    targets = [term_key(s.target) for s in steps]
    for subset in combinations(candidates, 5):
        if distinct_targets and len({targets[i] for i in subset}) != 5:
            continue
        cycle = _five_cycle(subset, conflict)
        if cycle is None:
            continue
        ok = True
        pairs = []
        for i, j in combinations(range(5), 2):
            si, sj = cycle[i], cycle[j]
            if conflict[si][sj]:
                continue
            if not distributable(t, [steps[si], steps[sj]]):
                ok = False
                break
            pairs.append((i, j))
        if ok:
            chosen = tuple(steps[i] for i in cycle)
            edges = tuple(
                (i, j) for i, j in combinations(range(5), 2)
                if conflict[cycle[i]][cycle[j]]
            )
            return PatternWitness("star", chosen, edges, tuple(pairs))
    return None


def _conflict_matrix(steps) -> list[list[bool]]:
    n = len(steps)
    m = [[False] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        if in_conflict(steps[i], steps[j]):
            m[i][j] = m[j][i] = True
    return m


def _five_cycle(subset, conflict) -> tuple[int, ...] | None:
    """Order the 5 steps along their conflict edges iff they form a 5-cycle."""
    adj = {
        i: [j for j in subset if j != i and conflict[i][j]]
        for i in subset
    }
    if any(len(v) != 2 for v in adj.values()):
        return None
    start = min(subset)
    cycle = [start]
    prev, cur = None, start
    for _ in range(4):
        nxt = [x for x in adj[cur] if x != prev]
        if not nxt:
            return None
        prev, cur = cur, nxt[0]
        if cur in cycle:
            return None
        cycle.append(cur)
    if start not in adj[cur]:
        return None
    return tuple(cycle)


@dataclass(frozen=True)
class DiamondWitness:
    b: Term
    c: Term
    d: Term


def check_confluence(network: Term, a: ReductionStep,
                     b: ReductionStep) -> DiamondWitness | None:
    """Two choice-synchronisations on distinct channels commute to a common
    successor; returns the diamond, or None as a counterexample record."""
    key = term_key(network)
    if term_key(a.source) != key or term_key(b.source) != key:
        raise TermError("both steps must reduce the given network")
    if a.footprint.kind != "communication" or b.footprint.kind != "communication":
        raise TermError("confluence concerns choice synchronisations")
    if a.footprint.endpoints == b.footprint.endpoints:
        raise TermError("the two steps must use distinct channel endpoints")
    if _consumed(a) & _consumed(b):
        raise TermError("the two steps must not be in conflict")
    b_targets = {term_key(s.target): s.target
                 for s in enumerate_steps(CMVP, a.target)}
    for s in enumerate_steps(CMVP, b.target):
        d = b_targets.get(term_key(s.target))
        if d is not None:
            return DiamondWitness(a.target, b.target, d)
    return None
