"""Reduction semantics: single steps, barbs, and reachable-state graphs.

Steps are enumerated on the structural-congruence normal form of a term, so
the results are closed under congruence by construction.  Every restriction
sits at the outermost layer of the normal form, which means a synchronisation
only has to look at the top-level parallel components and the top-level
restriction groups.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .canonical import (
    canonicalize, decompose_groups, recompose_groups, term_key,
)
from .render import render
from .terms import (
    CMV, CMVP, CmvBran, CmvIn, CmvOut, CmvSel, Cond, EvalError, FreshNames,
    Inact, Lit, MixChoice, Name, Occurrence, Par, PI, PiChoice, PiInput,
    PiOutput, PiRep, PiSummand, PiTau, Res, Term, eval_expr, free_names,
    substitute,
)

DEFAULT_MAX_STATES = int(os.environ.get("MIXSEP_MAX_STATES", "20000"))
DEFAULT_MAX_DEPTH = 10**9

COMMUNICATION = "communication"
TAU_PREFIX = "tau-prefix"
CONDITIONAL = "conditional"


class TruncatedError(Exception):
    """Raised when an answer would depend on states beyond the exploration budget."""


@dataclass(frozen=True, order=True)
class Barb:
    """An observable: a free name offering interaction.

    ``direction`` is "out"/"in" for the pi calculus and "ep" for session
    calculi, whose barbs do not distinguish a direction.
    """

    name: Name
    direction: str

    def text(self) -> str:
        match self.direction:
            case "out":
                return f"{self.name}!"
            case "in":
                return f"{self.name}?"
            case _:
                return str(self.name)


@dataclass(frozen=True)
class Footprint:
    """What a step consumes: guard occurrences, plus the endpoints it uses."""

    occurrences: frozenset[Occurrence]
    endpoints: frozenset[Name]
    kind: str


@dataclass(frozen=True)
class ReductionStep:
    source: Term  # canonical
    target: Term  # canonical
    footprint: Footprint

    def sort_key(self):
        return (term_key(self.target), self.footprint.kind,
                tuple(sorted(self.footprint.occurrences)),
                tuple(sorted(self.footprint.endpoints)))


# ---------------------------------------------------------------------------
# Step enumeration
# ---------------------------------------------------------------------------

def _branch_value(v):
    try:
        return eval_expr(v)
    except EvalError:
        return v


@dataclass(frozen=True)
class _PoolEntry:
    term: Term
    comp: int              # index of the owning top-level component
    copy: int              # replication copy ordinal, -1 for plain components
    sub: int               # sub-component index within the copy
    replicated: bool

    def occurrence(self) -> Occurrence:
        return Occurrence(path=(self.comp,), replicated=self.replicated)


def enumerate_steps(calculus: str, t: Term) -> tuple[ReductionStep, ...]:
    """All single reduction steps of ``t`` modulo structural congruence."""
    src = canonicalize(t)
    groups, comps = decompose_groups(src)
    avoid = set()
    for g in groups:
        avoid.update(g)
    for c in comps:
        avoid.update(free_names(c))

    pool: list[_PoolEntry] = []
    # per-(comp, copy): (extra restriction groups, list of sub-component terms)
    copies: dict[tuple[int, int], tuple[list[tuple[Name, ...]], list[Term]]] = {}
    fresh = FreshNames(avoid)
    for i, c in enumerate(comps):
        if isinstance(c, PiRep):
            # two unfoldings cover every way a single step can touch !P
            for copy in range(2):
                body = _freshen(c.body, fresh)
                bgroups, bcomps = decompose_groups(body)
                # decompose_groups canonicalises, which would give every
                # copy the same reserved bound names; keep copies apart
                ren = {n: fresh.fresh(n.base or "x")
                       for g in bgroups for n in g}
                if ren:
                    bgroups = [tuple(ren[n] for n in g) for g in bgroups]
                    bcomps = [substitute(sub, ren) for sub in bcomps]
                copies[(i, copy)] = (bgroups, bcomps)
                for k, sub in enumerate(bcomps):
                    pool.append(_PoolEntry(sub, i, copy, k, True))
        else:
            pool.append(_PoolEntry(c, i, -1, 0, False))

    pair_of: dict[Name, Name] = {}
    for g in groups:
        if len(g) == 2:
            pair_of[g[0]] = g[1]
            pair_of[g[1]] = g[0]

    steps: dict[tuple[str, Footprint], ReductionStep] = {}

    def emit(kind: str, consumed: list[tuple[_PoolEntry, Term]],
             endpoints: frozenset[Name]) -> None:
        new_comps = list(comps)
        extra_groups: list[tuple[Name, ...]] = []
        used_copies: dict[tuple[int, int], list[Term]] = {}
        for entry, replacement in consumed:
            if entry.copy < 0:
                new_comps[entry.comp] = replacement
            else:
                key = (entry.comp, entry.copy)
                if key not in used_copies:
                    bgroups, bcomps = copies[key]
                    used_copies[key] = list(bcomps)
                    extra_groups.extend(bgroups)
                used_copies[key][entry.sub] = replacement
        for subs in used_copies.values():
            new_comps.extend(subs)
        target = canonicalize(
            recompose_groups(list(groups) + extra_groups, new_comps))
        occ = frozenset(e.occurrence() for e, _ in consumed)
        fp = Footprint(occ, endpoints, kind)
        steps.setdefault((term_key(target), fp),
                         ReductionStep(src, target, fp))

    for a in pool:
        match a.term:
            case Cond(value=v, then=then, els=els) if calculus in (CMVP, CMV):
                try:
                    r = eval_expr(v)
                except EvalError:
                    r = None
                if isinstance(r, Lit):
                    emit(CONDITIONAL, [(a, then if r.value else els)],
                         frozenset())
            case PiChoice(summands=ss) if calculus == PI:
                for s in ss:
                    if isinstance(s.prefix, PiTau):
                        emit(TAU_PREFIX, [(a, s.cont)], frozenset())

    for ai, a in enumerate(pool):
        for b in pool[ai + 1:]:
            for left, right in ((a, b), (b, a)):
                match (left.term, right.term):
                    case (PiChoice(summands=outs), PiChoice(summands=ins)) \
                            if calculus == PI:
                        for so in outs:
                            if not isinstance(so.prefix, PiOutput):
                                continue
                            for si in ins:
                                if not isinstance(si.prefix, PiInput):
                                    continue
                                if so.prefix.chan != si.prefix.chan:
                                    continue
                                payload = _branch_value(so.prefix.payload)
                                recv = substitute(
                                    si.cont, {si.prefix.param: payload})
                                emit(COMMUNICATION,
                                     [(left, so.cont), (right, recv)],
                                     frozenset({so.prefix.chan}))
                    case (MixChoice(endpoint=y, branches=bs1),
                          MixChoice(endpoint=z, branches=bs2)) \
                            if calculus == CMVP and pair_of.get(y) == z:
                        for b1 in bs1:
                            if b1.polarity != "!":
                                continue
                            for b2 in bs2:
                                if b2.polarity != "?" or b2.label != b1.label:
                                    continue
                                payload = _branch_value(b1.value)
                                recv = substitute(b2.cont, {b2.param: payload})
                                emit(COMMUNICATION,
                                     [(left, b1.cont), (right, recv)],
                                     frozenset({y, z}))
                    case (CmvOut(chan=y, value=v, cont=p),
                          CmvIn(chan=z, param=x, cont=q)) \
                            if calculus == CMV and pair_of.get(y) == z:
                        payload = _branch_value(v)
                        emit(COMMUNICATION,
                             [(left, p), (right, substitute(q, {x: payload}))],
                             frozenset({y, z}))
                    case (CmvSel(chan=y, label=l, cont=p),
                          CmvBran(chan=z, arms=arms)) \
                            if calculus == CMV and pair_of.get(y) == z:
                        for al, q in arms:
                            if al == l:
                                emit(COMMUNICATION, [(left, p), (right, q)],
                                     frozenset({y, z}))

    return tuple(sorted(steps.values(), key=ReductionStep.sort_key))


def _freshen(t: Term, fresh: FreshNames) -> Term:
    """Rename every bound name in ``t`` to a globally fresh one."""
    return _rename_binders(t, fresh)


def _rename_binders(t: Term, fresh: FreshNames) -> Term:
    """Alpha-rename by substituting through a fresh copy of each binder."""
    match t:
        case Res(names=ns, body=b):
            m = {n: fresh.fresh(n.base) for n in ns}
            return Res(tuple(m[n] for n in ns),
                       _rename_binders(substitute(b, m, fresh), fresh))
        case Par(parts=ps):
            return Par(tuple(_rename_binders(p, fresh) for p in ps))
        case PiRep(body=b):
            return PiRep(_rename_binders(b, fresh))
        case Cond(value=v, then=a, els=c):
            return Cond(v, _rename_binders(a, fresh), _rename_binders(c, fresh))
        case PiChoice(summands=ss):
            out = []
            for s in ss:
                if isinstance(s.prefix, PiInput):
                    p2 = fresh.fresh(s.prefix.param.base)
                    cont = substitute(s.cont, {s.prefix.param: p2}, fresh)
                    out.append(PiSummand(PiInput(s.prefix.chan, p2),
                                         _rename_binders(cont, fresh)))
                else:
                    out.append(PiSummand(s.prefix, _rename_binders(s.cont, fresh)))
            return PiChoice(tuple(out))
        case MixChoice(endpoint=e, branches=bs):
            out = []
            for b in bs:
                if b.polarity == "?":
                    p2 = fresh.fresh(b.param.base)
                    cont = substitute(b.cont, {b.param: p2}, fresh)
                    out.append(type(b)(b.label, b.polarity, None, p2,
                                       _rename_binders(cont, fresh)))
                else:
                    out.append(type(b)(b.label, b.polarity, b.value, None,
                                       _rename_binders(b.cont, fresh)))
            return MixChoice(e, tuple(out))
        case CmvOut(chan=c, value=v, cont=k):
            return CmvOut(c, v, _rename_binders(k, fresh))
        case CmvIn(chan=c, param=p, cont=k):
            p2 = fresh.fresh(p.base)
            return CmvIn(c, p2,
                         _rename_binders(substitute(k, {p: p2}, fresh), fresh))
        case CmvSel(chan=c, label=l, cont=k):
            return CmvSel(c, l, _rename_binders(k, fresh))
        case CmvBran(chan=c, arms=arms):
            return CmvBran(c, tuple((l, _rename_binders(p, fresh))
                                    for l, p in arms))
        case _:
            return t


# ---------------------------------------------------------------------------
# Barbs
# ---------------------------------------------------------------------------

def barbs(calculus: str, t: Term) -> frozenset[Barb]:
    """Observables of ``t``: free names with an unguarded prefix on them."""
    out: set[Barb] = set()
    _collect_barbs(canonicalize(t), calculus, frozenset(), out)
    return frozenset(out)


def _collect_barbs(t: Term, calculus: str, bound: frozenset[Name],
                   out: set[Barb]) -> None:
    match t:
        case Par(parts=ps):
            for p in ps:
                _collect_barbs(p, calculus, bound, out)
        case Res(names=ns, body=b):
            _collect_barbs(b, calculus, bound | set(ns), out)
        case PiRep(body=b):
            _collect_barbs(b, calculus, bound, out)
        case PiChoice(summands=ss):
            for s in ss:
                match s.prefix:
                    case PiOutput(chan=c) if c not in bound:
                        out.add(Barb(c, "out"))
                    case PiInput(chan=c) if c not in bound:
                        out.add(Barb(c, "in"))
        case MixChoice(endpoint=e) if e not in bound:
            out.add(Barb(e, "ep"))
        case CmvOut(chan=c) | CmvIn(chan=c) | CmvSel(chan=c) | CmvBran(chan=c) \
                if c not in bound:
            out.add(Barb(c, "ep"))
        case _:
            pass


# ---------------------------------------------------------------------------
# Reduction graphs
# ---------------------------------------------------------------------------

@dataclass
class GraphEdge:
    src: int
    dst: int
    footprint: Footprint


@dataclass
class ReductionGraph:
    calculus: str
    root: int
    terms: list[Term] = field(default_factory=list)
    keys: dict[str, int] = field(default_factory=dict)
    edges: list[GraphEdge] = field(default_factory=list)
    out_edges: list[list[int]] = field(default_factory=list)
    barbmap: list[frozenset[Barb]] = field(default_factory=list)
    truncated: bool = False
    limits: tuple[int, int] = (DEFAULT_MAX_STATES, DEFAULT_MAX_DEPTH)

    def successors(self, s: int) -> list[int]:
        return [self.edges[e].dst for e in self.out_edges[s]]

    def reachable(self, s: int) -> frozenset[int]:
        seen = {s}
        todo = [s]
        while todo:
            for d in self.successors(todo.pop()):
                if d not in seen:
                    seen.add(d)
                    todo.append(d)
        return frozenset(seen)

    def weak_barbs(self, s: int) -> frozenset[Barb]:
        if self.truncated:
            raise TruncatedError(
                "state space truncated; weak barbs are inconclusive")
        out: set[Barb] = set()
        for d in self.reachable(s):
            out |= self.barbmap[d]
        return frozenset(out)


def reduction_graph(calculus: str, t: Term,
                    max_states: int = DEFAULT_MAX_STATES,
                    max_depth: int = DEFAULT_MAX_DEPTH) -> ReductionGraph:
    """Breadth-first reachable-state graph, deduplicated modulo congruence."""
    root = canonicalize(t)
    g = ReductionGraph(calculus=calculus, root=0,
                       limits=(max_states, max_depth))

    def intern(u: Term) -> int:
        k = term_key(u)
        got = g.keys.get(k)
        if got is not None:
            return got
        sid = len(g.terms)
        g.keys[k] = sid
        g.terms.append(u)
        g.out_edges.append([])
        g.barbmap.append(barbs(calculus, u))
        return sid

    intern(root)
    frontier = [0]
    expanded = 0
    depth = 0
    explored: set[int] = set()
    while frontier and depth < max_depth:
        nxt: list[int] = []
        for sid in frontier:
            if sid in explored:
                continue
            explored.add(sid)
            for step in enumerate_steps(calculus, g.terms[sid]):
                if len(g.terms) >= max_states \
                        and term_key(step.target) not in g.keys:
                    g.truncated = True
                    continue
                did = intern(step.target)
                g.out_edges[sid].append(len(g.edges))
                g.edges.append(GraphEdge(sid, did, step.footprint))
                if did not in explored:
                    nxt.append(did)
            expanded += 1
        frontier = nxt
        depth += 1
    if frontier and depth >= max_depth:
        g.truncated = True
    return g


def weak_barbs(calculus: str, t: Term,
               max_states: int = DEFAULT_MAX_STATES) -> frozenset[Barb]:
    g = reduction_graph(calculus, t, max_states=max_states)
    return g.weak_barbs(0)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def graph_json(g: ReductionGraph) -> dict:
    states = [
        {"id": i, "term": render(g.terms[i]),
         "barbs": sorted(b.text() for b in g.barbmap[i])}
        for i in range(len(g.terms))
    ]
    edges = [
        {"from": e.src, "to": e.dst,
         "endpoints": sorted(str(n) for n in e.footprint.endpoints),
         "kind": e.footprint.kind}
        for e in g.edges
    ]
    return {"states": states, "edges": edges, "truncated": g.truncated}


def graph_dot(g: ReductionGraph) -> str:
    lines = ["digraph reductions {"]
    for i in range(len(g.terms)):
        label = render(g.terms[i]).replace("\\", "\\\\").replace('"', '\\"')
        barbtxt = " ".join(sorted(b.text() for b in g.barbmap[i]))
        lines.append(f'  s{i} [label="{i}: {label}\\n{barbtxt}"];')
    for e in g.edges:
        eps = ",".join(sorted(str(n) for n in e.footprint.endpoints))
        lines.append(f'  s{e.src} -> s{e.dst} [label="{e.footprint.kind} {eps}"];')
    lines.append("}")
    return "\n".join(lines)


def dump_json(obj: dict) -> str:
    """Stable serialization: identical inputs give byte-identical output."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
