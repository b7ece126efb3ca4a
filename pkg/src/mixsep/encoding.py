"""Translation of mixed sessions into separate sessions, with its
operational-correspondence harness.

Every mixed choice is split into a committing phase and a communicating
phase.  A choice on an internal (selecting) endpoint first commits to one of
its summands through a private administrative session, then hands a fresh
session endpoint to its partner, announces the chosen label on it, and
finally exchanges the payload.  A choice on an external (branching) endpoint
receives that fresh endpoint and branches on the announced label.  Labels are
tagged with the summand's polarity on the internal side and with the dual
polarity on the external side, so matching partners agree on the wire.

Committing leaves the unchosen administrative selections behind as junk:
stuck, barb-free processes that are invisible up to weak bisimilarity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .canonical import canonicalize, term_key
from .equivalences import bisimulation_relation, coupled_similar
from .semantics import ReductionGraph, reduction_graph, TruncatedError
from .terms import (
    CMV, CMVP, CmvBran, CmvIn, CmvOut, CmvSel, Cond, EvalError, FreshNames,
    Inact, Label, Lit, MixBranch, MixChoice, Name, Par, Res, Term, TermError,
    Value, eval_expr, free_names, substitute, subterms, value_names,
)

INTERNAL = "int"
EXTERNAL = "ext"


@dataclass
class PolarityAssignment:
    """Classification of session endpoints into selecting and branching sides."""

    roles: dict[Name, str] = field(default_factory=dict)

    def role(self, endpoint: Name) -> str:
        try:
            return self.roles[endpoint]
        except KeyError:
            raise TermError(f"endpoint {endpoint} has no polarity assigned")

    def assign(self, endpoint: Name, role: str) -> None:
        if role not in (INTERNAL, EXTERNAL):
            raise TermError(f"unknown polarity {role!r}")
        self.roles[endpoint] = role

    def renamed(self, m: dict[Name, Name]) -> "PolarityAssignment":
        return PolarityAssignment(
            {m.get(k, k): v for k, v in self.roles.items()})

    def complete(self, t: Term) -> "PolarityAssignment":
        """Fill in unannotated restricted pairs: first endpoint selects."""
        out = PolarityAssignment(dict(self.roles))
        for s in subterms(t):
            if isinstance(s, Res) and len(s.names) == 2:
                a, b = s.names
                if a in out.roles and b in out.roles:
                    if out.roles[a] == out.roles[b]:
                        raise TermError(
                            f"endpoints {a} and {b} need dual polarities")
                elif a in out.roles:
                    out.roles[b] = _dual_role(out.roles[a])
                elif b in out.roles:
                    out.roles[a] = _dual_role(out.roles[b])
                else:
                    out.roles[a] = INTERNAL
                    out.roles[b] = EXTERNAL
        return out


def _dual_role(r: str) -> str:
    return EXTERNAL if r == INTERNAL else INTERNAL


def _check_choice(branches: tuple[MixBranch, ...]) -> None:
    seen = set()
    for b in branches:
        key = (b.label, b.polarity)
        if key in seen:
            raise TermError(
                f"duplicate summand {b.label}{b.polarity} in one choice")
        seen.add(key)


def encode(t: Term, pa: PolarityAssignment) -> Term:
    """Translate a mixed-sessions term into separate sessions."""
    fresh = FreshNames(_every_name(t))
    return _encode(t, pa, fresh)


def _every_name(t: Term) -> set[Name]:
    out: set[Name] = set()
    for s in subterms(t):
        match s:
            case Res(names=ns):
                out.update(ns)
            case MixChoice(endpoint=e, branches=bs):
                out.add(e)
                for b in bs:
                    if b.param is not None:
                        out.add(b.param)
                    if b.value is not None:
                        out.update(value_names(b.value))
            case Cond(value=v):
                out.update(value_names(v))
    return out


def _encode(t: Term, pa: PolarityAssignment, fresh: FreshNames) -> Term:
    match t:
        case Inact():
            return t
        case Par(parts=ps):
            return Par(tuple(_encode(p, pa, fresh) for p in ps))
        case Res(names=ns, body=b):
            if len(ns) != 2:
                raise TermError("session restrictions bind endpoint pairs")
            if _dual_role(pa.role(ns[0])) != pa.role(ns[1]):
                raise TermError(
                    f"restricted pair {ns} must have dual polarities")
            return Res(ns, _encode(b, pa, fresh))
        case Cond(value=v, then=a, els=b):
            return Cond(v, _encode(a, pa, fresh), _encode(b, pa, fresh))
        case MixChoice(endpoint=y, branches=bs):
            _check_choice(bs)
            # unassigned free endpoints default to the branching side, which
            # leaves the choice stuck with its barb, like the source
            if pa.roles.get(y, EXTERNAL) == EXTERNAL:
                return _encode_external(y, bs, pa, fresh)
            return _encode_internal(y, bs, pa, fresh)
    raise TermError(f"not a mixed-sessions term: {t!r}")


def _encode_external(y: Name, branches, pa, fresh) -> Term:
    c = fresh.fresh("c")
    arms = []
    for b in branches:
        wire = Label(b.label.base, _dual_pol(b.polarity))
        if b.polarity == "!":
            body: Term = CmvOut(c, b.value, _encode(b.cont, pa, fresh))
        else:
            body = CmvIn(c, b.param, _encode(b.cont, pa, fresh))
        arms.append((wire, body))
    arms.sort(key=lambda a: a[0])
    return CmvIn(y, c, CmvBran(c, tuple(arms)))


def _encode_internal(x: Name, branches, pa, fresh) -> Term:
    s, t = fresh.fresh("s"), fresh.fresh("t")
    arms = []
    selections = []
    for j, b in enumerate(branches, start=1):
        lam = Label("lam", j)
        wire = Label(b.label.base, b.polarity)
        c, d = fresh.fresh("c"), fresh.fresh("d")
        if b.polarity == "!":
            payload: Term = CmvOut(d, b.value, _encode(b.cont, pa, fresh))
        else:
            payload = CmvIn(d, b.param, _encode(b.cont, pa, fresh))
        handshake = Res((c, d), CmvOut(x, c, CmvSel(d, wire, payload)))
        arms.append((lam, handshake))
        selections.append(CmvSel(t, lam, Inact()))
    return Res((s, t), Par((CmvBran(s, tuple(arms)), *selections)))


def _dual_pol(p: str) -> str:
    return "?" if p == "!" else "!"


# ---------------------------------------------------------------------------
# Concrete source exploration (stable endpoint names through reduction)
# ---------------------------------------------------------------------------

def _rebuild(pairs: list[tuple[Name, Name]], comps: list[Term]) -> Term:
    body: Term = Inact() if not comps else (
        comps[0] if len(comps) == 1 else Par(tuple(comps)))
    for p in reversed(pairs):
        body = Res(p, body)
    return body


@dataclass
class SourceSpace:
    """Reachable mixed-sessions states in concrete (stable-name) form."""

    pairs: list[tuple[Name, Name]]
    states: dict[str, Term]  # canonical key -> concrete term
    edges: list[tuple[str, str]]
    root: str


def explore_source(t: Term, pa: PolarityAssignment,
                   ) -> tuple[SourceSpace, PolarityAssignment]:
    """BFS over mixed-sessions states in concrete (stable-name) form.

    Restrictions are lifted to one shared top layer as they surface, with a
    single stable name per endpoint, so the polarity assignment covers every
    derivative.  Endpoint delegation (sending an endpoint as payload) is
    rejected: without types the polarity of a received endpoint is unknown.
    """
    fresh = FreshNames(_every_name(t))
    pa = PolarityAssignment(dict(pa.roles)).complete(t)
    pairs: list[tuple[Name, Name]] = []
    dual: dict[Name, Name] = {}
    taken: set[Name] = set(free_names(t))

    def lift(u: Term) -> list[Term]:
        match u:
            case Par(parts=ps):
                return [c for p in ps for c in lift(p)]
            case Res(names=ns, body=b):
                if len(ns) != 2:
                    raise TermError("session restrictions bind endpoint pairs")
                ren = {n: fresh.fresh(n.base) for n in ns if n in taken}
                if ren:
                    b = substitute(b, ren, fresh)
                    for n, n2 in ren.items():
                        if n in pa.roles:
                            pa.roles[n2] = pa.roles[n]
                got = tuple(ren.get(n, n) for n in ns)
                if got[0] not in pa.roles and got[1] not in pa.roles:
                    pa.roles[got[0]] = INTERNAL
                    pa.roles[got[1]] = EXTERNAL
                elif got[0] not in pa.roles:
                    pa.roles[got[0]] = _dual_role(pa.roles[got[1]])
                elif got[1] not in pa.roles:
                    pa.roles[got[1]] = _dual_role(pa.roles[got[0]])
                pairs.append((got[0], got[1]))
                dual[got[0]], dual[got[1]] = got[1], got[0]
                taken.update(got)
                return lift(b)
            case Inact():
                return []
            case _:
                return [u]

    def concrete_steps(cs: tuple[Term, ...]) -> list[tuple[Term, ...]]:
        out = []
        for i, u in enumerate(cs):
            match u:
                case Cond(value=v, then=a, els=b):
                    try:
                        r = eval_expr(v)
                    except EvalError:
                        continue
                    if isinstance(r, Lit):
                        nxt = list(cs)
                        nxt[i] = a if r.value else b
                        out.append(tuple(nxt))
        for i, u in enumerate(cs):
            for j, w in enumerate(cs):
                if i == j:
                    continue
                match (u, w):
                    case (MixChoice(endpoint=y, branches=bs1),
                          MixChoice(endpoint=z, branches=bs2)) \
                            if dual.get(y) == z:
                        for b1 in bs1:
                            if b1.polarity != "!":
                                continue
                            for b2 in bs2:
                                if b2.polarity != "?" or b2.label != b1.label:
                                    continue
                                if isinstance(b1.value, Name):
                                    raise TermError(
                                        "endpoint delegation is outside the "
                                        "scope of this encoding")
                                nxt = list(cs)
                                nxt[i] = b1.cont
                                nxt[j] = substitute(
                                    b2.cont, {b2.param: eval_expr(b1.value)})
                                out.append(tuple(nxt))
        return out

    def normalize(cs) -> tuple[Term, ...]:
        return tuple(c for comp in cs for c in lift(comp))

    root = normalize([t])
    space = SourceSpace(pairs, {}, [], _key(pairs, root))
    todo = deque([root])
    while todo:
        cs = todo.popleft()
        k = _key(pairs, cs)
        if k in space.states:
            continue
        space.states[k] = _rebuild(pairs, list(cs))
        for raw in concrete_steps(cs):
            nxt = normalize(raw)
            space.edges.append((k, _key(pairs, nxt)))
            todo.append(nxt)
    return space, pa


def _key(pairs, comps) -> str:
    return term_key(_rebuild(list(pairs), list(comps)))


# ---------------------------------------------------------------------------
# Operational-correspondence harness
# ---------------------------------------------------------------------------

@dataclass
class CorrespondenceReport:
    completeness: bool
    soundness_gorla: bool
    soundness_weak: bool
    barb_sensitivity: bool
    divergence_reflection: bool
    coupled: bool
    intermediate_states: list[int]
    details: dict = field(default_factory=dict)

    def passed(self) -> bool:
        return (self.completeness and self.soundness_gorla
                and self.barb_sensitivity and self.divergence_reflection
                and self.coupled)

    def to_json(self) -> dict:
        return {
            "completeness": self.completeness,
            "soundness-gorla": self.soundness_gorla,
            "soundness-weak": self.soundness_weak,
            "barb-sensitivity": self.barb_sensitivity,
            "divergence-reflection": self.divergence_reflection,
            "coupled": self.coupled,
            "intermediate-states": self.intermediate_states,
            "details": self.details,
        }


class Harness:
    """Shared state for the correspondence checks over one source term."""

    def __init__(self, S: Term, pa: PolarityAssignment,
                 max_states: int = 20000):
        self.max_states = max_states
        self.source_graph = reduction_graph(CMVP, S, max_states=max_states)
        if self.source_graph.truncated:
            raise TruncatedError("source state space truncated")
        self.space, self.pa = explore_source(S, pa)
        src_keys = {term_key(u) for u in self.source_graph.terms}
        if set(self.space.states) != src_keys:
            raise TermError("concrete exploration disagrees with semantics")
        self.encodings = {
            k: canonicalize(encode(c, self.pa))
            for k, c in self.space.states.items()
        }
        self.target_graph = reduction_graph(
            CMV, self.encodings[self.space.root], max_states=max_states)
        if self.target_graph.truncated:
            raise TruncatedError("target state space truncated")
        # target states bisimilar to each derivative's encoding
        self.images: dict[str, set[int]] = {}
        self.enc_graphs: dict[str, ReductionGraph] = {}
        for k, e in self.encodings.items():
            ge = reduction_graph(CMV, e, max_states=max_states)
            if ge.truncated:
                raise TruncatedError("encoded-derivative state space truncated")
            self.enc_graphs[k] = ge
            rel = bisimulation_relation(self.target_graph, ge)
            self.images[k] = {s for (s, b) in rel if b == 0}

    def completeness(self) -> bool:
        return all(self.images[k] for k in self.space.states)

    def soundness_gorla(self) -> bool:
        union = set().union(*self.images.values()) if self.images else set()
        return all(self.target_graph.reachable(s) & union
                   for s in range(len(self.target_graph.terms)))

    def soundness_weak(self) -> bool:
        union = set().union(*self.images.values()) if self.images else set()
        return all(self.target_graph.reachable(s) & union
                   for s in self.target_graph.successors(0))

    def barb_sensitivity(self) -> bool:
        src = {b.name for b in self.source_graph.weak_barbs(0)}
        tgt = {b.name for b in self.target_graph.weak_barbs(0)}
        return src == tgt

    def divergence_reflection(self) -> bool:
        return (not _has_cycle(self.target_graph)) or _has_cycle(
            self.source_graph)

    def coupled(self) -> bool:
        return coupled_similar(self.source_graph, self.target_graph, 0, 0)[0]

    def intermediate_states(self) -> list[int]:
        covered = set().union(*self.images.values()) if self.images else set()
        return sorted(set(range(len(self.target_graph.terms))) - covered)

    def report(self) -> CorrespondenceReport:
        return CorrespondenceReport(
            completeness=self.completeness(),
            soundness_gorla=self.soundness_gorla(),
            soundness_weak=self.soundness_weak(),
            barb_sensitivity=self.barb_sensitivity(),
            divergence_reflection=self.divergence_reflection(),
            coupled=self.coupled(),
            intermediate_states=self.intermediate_states(),
            details={
                "source-states": len(self.source_graph.terms),
                "target-states": len(self.target_graph.terms),
            },
        )


def _has_cycle(g: ReductionGraph) -> bool:
    for s in range(len(g.terms)):
        for e in g.out_edges[s]:
            if s in g.reachable(g.edges[e].dst):
                return True
    return False


def correspondence_report(S: Term, pa: PolarityAssignment,
                          max_states: int = 20000) -> CorrespondenceReport:
    return Harness(S, pa, max_states).report()


def check_completeness(S, pa, max_states: int = 20000) -> bool:
    return Harness(S, pa, max_states).completeness()


def check_soundness(S, pa, max_states: int = 20000) -> tuple[bool, bool]:
    h = Harness(S, pa, max_states)
    return h.soundness_gorla(), h.soundness_weak()


def check_barb_sensitivity(S, pa, max_states: int = 20000) -> bool:
    return Harness(S, pa, max_states).barb_sensitivity()


def check_divergence_reflection(S, pa, max_states: int = 20000) -> bool:
    return Harness(S, pa, max_states).divergence_reflection()


def check_coupled_correspondence(S, pa, max_states: int = 20000) -> bool:
    return Harness(S, pa, max_states).coupled()


def find_intermediate_states(S, pa, max_states: int = 20000) -> list[Term]:
    h = Harness(S, pa, max_states)
    return [h.target_graph.terms[i] for i in h.intermediate_states()]


def emulate_trace(S: Term, step, pa: PolarityAssignment,
                  max_states: int = 20000) -> list[Term]:
    """A shortest target trace from the encoding of the step's source to a
    state bisimilar to the encoding of its target."""
    h = Harness(S, pa, max_states)
    if term_key(step.source) != h.space.root:
        raise TermError("the given step does not start at S")
    goal_key = term_key(step.target)
    if goal_key not in h.images:
        raise TermError("the given step is not a step of S")
    goal = h.images[goal_key]
    g = h.target_graph
    prev: dict[int, int] = {0: -1}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        if s in goal:
            path = []
            while s != -1:
                path.append(g.terms[s])
                s = prev[s]
            return list(reversed(path))
        for d in g.successors(s):
            if d not in prev:
                prev[d] = s
                queue.append(d)
    raise TermError("no emulation found in the target graph")
