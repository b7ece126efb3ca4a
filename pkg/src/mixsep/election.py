"""Networks, hypergraphs, symmetry, and electoral-system verification.

A network is a restricted parallel composition whose components announce
leaders on reserved free id names.  The hypergraph records which components
share which free names; its automorphisms capture the network's symmetry.
The electoral check explores the complete reduction graph and tests, for
every reachable state, that the execution can still be extended so that
exactly one id is announced persistently and no other id remains reachable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .canonical import canonicalize, term_key
from .parser import ParseError, parse
from .render import render
from .semantics import (
    DEFAULT_MAX_STATES, ReductionGraph, reduction_graph,
)
from .equivalences import weakly_bisimilar
from .terms import (
    CMV, CMVP, Name, PI, Par, Res, Term, TermError, calculus_of, free_names,
    substitute,
)


@dataclass(frozen=True)
class Network:
    calculus: str
    restricted: tuple[Name, ...]
    components: tuple[Term, ...]
    id_names: tuple[Name, ...]
    pair_width: int = 1  # 2 for session calculi

    def __post_init__(self):
        if not self.components:
            raise TermError("a network needs at least one component")
        if len(set(self.id_names)) != len(self.id_names):
            raise TermError("id names must be pairwise distinct")

    def composition(self) -> Term:
        body: Term = (self.components[0] if len(self.components) == 1
                      else Par(self.components))
        w = self.pair_width
        names = list(self.restricted)
        for i in range(len(names) - w, -1, -w):
            body = Res(tuple(names[i:i + w]), body)
        return body


@dataclass(frozen=True)
class Hypergraph:
    nodes: frozenset[int]
    arcs: frozenset[Name]
    incidence: tuple[tuple[Name, frozenset[int]], ...]

    def incident(self, arc: Name) -> frozenset[int]:
        for a, ns in self.incidence:
            if a == arc:
                return ns
        raise KeyError(arc)


@dataclass(frozen=True)
class Automorphism:
    node_perm: tuple[tuple[int, int], ...]
    arc_perm: tuple[tuple[Name, Name], ...]

    def node(self, n: int) -> int:
        return dict(self.node_perm).get(n, n)

    def arc(self, x: Name) -> Name:
        return dict(self.arc_perm).get(x, x)


@dataclass(frozen=True)
class ElectionVerdict:
    status: str  # "electoral" | "not-electoral" | "inconclusive"
    leader_table: tuple[tuple[tuple[int, ...], Name], ...] = ()
    counterexample: tuple[int, ...] | None = None
    reason: str = ""


def hypergraph(n: Network) -> Hypergraph:
    """The name-sharing structure of the network as written."""
    k = len(n.components)
    nodes = frozenset(range(1, k + 1))
    ids = set(n.id_names)
    comp_free = [free_names(c) for c in n.components]
    arcs = sorted(set().union(*comp_free) - ids)
    incidence = tuple(
        (x, frozenset(i + 1 for i in range(k) if x in comp_free[i]))
        for x in arcs
    )
    return Hypergraph(nodes, frozenset(arcs), incidence)


def is_automorphism(h: Hypergraph, sigma: Automorphism) -> bool:
    nperm = dict(sigma.node_perm)
    aperm = dict(sigma.arc_perm)
    if set(nperm) - set(h.nodes) or set(aperm) - set(h.arcs):
        return False
    full_n = {n: nperm.get(n, n) for n in h.nodes}
    full_a = {a: aperm.get(a, a) for a in h.arcs}
    if set(full_n.values()) != set(h.nodes):
        return False
    if set(full_a.values()) != set(h.arcs):
        return False
    for arc, inc in h.incidence:
        if h.incident(full_a[arc]) != frozenset(full_n[i] for i in inc):
            return False
    return True


def orbits(sigma: Automorphism) -> list[frozenset[int]]:
    nperm = dict(sigma.node_perm)
    seen: set[int] = set()
    out = []
    for start in sorted(set(nperm) | set(nperm.values())):
        if start in seen:
            continue
        orb = {start}
        cur = nperm.get(start, start)
        while cur not in orb:
            orb.add(cur)
            cur = nperm.get(cur, cur)
        seen |= orb
        out.append(frozenset(orb))
    return out


def symmetric_wrt(n: Network, sigma: Automorphism,
                  max_states: int = DEFAULT_MAX_STATES) -> bool:
    """Does each component satisfy P_{sigma(i)} ~ P_i sigma?"""
    if not is_automorphism(hypergraph(n), sigma):
        raise TermError("sigma is not an automorphism of the network")
    subst: dict[Name, Name | None] = dict(sigma.arc_perm)
    for a, b in sigma.node_perm:
        subst[n.id_names[a - 1]] = n.id_names[b - 1]
    subst = {k: v for k, v in subst.items() if k != v}
    for i, comp in enumerate(n.components):
        mapped = substitute(comp, subst) if subst else comp
        image = n.components[sigma.node(i + 1) - 1]
        if term_key(canonicalize(mapped)) == term_key(canonicalize(image)):
            continue
        ga = reduction_graph(n.calculus, image, max_states=max_states)
        gb = reduction_graph(n.calculus, mapped, max_states=max_states)
        if not weakly_bisimilar(ga, gb, 0, 0)[0]:
            return False
    return True


def _persistent_leaders(g: ReductionGraph, ids: set[Name],
                        s: int) -> set[Name]:
    """Ids announced in every state reachable from ``s``."""
    reach = g.reachable(s)
    out = set(ids)
    for d in reach:
        out &= {b.name for b in g.barbmap[d]}
        if not out:
            break
    return out


def verify_electoral(n: Network,
                     max_states: int = DEFAULT_MAX_STATES) -> ElectionVerdict:
    g = reduction_graph(n.calculus, n.composition(), max_states=max_states)
    if g.truncated:
        return ElectionVerdict("inconclusive", reason="state space truncated")
    ids = set(n.id_names)

    # which states already commit to a unique leader?
    committed: dict[int, Name] = {}
    for s in range(len(g.terms)):
        winners = _persistent_leaders(g, ids, s)
        if len(winners) == 1:
            leader = next(iter(winners))
            others = {b.name for b in g.weak_barbs(s)} & ids - {leader}
            if not others:
                committed[s] = leader

    # every execution prefix must be extendable to a committed state
    parents: dict[int, tuple[int, int]] = {}
    for e, edge in enumerate(g.edges):
        parents.setdefault(edge.dst, (edge.src, e))
    for s in range(len(g.terms)):
        if not any(d in committed for d in g.reachable(s)):
            path: list[int] = []
            cur = s
            while cur != 0:
                prev, e = parents[cur]
                path.append(e)
                cur = prev
            return ElectionVerdict("not-electoral",
                                   counterexample=tuple(reversed(path)),
                                   reason=f"no leader reachable from state {s}")

    try:
        executions = maximal_executions_graph(g)
    except TermError as err:
        return ElectionVerdict("inconclusive", reason=str(err))
    table = []
    for path, final in executions:
        winners = _persistent_leaders(g, ids, final)
        if len(winners) != 1:
            return ElectionVerdict(
                "not-electoral", counterexample=tuple(path),
                reason="maximal execution without a unique leader")
        table.append((tuple(path), next(iter(winners))))
    return ElectionVerdict("electoral", leader_table=tuple(table))


def maximal_executions_graph(g: ReductionGraph) -> list[tuple[list[int], int]]:
    """All maximal edge sequences from the root; cycles make this undefined."""
    out: list[tuple[list[int], int]] = []

    def dfs(s: int, path: list[int], on_path: set[int]):
        if s in on_path:
            raise TermError("reduction graph has a cycle; "
                            "maximal executions are infinite")
        if not g.out_edges[s]:
            out.append((list(path), s))
            return
        on_path.add(s)
        for e in g.out_edges[s]:
            path.append(e)
            dfs(g.edges[e].dst, path, on_path)
            path.pop()
        on_path.discard(s)

    dfs(g.root, [], set())
    return out


def maximal_executions(n: Network,
                       max_states: int = DEFAULT_MAX_STATES,
                       ) -> tuple[int, list[tuple[list[int], int]]]:
    g = reduction_graph(n.calculus, n.composition(), max_states=max_states)
    if g.truncated:
        raise TermError("state space truncated; executions are inconclusive")
    ex = maximal_executions_graph(g)
    return len(ex), ex


# ---------------------------------------------------------------------------
# Network files
# ---------------------------------------------------------------------------

def parse_network(text: str, calculus: str | None = None,
                  ) -> tuple[Network, Automorphism | None]:
    """Parse the term syntax preceded by ``ids:`` / ``automorphism:`` headers."""
    ids: list[Name] = []
    auto_spec: str | None = None
    body_lines: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("ids:"):
            ids = [Name(w) for w in stripped[len("ids:"):].split()]
        elif stripped.startswith("automorphism:"):
            auto_spec = stripped[len("automorphism:"):].strip()
        elif stripped.startswith("calculus:"):
            calculus = stripped[len("calculus:"):].strip()
        else:
            body_lines.append(line)
    if calculus is None:
        raise ParseError("network file does not declare a calculus", 1, 1)
    result = parse(calculus, "\n".join(body_lines))
    term = result.term
    restricted: list[Name] = []
    while isinstance(term, Res):
        restricted.extend(term.names)
        term = term.body
    comps = term.parts if isinstance(term, Par) else (term,)
    width = 1 if calculus == PI else 2
    network = Network(calculus, tuple(restricted), tuple(comps), tuple(ids),
                      pair_width=width)
    auto = _parse_automorphism(auto_spec, ids) if auto_spec else None
    return network, auto


def _parse_automorphism(spec: str, ids: list[Name]) -> Automorphism:
    arc_part, _, node_part = spec.partition(";")
    id_index = {n.base: i + 1 for i, n in enumerate(ids)}
    arcs = []
    for chunk in arc_part.split():
        a, _, b = chunk.partition("->")
        arcs.append((Name(a), Name(b)))
    nodes = []
    for chunk in node_part.split():
        a, _, b = chunk.partition("->")
        nodes.append((id_index.get(a, 0) or int(a), id_index.get(b, 0) or int(b)))
    return Automorphism(tuple(nodes), tuple(arcs))
