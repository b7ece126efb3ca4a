"""Bounded term generation and exhaustive property campaigns.

``enumerate_terms`` streams every well-formed term up to an AST-size budget,
deduplicated modulo canonical form and deterministically ordered.  The size
metric charges one node per choice/branch/prefix construct, restriction, and
replication, two per conditional (construct plus guard value), and nothing
for the inactive term, parallel composition, or values.

The campaigns turn universally quantified claims into machine-checked
evidence over such bounded corpora:

* ``no-star`` searches for the five-step synchronisation pattern.  It scans
  "skeletons": parallel compositions of one-level choices.  The pattern's
  conflict 5-cycle only constrains top-level guard occurrences -- steps that
  consume a single occurrence (tau prefixes, conditionals, and replicated
  unfoldings, whose footprints drop the replication) force their two cycle
  neighbours to share that occurrence and hence to conflict with each other,
  so no such step can sit on the cycle.  Every cycle therefore runs through
  at least five top-level choices, and a term within budget hosts the
  pattern only if its top-level choice skeleton (which fits the same budget)
  hosts the footprint part of it.  For the session corpus the search drops
  the distinct-result clause and collapses payloads to unit, both of which
  only strengthen the "no witness" verdict because footprints are payload-
  and continuation-independent.
* ``confluence`` checks the diamond property for pairs of non-conflicting
  choice synchronisations on distinct channel pairs; branch continuations
  are decorated with pairwise distinct observables so that commuting steps
  have to reconverge on genuinely equal terms.
* ``correspondence`` runs the full encoding harness over all enumerated
  mixed-session terms within budget.
* ``no-electoral`` builds rotation-symmetric five-component session rings
  from enumerated component templates and checks that none of them elects a
  leader.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations

from .canonical import canonicalize, term_key
from .election import Network, verify_electoral
from .encoding import PolarityAssignment, correspondence_report
from .patterns import check_confluence, find_pattern_star, in_conflict
from .render import render
from .semantics import (
    COMMUNICATION, DEFAULT_MAX_STATES, TruncatedError, enumerate_steps,
)
from .terms import (
    CMVP, PI, Cond, CmvBran, CmvIn, CmvOut, CmvSel, FALSE, Inact, Label,
    MixBranch, MixChoice, Name, Par, PiChoice, PiInput, PiOutput, PiRep,
    PiSummand, PiTau, RECV, Res, SEND, TRUE, Term, TermError, UNIT,
    free_names,
)

_PARAM = Name("z")
_PAYLOADS = (TRUE, FALSE, UNIT)


@dataclass(frozen=True)
class Budget:
    """Bounds for term generation and state-space exploration."""

    max_ast_size: int
    max_names: int = 2
    max_labels: int = 2
    max_states: int = DEFAULT_MAX_STATES

    def __post_init__(self):
        for f in ("max_ast_size", "max_names", "max_labels", "max_states"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")

    def to_json(self) -> dict:
        return {
            "max-ast-size": self.max_ast_size,
            "max-names": self.max_names,
            "max-labels": self.max_labels,
            "max-states": self.max_states,
        }


def ast_size(t: Term) -> int:
    """Number of size-bearing nodes: guards, branches, binders, conditionals."""
    match t:
        case Inact():
            return 0
        case Par(parts):
            return sum(ast_size(p) for p in parts)
        case Res(_, body):
            return 1 + ast_size(body)
        case Cond(_, then, els):
            return 2 + ast_size(then) + ast_size(els)
        case PiChoice(summands):
            return 1 + sum(1 + ast_size(s.cont) for s in summands)
        case PiRep(body):
            return 1 + ast_size(body)
        case MixChoice(_, branches):
            return 1 + sum(1 + ast_size(br.cont) for br in branches)
        case CmvOut(_, _, cont) | CmvIn(_, _, cont) | CmvSel(_, _, cont):
            return 1 + ast_size(cont)
        case CmvBran(_, arms):
            return 1 + sum(1 + ast_size(body) for _, body in arms)
        case _:
            raise TermError(f"cannot measure {type(t).__name__}")


# ---------------------------------------------------------------------------
# General enumeration
# ---------------------------------------------------------------------------

class _Enumerator:
    """Exact-size term generation with memoisation, per calculus."""

    def __init__(self, calculus: str, b: Budget):
        self.calculus = calculus
        self.b = b
        if calculus == PI:
            self.channels = tuple(
                Name(c) for c in "abcdefghij"[:b.max_names])
        else:
            self.pairs = tuple(
                (Name(f"x{i + 1}"), Name(f"y{i + 1}"))
                for i in range(b.max_names))
            self.endpoints = tuple(n for p in self.pairs for n in p)
        self.labels = tuple(Label(f"l{i + 1}") for i in range(b.max_labels))
        self._memo: dict[int, tuple[Term, ...]] = {}
        self._atom_memo: dict[int, tuple[Term, ...]] = {}

    def terms(self, s: int) -> tuple[Term, ...]:
        if s in self._memo:
            return self._memo[s]
        out: list[Term] = []
        if s == 0:
            out.append(Inact())
        else:
            out.extend(self._guarded(s))
            if s >= 2 and self.calculus != PI:  # conditional: construct + guard
                for st in range(s - 1):
                    for a in self.terms(st):
                        for bb in self.terms(s - 2 - st):
                            for v in (TRUE, FALSE):
                                out.append(Cond(v, a, bb))
            for body in self.terms(s - 1):  # restriction over used names
                fn = free_names(body)
                if self.calculus == PI:
                    for c in self.channels:
                        if c in fn:
                            out.append(Res((c,), body))
                else:
                    for x, y in self.pairs:
                        if x in fn or y in fn:
                            out.append(Res((x, y), body))
            if self.calculus == PI:
                for body in self.terms(s - 1):
                    if not isinstance(body, Inact):
                        out.append(PiRep(body))
            if s >= 4:  # parallel: >= 2 non-trivial parts
                for combo in _combos(self._atoms, s, min_count=2, min_size=2,
                                     max_size=s - 2):
                    out.append(Par(combo))
        res = tuple(out)
        self._memo[s] = res
        return res

    def _atoms(self, s: int) -> tuple[Term, ...]:
        if s not in self._atom_memo:
            self._atom_memo[s] = tuple(
                t for t in self.terms(s)
                if not isinstance(t, (Par, Inact)))
        return self._atom_memo[s]

    # guarded productions -------------------------------------------------

    def _guarded(self, s: int) -> list[Term]:
        match self.calculus:
            case "pi":
                return [PiChoice(c)
                        for c in _combos(self._pi_summands, s - 1)]
            case "cmv+":
                return [MixChoice(e, c)
                        for e in self.endpoints
                        for c in _combos(self._mix_branches, s - 1)]
            case _:
                return self._cmv_guarded(s)

    def _pi_summands(self, s: int) -> tuple[PiSummand, ...]:
        out = []
        for cont in self.terms(s - 1):
            out.append(PiSummand(PiTau(), cont))
            for c in self.channels:
                out.append(PiSummand(PiInput(c, _PARAM), cont))
                for v in _PAYLOADS:
                    out.append(PiSummand(PiOutput(c, v), cont))
        return tuple(out)

    def _mix_branches(self, s: int) -> tuple[MixBranch, ...]:
        out = []
        for cont in self.terms(s - 1):
            for l in self.labels:
                for v in _PAYLOADS:
                    out.append(MixBranch(l, SEND, v, None, cont))
                out.append(MixBranch(l, RECV, None, _PARAM, cont))
        return tuple(out)

    def _cmv_guarded(self, s: int) -> list[Term]:
        out: list[Term] = []
        for cont in self.terms(s - 1):
            for c in self.endpoints:
                out.append(CmvIn(c, _PARAM, cont))
                for v in _PAYLOADS:
                    out.append(CmvOut(c, v, cont))
                for l in self.labels:
                    out.append(CmvSel(c, l, cont))
        for c in self.endpoints:  # branching: distinct labels, any arms
            for k in range(1, len(self.labels) + 1):
                for labs in combinations(self.labels, k):
                    for combo in _combos(self.terms, s - 1 - k,
                                         min_count=k, max_count=k,
                                         min_size=0):
                        out.append(CmvBran(c, tuple(zip(labs, combo))))
        return out


def _combos(items_of, total: int, min_count: int = 1,
            max_count: int | None = None, min_size: int = 1,
            max_size: int | None = None):
    """Combinations of items whose exact sizes sum to ``total``.

    ``items_of(s)`` must deterministically list the items of exact size
    ``s``.  Without ``max_count`` this yields multisets (nondecreasing by
    size, then item index); with ``max_count`` it yields ordered tuples of
    exactly that many items, which callers pair positionally with labels.
    """
    results: list[tuple] = []

    if max_count is not None:
        def rec_fixed(remaining: int, slots: int, acc: list):
            if slots == 0:
                if remaining == 0:
                    results.append(tuple(acc))
                return
            for sz in range(min_size, remaining - min_size * (slots - 1) + 1):
                for item in items_of(sz):
                    acc.append(item)
                    rec_fixed(remaining - sz, slots - 1, acc)
                    acc.pop()
        rec_fixed(total, max_count, [])
        return results

    def rec(remaining: int, start_size: int, start_idx: int, acc: list):
        if remaining == 0 and len(acc) >= min_count:
            results.append(tuple(acc))
            return
        top = remaining if max_size is None else min(remaining, max_size)
        for sz in range(start_size, top + 1):
            opts = items_of(sz)
            lo = start_idx if sz == start_size else 0
            for i in range(lo, len(opts)):
                acc.append(opts[i])
                rec(remaining - sz, sz, i, acc)
                acc.pop()

    rec(total, max(min_size, 1), 0, [])
    return results


def enumerate_terms(calculus: str, b: Budget):
    """All terms up to the size budget, modulo canonical form, in a fixed
    (size, canonical-key) order."""
    en = _Enumerator(calculus, b)
    seen: set[str] = set()
    for s in range(b.max_ast_size + 1):
        batch: list[tuple[str, Term]] = []
        for t in en.terms(s):
            k = term_key(canonicalize(t))
            if k not in seen:
                seen.add(k)
                batch.append((k, t))
        for _, t in sorted(batch, key=lambda p: p[0]):
            yield t


# ---------------------------------------------------------------------------
# Campaign corpora (compact skeleton representations)
# ---------------------------------------------------------------------------

def _multisets(alphabet: list[tuple[int, tuple]], total: int,
               min_count: int):
    """Nondecreasing multisets over a (cost, rep) alphabet, lazily, within a
    total cost bound."""

    def rec(remaining: int, start: int, acc: list):
        if len(acc) >= min_count:
            yield tuple(acc)
        for i in range(start, len(alphabet)):
            cost, rep = alphabet[i]
            if cost > remaining:
                break  # alphabet is sorted by cost
            acc.append(rep)
            yield from rec(remaining - cost, i, acc)
            acc.pop()

    yield from rec(total, 0, [])


def _pi_star_corpus(b: Budget):
    """Skeleton pi terms (parallel choices, empty continuations) that could
    host the five-step pattern: at least five top-level choices."""
    chans = list(range(min(b.max_names, len("abcdefghij"))))
    summand_types: list[tuple] = []
    for c in chans:
        for p in range(len(_PAYLOADS)):
            summand_types.append((0, c, p))
        summand_types.append((1, c))
    summand_types.append((2,))
    choice_alphabet: list[tuple[int, tuple]] = []
    # five choices of >= 2 cost each bound the size of any single choice
    max_summands = b.max_ast_size - 9
    for k in range(1, max(max_summands, 0) + 1):
        for combo in combinations_with_replacement(sorted(summand_types), k):
            choice_alphabet.append((1 + k, combo))
    choice_alphabet.sort(key=lambda p: (p[0], p[1]))
    names = [Name(c) for c in "abcdefghij"[:b.max_names]]
    for choices in _multisets(choice_alphabet, b.max_ast_size, min_count=5):
        yield Par(tuple(_pi_choice_term(c, names) for c in choices))


def _pi_choice_term(rep: tuple, names: list[Name]) -> Term:
    summands = []
    for s in rep:
        match s:
            case (0, c, p):
                summands.append(
                    PiSummand(PiOutput(names[c], _PAYLOADS[p]), Inact()))
            case (1, c):
                summands.append(PiSummand(PiInput(names[c], _PARAM), Inact()))
            case (2,):
                summands.append(PiSummand(PiTau(), Inact()))
    return PiChoice(tuple(summands))


def _session_choice_alphabet(n_pairs: int, n_labels: int, max_branches: int,
                             conts: int = 1):
    """Compact (cost, (endpoint, branches)) alphabet; branch = (label, pol,
    cont_idx) with unit payloads."""
    branch_types = sorted(
        (l, p, c)
        for l in range(n_labels) for p in (0, 1) for c in range(conts)
    )
    alphabet = []
    for e in range(2 * n_pairs):
        for k in range(1, max_branches + 1):
            for combo in combinations_with_replacement(branch_types, k):
                cost = 1 + sum(1 + 2 * br[2] for br in combo)
                alphabet.append((cost, (e, combo)))
    alphabet.sort(key=lambda p: (p[0], p[1]))
    return alphabet


def _session_symmetries(n_pairs: int, n_labels: int):
    """Endpoint/label renamings: pair permutations, per-pair endpoint swaps,
    label permutations."""
    out = []
    for pperm in permutations(range(n_pairs)):
        for flips in range(1 << n_pairs):
            for lperm in permutations(range(n_labels)):
                emap = {}
                for pair in range(n_pairs):
                    for side in (0, 1):
                        emap[2 * pair + side] = (
                            2 * pperm[pair] + (side ^ ((flips >> pair) & 1)))
                out.append((emap, lperm))
    return out


def _apply_session_sym(term_rep, emap, lperm):
    return tuple(sorted(
        (emap[e], tuple(sorted((lperm[l], p, c) for l, p, c in branches)))
        for e, branches in term_rep))


def _cmvp_star_corpus(b: Budget):
    """Skeleton mixed-session terms with at least five top-level choices
    under one or two channel restrictions, modulo endpoint/label symmetry."""
    n_labels = b.max_labels
    for n_pairs in range(1, min(b.max_names, 2) + 1):
        budget = b.max_ast_size - n_pairs
        # five choices of >= 2 cost each bound any single choice's branches
        alphabet = _session_choice_alphabet(n_pairs, n_labels,
                                            max_branches=max(budget - 9, 0))
        syms = _session_symmetries(n_pairs, n_labels)
        for choices in _multisets(alphabet, budget, min_count=5):
            if any(_apply_session_sym(choices, em, lp) < choices
                   for em, lp in syms):
                continue
            yield _session_skeleton_term(n_pairs, choices)


_OBSERVABLES = tuple(Name(f"o{i + 1}") for i in range(24))
_L1 = Label("l1")


def _announce(name: Name) -> Term:
    return MixChoice(name, (MixBranch(_L1, SEND, UNIT, None, Inact()),))


def _session_skeleton_term(n_pairs: int, choices, decorate: bool = False
                           ) -> Term:
    pairs = [(Name(f"x{i + 1}"), Name(f"y{i + 1}")) for i in range(n_pairs)]
    endpoints = [n for p in pairs for n in p]
    labels = [Label(f"l{i + 1}") for i in range(8)]
    comps = []
    obs = iter(_OBSERVABLES)
    for e, branches in choices:
        brs = []
        for l, p, c in branches:
            cont: Term = Inact()
            if decorate or c:
                cont = _announce(next(obs))
            if p == 0:
                brs.append(MixBranch(labels[l], SEND, UNIT, None, cont))
            else:
                brs.append(MixBranch(labels[l], RECV, None, _PARAM, cont))
        comps.append(MixChoice(endpoints[e], tuple(brs)))
    body: Term = comps[0] if len(comps) == 1 else Par(tuple(comps))
    for pair in reversed(pairs):
        body = Res(pair, body)
    return body


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------

@dataclass
class CampaignReport:
    property: str
    budget: Budget
    checked: int = 0
    witnesses: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    inconclusive: int = 0

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "budget": self.budget.to_json(),
            "checked": self.checked,
            "witnesses": self.witnesses,
            "failures": self.failures,
            "inconclusive": self.inconclusive,
        }


def property_campaign(prop: str, b: Budget, calculus: str = CMVP,
                      stop_after: int | None = None,
                      seed: int | None = None) -> CampaignReport:
    """Run one of the exhaustive evidence campaigns over the budgeted corpus."""
    match prop:
        case "no-star":
            return _campaign_no_star(b, calculus, stop_after, seed)
        case "confluence":
            return _campaign_confluence(b, stop_after, seed)
        case "correspondence":
            return _campaign_correspondence(b, stop_after, seed)
        case "no-electoral":
            return _campaign_no_electoral(b, stop_after, seed)
        case _:
            raise ValueError(f"unknown campaign property {prop!r}")


def _maybe_shuffle(corpus, seed):
    if seed is None:
        return corpus
    items = list(corpus)
    random.Random(seed).shuffle(items)
    return items


def _might_star(calculus: str, t: Term) -> bool:
    """Necessary condition for the five-step pattern in a skeleton: the
    syncability graph over its top-level choices contains a 5-cycle.

    Any conflict 5-cycle runs through five distinct choice occurrences with
    a synchronisation between cyclic neighbours, so skeletons without such a
    cycle of choices cannot host the pattern.
    """
    pairs: list[tuple[Name, ...]] = []
    while isinstance(t, Res):
        pairs.append(t.names)
        t = t.body
    comps = t.parts if isinstance(t, Par) else (t,)
    if calculus == PI:
        sigs = []
        for c in comps:
            if isinstance(c, PiChoice):
                outs = frozenset(s.prefix.chan for s in c.summands
                                 if isinstance(s.prefix, PiOutput))
                ins = frozenset(s.prefix.chan for s in c.summands
                                if isinstance(s.prefix, PiInput))
                sigs.append((outs, ins))

        def sync(i: int, j: int) -> bool:
            return bool(sigs[i][0] & sigs[j][1]) or bool(sigs[i][1] & sigs[j][0])
    else:
        dual: dict[Name, Name] = {}
        for group in pairs:
            if len(group) == 2:
                dual[group[0]], dual[group[1]] = group[1], group[0]
        sigs = []
        for c in comps:
            if isinstance(c, MixChoice):
                snd = frozenset(br.label for br in c.branches
                                if br.polarity == SEND)
                rcv = frozenset(br.label for br in c.branches
                                if br.polarity == RECV)
                sigs.append((c.endpoint, snd, rcv))

        def sync(i: int, j: int) -> bool:
            e1, s1, r1 = sigs[i]
            e2, s2, r2 = sigs[j]
            if dual.get(e1) != e2:
                return False
            return bool(s1 & r2) or bool(r1 & s2)

    n = len(sigs)
    if n < 5:
        return False
    adj = [[i != j and sync(i, j) for j in range(n)] for i in range(n)]
    # skeleton targets are the term minus the consumed choice pair, so the
    # distinct-result clause holds exactly when the five cyclically adjacent
    # pairs are pairwise distinct as component multisets
    need_distinct = calculus == PI
    for sub in combinations(range(n), 5):
        if any(sum(adj[i][j] for j in sub) < 2 for i in sub):
            continue
        first, rest = sub[0], sub[1:]
        for order in permutations(rest):
            cyc = (first, *order)
            if not all(adj[cyc[k]][cyc[(k + 1) % 5]] for k in range(5)):
                continue
            if need_distinct:
                removed = {
                    tuple(sorted((repr(comps[cyc[k]]),
                                  repr(comps[cyc[(k + 1) % 5]]))))
                    for k in range(5)
                }
                if len(removed) < 5:
                    continue
            return True
    return False


def _campaign_no_star(b: Budget, calculus: str, stop_after, seed):
    rep = CampaignReport("no-star", b)
    corpus = (_pi_star_corpus(b) if calculus == PI else _cmvp_star_corpus(b))
    # for sessions the relaxed footprint-only pattern is checked as well:
    # its absence over the unit-payload skeletons rules the pattern out for
    # every payload and continuation variant within the budget.
    strict_only = calculus == PI
    for t in _maybe_shuffle(corpus, seed):
        rep.checked += 1
        if not _might_star(calculus, t):
            continue
        w = find_pattern_star(calculus, t)
        if w is None and not strict_only:
            w = find_pattern_star(calculus, t, distinct_targets=False)
        if w is not None:
            rep.witnesses.append(
                {"term": render(t), "pattern": w.to_json()})
            if stop_after and len(rep.witnesses) >= stop_after:
                break
    return rep


def _confluence_corpus(b: Budget):
    """Two-pair session skeletons whose branches carry pairwise distinct
    observable continuations."""
    n_pairs = 2
    budget = b.max_ast_size - n_pairs
    # every branch costs 1 + 2 (its observable continuation)
    alphabet = _session_choice_alphabet(n_pairs, b.max_labels,
                                        max_branches=max(1, budget // 3),
                                        conts=1)
    decorated = [(cost + 2 * sum(1 for _ in branches), (e, branches))
                 for cost, (e, branches) in alphabet]
    decorated.sort(key=lambda p: (p[0], p[1]))
    syms = _session_symmetries(n_pairs, b.max_labels)
    for choices in _multisets(decorated, budget, min_count=2):
        if any(_apply_session_sym(choices, em, lp) < choices
               for em, lp in syms):
            continue
        yield _session_skeleton_term(n_pairs, choices, decorate=True)


def _campaign_confluence(b: Budget, stop_after, seed):
    rep = CampaignReport("confluence", b)
    for net in _maybe_shuffle(_confluence_corpus(b), seed):
        steps = [s for s in enumerate_steps(CMVP, net)
                 if s.footprint.kind == COMMUNICATION]
        pairs = [
            (x, y) for x, y in combinations(steps, 2)
            if x.footprint.endpoints != y.footprint.endpoints
            and not in_conflict(x, y)
        ]
        if not pairs:
            continue
        rep.checked += 1
        for x, y in pairs:
            if check_confluence(net, x, y) is None:
                rep.failures.append({
                    "term": render(net),
                    "steps": [render(x.target), render(y.target)],
                })
                if stop_after and len(rep.failures) >= stop_after:
                    return rep
    return rep


def _campaign_correspondence(b: Budget, stop_after, seed):
    rep = CampaignReport("correspondence", b)
    for t in _maybe_shuffle(enumerate_terms(CMVP, b), seed):
        try:
            report = correspondence_report(
                t, PolarityAssignment(), max_states=b.max_states)
        except (TermError, TruncatedError):
            rep.inconclusive += 1
            continue
        rep.checked += 1
        if not report.passed():
            rep.failures.append(
                {"term": render(t), "report": report.to_json()})
            if stop_after and len(rep.failures) >= stop_after:
                return rep
    return rep


def _ring_templates(b: Budget):
    """Component templates over a left and right endpoint with optional
    leader announcements in branch continuations."""
    alphabet = _session_choice_alphabet(1, 1, max_branches=2, conts=2)
    for choices in _multisets(alphabet, b.max_ast_size, min_count=1):
        eps = {e for e, _ in choices}
        if eps != {0, 1}:
            continue  # must talk to both neighbours
        if not any(c for _, branches in choices for _, _, c in branches):
            continue  # must announce somewhere
        yield choices


def _ring_network(template) -> Network:
    n = 5
    pairs = [(Name(f"x{i + 1}"), Name(f"y{i + 1}")) for i in range(n)]
    ids = tuple(Name(str(i + 1)) for i in range(n))
    comps = []
    for i in range(n):
        left = pairs[i][0]               # x_{i+1}: own channel
        right = pairs[(i + 1) % n][1]    # y of the next channel around
        slots = (left, right)
        brs_comp = []
        for e, branches in template:
            brs = []
            for l, p, c in branches:
                cont: Term = _announce(ids[i]) if c else Inact()
                if p == 0:
                    brs.append(MixBranch(_L1, SEND, UNIT, None, cont))
                else:
                    brs.append(MixBranch(_L1, RECV, None, _PARAM, cont))
            brs_comp.append(MixChoice(slots[e], tuple(brs)))
        comps.append(brs_comp[0] if len(brs_comp) == 1
                     else Par(tuple(brs_comp)))
    restricted = tuple(n for p in pairs for n in p)
    return Network(CMVP, restricted, tuple(comps), ids, pair_width=2)


def _campaign_no_electoral(b: Budget, stop_after, seed):
    rep = CampaignReport("no-electoral", b)
    for template in _maybe_shuffle(_ring_templates(b), seed):
        net = _ring_network(template)
        try:
            verdict = verify_electoral(net, max_states=b.max_states)
        except TermError:
            rep.inconclusive += 1
            continue
        if verdict.status == "inconclusive":
            rep.inconclusive += 1
            continue
        rep.checked += 1
        if verdict.status == "electoral":
            rep.failures.append({"term": render(net.composition())})
            if stop_after and len(rep.failures) >= stop_after:
                return rep
    return rep
