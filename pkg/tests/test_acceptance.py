"""Acceptance gate: one check per headline claim, one PASS/FAIL line each.

Run with ``pytest -v tests/test_acceptance.py -s`` to see the lines as the
criteria complete.
"""

from __future__ import annotations

import time
from itertools import combinations

import pytest

from mixsep.canonical import canonicalize, term_key
from mixsep.election import (
    hypergraph, is_automorphism, orbits, parse_network, symmetric_wrt,
    verify_electoral,
)
from mixsep.encoding import Harness, PolarityAssignment, emulate_trace
from mixsep.enumeration import Budget, enumerate_terms, property_campaign
from mixsep.equivalences import (
    coupled_similar, is_junk, validate_bisimulation, weakly_bisimilar,
)
from mixsep.parser import parse, parse_term
from mixsep.patterns import find_pattern_star, iter_pattern_m
from mixsep.semantics import enumerate_steps, reduction_graph
from mixsep.terms import CMVP, Name, PI, Par

from conftest import sample_text
from reference import oracle_successors


def _verdict(n: int, label: str, ok: bool) -> None:
    print(f"\nCRITERION {n} ({label}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {n} ({label}) failed"


def _key(t):
    return term_key(canonicalize(t))


# -- 1: leader election in the pi calculus ---------------------------------

def test_criterion_1_leader_election_pi():
    start = time.monotonic()
    net, auto = parse_network(sample_text("le_pi.net"))
    h = hypergraph(net)
    covered = set()
    for _, members in h.incidence:
        covered.update(combinations(sorted(members), 2))
    complete = covered == set(combinations(range(1, 6), 2))
    v = verify_electoral(net)
    wins: dict[Name, int] = {}
    for _, leader in v.leader_table:
        wins[leader] = wins.get(leader, 0) + 1
    elapsed = time.monotonic() - start
    _verdict(1, "five-node election in pi", complete
             and is_automorphism(h, auto)
             and v.status == "electoral"
             and len(v.leader_table) == 10
             and wins == {Name(str(i)): 2 for i in range(1, 6)}
             and elapsed < 10)


# -- 2: the star pattern exists in pi --------------------------------------

def test_criterion_2_star_in_pi():
    start = time.monotonic()
    t = parse(PI, sample_text("p_star.pi")).term
    w = find_pattern_star(PI, t)
    ok = w is not None
    if ok:
        chans = [sorted(n.base for n in s.footprint.endpoints)
                 for s in w.steps]
        ok &= sorted(c for cs in chans for c in cs) == list("abcde")
        expected = {
            _key(parse_term(PI, s)) for s in (
                "b! + c?.oc! | c! + d?.od! | d! + e?.oe! | oa!",
                "ob! | c! + d?.od! | d! + e?.oe! | e! + a?.oa!",
                "a! + b?.ob! | oc! | d! + e?.oe! | e! + a?.oa!",
                "a! + b?.ob! | b! + c?.oc! | od! | e! + a?.oa!",
                "a! + b?.ob! | b! + c?.oc! | c! + d?.od! | oe!",
            )
        }
        ok &= {_key(s.target) for s in w.steps} == expected
        ok &= len(w.conflicts) == 5 and len(w.distributable_pairs) == 5
        degree = [0] * 5
        for i, j in w.conflicts:
            degree[i] += 1
            degree[j] += 1
        ok &= degree == [2] * 5
    one = parse(PI, sample_text("p_star_one_channel.pi")).term
    w1 = find_pattern_star(PI, one)
    ok &= w1 is not None and len({_key(s.target) for s in w1.steps}) == 5
    elapsed = time.monotonic() - start
    _verdict(2, "star pattern in pi", ok and elapsed < 5)


# -- 3: the M pattern exists in mixed sessions ------------------------------

def test_criterion_3_m_in_mixed_sessions():
    start = time.monotonic()
    t = parse(CMVP, sample_text("p_m.cmvp")).term
    outer_a = _key(parse_term(
        CMVP, "new x y in ( x ( l!false.0 + l?(z).0 )"
              " | y ( l?(z).0 + l!false.0 ) )"))
    middle = _key(parse_term(
        CMVP, "new x y in ( x ( l!false.0 + l?(z).0 )"
              " | y ( l?(z).0 + l!true.0 ) )"))
    outer_c = _key(parse_term(
        CMVP, "new x y in ( x ( l!true.0 + l?(z).0 )"
              " | y ( l?(z).0 + l!true.0 ) )"))
    ok = False
    for w in iter_pattern_m(CMVP, t):
        a, b, c = (_key(s.target) for s in w.steps)
        if {a, c} == {outer_a, outer_c} and b == middle:
            ok = True
            break
    elapsed = time.monotonic() - start
    _verdict(3, "M pattern in mixed sessions", ok and elapsed < 5)


# -- 4: no star within budget in mixed sessions, but stars in pi -----------

def test_criterion_4_no_star_in_mixed_sessions():
    budget = Budget(14, max_names=2, max_labels=2)
    sessions = property_campaign("no-star", budget, calculus=CMVP)
    pi = property_campaign("no-star", budget, calculus=PI, stop_after=1)
    _verdict(4, "no star in mixed sessions within budget",
             sessions.checked > 0
             and sessions.witnesses == [] and sessions.failures == []
             and len(pi.witnesses) >= 1)


# -- 5: mixed-session synchronisation is confluent --------------------------

def test_criterion_5_confluence():
    rep = property_campaign("confluence", Budget(22, 2, 2))
    _verdict(5, "confluence of mixed sessions",
             rep.checked > 0 and rep.failures == [] and rep.witnesses == [])


# -- 6: operational correspondence of the translation -----------------------

def test_criterion_6_correspondence():
    start = time.monotonic()
    result = parse(CMVP, sample_text("s_example.cmvp"))
    S = result.term
    pa = PolarityAssignment(dict(result.annotations))

    # the four continuations carry pairwise distinct observables
    conts = [p for p in S.body.parts]
    barb_sets = []
    for choice in (conts[0], conts[2]):
        for branch in choice.branches:
            barb_sets.append(frozenset(
                b.text() for b in
                reduction_graph(CMVP, branch.cont).weak_barbs(0)))
    ok = len(set(barb_sets)) == 4

    h = Harness(S, pa)
    rep = h.report()
    ok &= rep.passed() and rep.soundness_weak

    # the chosen source step: transmit true into the first receive on y
    expected_target = _key(parse_term(
        CMVP, "new x y in ( o2 ( w!().0 )"
              " | y ( l!false.(o3 ( w!().0 )) + l?(z).(o4 ( w!().0 )) ) )"))
    step = next(s for s in enumerate_steps(CMVP, S)
                if _key(s.target) == expected_target)

    trace = emulate_trace(S, step, pa)
    ok &= len(trace) == 3  # start, commitment, handshake
    g = h.target_graph
    ids = [g.keys[_key(u)] for u in trace]
    image = h.images[term_key(step.target)]
    intermediates = set(h.intermediate_states())
    ok &= ids[0] == 0
    ok &= ids[1] in intermediates        # committed, not yet any encoding
    ok &= ids[2] in image                # handshake completes the emulation
    # two more steps resolve branch and payload without leaving the image
    finals = [v for u in g.successors(ids[2]) for v in g.successors(u)
              if v in image]
    ok &= bool(finals)

    campaign = property_campaign(
        "correspondence", Budget(4, 1, 1, max_states=4000))
    ok &= campaign.checked > 150 and campaign.failures == []
    elapsed = time.monotonic() - start
    _verdict(6, "operational correspondence", ok and elapsed < 300)


# -- 7: equivalence sanity --------------------------------------------------

def test_criterion_7_equivalence_sanity():
    graphs = [reduction_graph(CMVP, t)
              for t in enumerate_terms(CMVP, Budget(4))][:40]

    def bisim(a, b):
        return weakly_bisimilar(a, b, 0, 0)[0]

    ok = all(bisim(g, g) for g in graphs)
    related = [[bisim(a, b) for b in graphs] for a in graphs]
    n = len(graphs)
    for i in range(n):
        for j in range(n):
            ok &= related[i][j] == related[j][i]
            for k in range(n):
                if related[i][j] and related[j][k]:
                    ok &= related[i][k]
    for ga, gb in combinations(graphs, 2):
        yes, w = weakly_bisimilar(ga, gb, 0, 0)
        if yes:
            ok &= coupled_similar(ga, gb, 0, 0)[0]
            ok &= validate_bisimulation(ga, gb, w)

    junk = parse_term(CMVP, "new s t in t ( l!true.0 )")
    p = parse_term(CMVP, "x ( l!true.0 + l?(z).0 )")
    ok &= is_junk(CMVP, junk)
    ok &= bisim(reduction_graph(CMVP, p),
                reduction_graph(CMVP, Par((p, junk))))
    _verdict(7, "equivalence sanity", ok)


# -- 8: step enumeration agrees with the brute-force reducer ---------------

def test_criterion_8_steps_against_oracle():
    ok = True
    total = 0
    for calculus, budget in ((PI, Budget(5)), (CMVP, Budget(5))):
        for t in enumerate_terms(calculus, budget):
            total += 1
            got = {_key(s.target) for s in enumerate_steps(calculus, t)}
            if got != oracle_successors(calculus, t):
                ok = False
    _verdict(8, f"step oracle agreement on {total} terms", ok and total > 500)


# -- 9: symmetric session rings never elect ---------------------------------

def test_criterion_9_symmetric_rings_not_electoral():
    ok = True
    for name in ("ring_both_sides.cmvp.net", "ring_deterministic.cmvp.net",
                 "ring_receiver_wins.cmvp.net"):
        net, auto = parse_network(sample_text(name))
        ok &= len(net.components) == 5
        ok &= is_automorphism(hypergraph(net), auto)
        ok &= orbits(auto) == [frozenset({1, 2, 3, 4, 5})]
        ok &= symmetric_wrt(net, auto)
        ok &= verify_electoral(net).status != "electoral"
    _verdict(9, "symmetric session rings never electoral", ok)
