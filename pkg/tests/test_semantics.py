"""Step enumeration, barbs, and reduction graphs against the brute-force
reference reducer."""

from __future__ import annotations

import pytest

from mixsep.canonical import canonicalize, term_key
from mixsep.enumeration import Budget, enumerate_terms
from mixsep.parser import parse, parse_term
from mixsep.semantics import (
    TruncatedError, barbs, enumerate_steps, graph_json, reduction_graph,
    weak_barbs,
)
from mixsep.terms import CMV, CMVP, PI

from conftest import sample_text
from reference import oracle_successors


def _successors(calculus, t):
    return {term_key(canonicalize(s.target))
            for s in enumerate_steps(calculus, t)}


@pytest.mark.parametrize("calculus,budget", [
    (PI, Budget(5)),
    (CMVP, Budget(5)),
    (CMV, Budget(3, 1, 1)),
])
def test_steps_agree_with_oracle_on_enumerated_corpus(calculus, budget):
    checked = 0
    for t in enumerate_terms(calculus, budget):
        assert _successors(calculus, t) == oracle_successors(calculus, t), \
            repr(t)
        checked += 1
    assert checked > 100


@pytest.mark.parametrize("calculus,text", [
    # scope extrusion: partners split across nested restrictions
    (PI, "new a in (a! | (new b in (a? | b!)))"),
    (PI, "(new a in a! + c?) | c!"),
    # same channel for both polarities, self-sync must not happen
    (PI, "a! + a?"),
    (PI, "a! + a? | a! + a?"),
    # replication: single and double unfolding interactions
    (PI, "rep (tau.a!)"),
    (PI, "rep (a! + a?.b!)"),
    (PI, "rep a! | a?.b!"),
    # free session endpoints never synchronise
    (CMVP, "x ( l!true.0 ) | y ( l?(z).0 )"),
    (CMVP, "new x y in ( x ( l!true.0 ) | y ( l?(z).0 ) )"),
    # value payloads evaluate before transmission
    (CMVP, "new x y in ( x ( l!(not true).0 ) | y ( l?(z).(if z then 0 else (x ( l!true.0 )) ) ) )"),
    (CMVP, "if not (true and false) then (new x y in ( x ( l!true.0 ) | y ( l?(z).0 ) )) else 0"),
    (CMV, "new x y in ( x sel l.x!true | y case { l: y?(z) } )"),
    (CMV, "new x y in ( x sel l.0 | y case { l: 0, m: 0 } )"),
])
def test_steps_agree_with_oracle_on_tricky_terms(calculus, text):
    t = parse_term(calculus, text)
    assert _successors(calculus, t) == oracle_successors(calculus, t)


def test_steps_agree_with_oracle_on_samples():
    for calculus, name in ((PI, "p_star.pi"), (PI, "p_star_one_channel.pi"),
                           (CMVP, "p_m.cmvp"), (CMVP, "s_example.cmvp")):
        t = parse(calculus, sample_text(name)).term
        assert _successors(calculus, t) == oracle_successors(calculus, t)


def test_step_count_on_star_samples():
    five = parse(PI, sample_text("p_star.pi")).term
    assert len(enumerate_steps(PI, five)) == 5
    one = parse(PI, sample_text("p_star_one_channel.pi")).term
    # any of the five outputs can meet any of the other four inputs
    assert len(enumerate_steps(PI, one)) == 20


def test_barbs_pi():
    t = parse_term(PI, "a! + b? | new c in c!")
    assert {b.text() for b in barbs(PI, t)} == {"a!", "b?"}


def test_barbs_sessions():
    t = parse_term(CMVP, "x ( l!true.0 ) | new u v in u ( l?(z).0 )")
    assert {b.text() for b in barbs(CMVP, t)} == {"x"}


def test_weak_barbs_reach_continuations():
    t = parse_term(PI, "tau.a! | b!")
    assert {b.text() for b in weak_barbs(PI, t)} == {"a!", "b!", "tau" } - {"tau"}


def test_graph_is_deterministic_and_truncation_flagged():
    t = parse_term(PI, "rep (tau.a!)")
    g = reduction_graph(PI, t, max_states=5)
    assert g.truncated
    with pytest.raises(TruncatedError):
        g.weak_barbs(0)
    j1 = graph_json(reduction_graph(PI, parse_term(PI, "a! | a?.b!")))
    j2 = graph_json(reduction_graph(PI, parse_term(PI, "a! | a?.b!")))
    assert j1 == j2 and not j1["truncated"]


def test_graph_states_closed_under_steps():
    t = parse(CMVP, sample_text("p_m.cmvp")).term
    g = reduction_graph(CMVP, t)
    for i, u in enumerate(g.terms):
        succ = {term_key(canonicalize(s.target))
                for s in enumerate_steps(CMVP, u)}
        assert succ == {term_key(canonicalize(g.terms[d]))
                        for d in g.successors(i)}
