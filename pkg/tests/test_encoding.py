"""Translation from mixed sessions to separate sessions and its
operational-correspondence harness."""

from __future__ import annotations

import pytest

from mixsep.canonical import canonicalize, term_key
from mixsep.encoding import (
    EXTERNAL, Harness, INTERNAL, PolarityAssignment, correspondence_report,
    emulate_trace, encode, explore_source,
)
from mixsep.equivalences import weakly_bisimilar
from mixsep.parser import parse, parse_term
from mixsep.semantics import enumerate_steps, reduction_graph
from mixsep.terms import CMV, CMVP, Name, TermError

from conftest import sample_text


def _pa(result):
    return PolarityAssignment(dict(result.annotations))


@pytest.fixture(scope="module")
def s_example():
    return parse(CMVP, sample_text("s_example.cmvp"))


def test_complete_fills_dual_roles():
    r = parse(CMVP, "new x:int y:ext in new u v in 0")
    pa = _pa(r).complete(r.term)
    assert pa.role(Name("x")) == INTERNAL
    assert pa.role(Name("y")) == EXTERNAL
    assert {pa.role(Name("u")), pa.role(Name("v"))} == {INTERNAL, EXTERNAL}


def test_complete_rejects_equal_roles():
    r = parse(CMVP, "new x:int y:int in 0")
    with pytest.raises(TermError):
        _pa(r).complete(r.term)


def test_encode_produces_separate_sessions(s_example):
    pa = _pa(s_example).complete(s_example.term)
    target = encode(s_example.term, pa)
    # the translation must be executable in the separate-choice calculus
    g = reduction_graph(CMV, target)
    assert len(g.terms) > 1


def test_encode_rejects_duplicate_branch():
    t = parse_term(CMVP, "x ( l!true.0 + l!false.0 )")
    with pytest.raises(TermError):
        encode(t, PolarityAssignment().complete(t))


def test_explore_source_matches_reduction_graph(s_example):
    space, _ = explore_source(s_example.term, _pa(s_example))
    g = reduction_graph(CMVP, s_example.term)
    assert set(space.states) == {term_key(u) for u in g.terms}


def test_correspondence_report_passes(s_example):
    rep = correspondence_report(s_example.term, _pa(s_example))
    assert rep.passed()
    assert rep.soundness_weak
    assert rep.intermediate_states  # commitment happens in several steps


def test_correspondence_fails_closed_on_bad_input():
    t = parse_term(CMVP, "x ( l!true.0 + l!false.0 )")
    with pytest.raises(TermError):
        correspondence_report(t, PolarityAssignment())


def test_emulate_trace_reaches_image(s_example):
    pa = _pa(s_example)
    h = Harness(s_example.term, pa)
    step = enumerate_steps(CMVP, s_example.term)[0]
    trace = emulate_trace(s_example.term, step, pa)
    assert term_key(canonicalize(trace[0])) == term_key(
        canonicalize(h.target_graph.terms[0]))
    last = h.target_graph.keys[term_key(canonicalize(trace[-1]))]
    assert last in h.images[term_key(step.target)]


def test_emulate_trace_rejects_foreign_step(s_example):
    pa = _pa(s_example)
    other = parse_term(
        CMVP, "new x y in ( x ( l!true.0 ) | y ( l?(z).0 ) )")
    step = enumerate_steps(CMVP, other)[0]
    with pytest.raises(TermError):
        emulate_trace(s_example.term, step, pa)


def test_encoding_of_inert_term_is_bisimilar_to_source_images():
    r = parse(CMVP, "new x:int y:ext in ( x ( l!true.0 ) | y ( l?(z).0 ) )")
    pa = _pa(r)
    rep = correspondence_report(r.term, pa)
    assert rep.passed()
    h = Harness(r.term, pa)
    for key, enc in h.encodings.items():
        ge = reduction_graph(CMV, enc)
        # every state in the image set really is bisimilar to the encoding
        for s in h.images[key]:
            assert weakly_bisimilar(h.target_graph, ge, s, 0)[0]
