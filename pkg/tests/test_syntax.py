"""Parser, renderer, substitution, expression evaluation, canonical forms."""

from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from mixsep.canonical import canonicalize, term_key
from mixsep.enumeration import Budget, enumerate_terms
from mixsep.parser import ParseError, parse, parse_term
from mixsep.render import render
from mixsep.terms import (
    AndV, CMV, CMVP, FALSE, Inact, Lit, Name, NotV, OrV, PI, Par, PiChoice,
    PiInput, PiOutput, PiRep, PiSummand, PiTau, Res, TRUE, UNIT, Term,
    EvalError, eval_expr, free_names, substitute,
)

from conftest import sample_text


# --- round trips -----------------------------------------------------------

@pytest.mark.parametrize("calculus,budget", [
    (PI, Budget(4)), (CMVP, Budget(4)), (CMV, Budget(3, 1, 1)),
])
def test_render_parse_round_trip_enumerated(calculus, budget):
    for t in enumerate_terms(calculus, budget):
        back = parse_term(calculus, render(t))
        assert term_key(canonicalize(back)) == term_key(canonicalize(t))


@pytest.mark.parametrize("calculus,name", [
    (PI, "p_star.pi"),
    (PI, "p_star_one_channel.pi"),
    (CMVP, "p_m.cmvp"),
    (CMVP, "s_example.cmvp"),
])
def test_render_parse_round_trip_samples(calculus, name):
    t = parse(calculus, sample_text(name)).term
    back = parse_term(calculus, render(t))
    assert term_key(canonicalize(back)) == term_key(canonicalize(t))


def test_parse_annotations():
    r = parse(CMVP, "new x:int y:ext in x ( l!true.0 )")
    assert r.annotations == {Name("x"): "int", Name("y"): "ext"}


def test_parse_reports_position():
    with pytest.raises(ParseError):
        parse(PI, sample_text("garbage.txt"))
    try:
        parse(PI, "a! +\n  %")
    except ParseError as e:
        assert "2:" in str(e)
    else:
        pytest.fail("expected a parse error")


@pytest.mark.parametrize("calculus,text", [
    (PI, "x ( l!true.0 )"),
    (CMVP, "a! + b?"),
    (CMV, "x ( l!true.0 + l?(z).0 )"),
    (CMVP, "new x in 0"),
    (PI, "new x y z in 0 |"),
])
def test_parse_rejects_foreign_constructs(calculus, text):
    with pytest.raises(ParseError):
        parse(calculus, text)


def test_parenthesised_groups_stay_components():
    t = parse_term(CMVP, "( 0 | 0 ) | ( 0 | 0 )")
    assert isinstance(t, Par) and len(t.parts) == 2
    flat = parse_term(CMVP, "0 | 0 | 0 | 0")
    assert isinstance(flat, Par) and len(flat.parts) == 4


# --- expression evaluation against a truth-table oracle --------------------

def _exprs(depth: int):
    if depth == 0:
        yield TRUE, True
        yield FALSE, False
        return
    yield from _exprs(depth - 1)
    prev = list(_exprs(depth - 1))
    for (e, b) in prev:
        yield NotV(e), not b
    for (e1, b1), (e2, b2) in product(prev, repeat=2):
        yield AndV(e1, e2), b1 and b2
        yield OrV(e1, e2), b1 or b2


def test_eval_truth_table():
    for expr, expected in _exprs(2):
        assert eval_expr(expr) == Lit(expected)


def test_eval_passes_names_and_rejects_non_booleans():
    assert eval_expr(Name("x")) == Name("x")
    assert eval_expr(UNIT) == UNIT
    with pytest.raises(EvalError):
        eval_expr(NotV(UNIT))


# --- substitution against a nameless (de Bruijn) oracle --------------------

_NAMES = [Name("x"), Name("y"), Name("z")]


def _db(t: Term, env: tuple[Name, ...]):
    """Nameless view of a pi term; capture is impossible by construction."""

    def var(n: Name):
        return ("bound", env.index(n)) if n in env else ("free", n)

    match t:
        case Inact():
            return ("0",)
        case Par(parts=ps):
            return ("par", tuple(_db(p, env) for p in ps))
        case Res(names=(n,), body=b):
            return ("res", _db(b, (n,) + env))
        case PiRep(body=b):
            return ("rep", _db(b, env))
        case PiChoice(summands=ss):
            out = []
            for s in ss:
                match s.prefix:
                    case PiTau():
                        out.append(("tau", _db(s.cont, env)))
                    case PiOutput(chan=c, payload=v):
                        pv = var(v) if isinstance(v, Name) else ("lit", v)
                        out.append(("out", var(c), pv, _db(s.cont, env)))
                    case PiInput(chan=c, param=p):
                        out.append(("in", var(c), _db(s.cont, (p,) + env)))
            return ("choice", tuple(out))
    raise AssertionError(f"unexpected term {t!r}")


def _db_subst(db, x: Name, v: Name):
    if db == ("free", x):
        return ("free", v)
    return tuple(_db_subst(e, x, v) if isinstance(e, tuple) else e
                 for e in db)


def _pi_terms():
    names = st.sampled_from(_NAMES)
    values = st.one_of(names, st.just(TRUE))

    def summand(cont):
        prefix = st.one_of(
            st.just(PiTau()),
            st.builds(PiOutput, names, values),
            st.builds(PiInput, names, names),
        )
        return st.builds(PiSummand, prefix, cont)

    return st.recursive(
        st.just(Inact()),
        lambda inner: st.one_of(
            st.builds(lambda ss: PiChoice(tuple(ss)),
                      st.lists(summand(inner), min_size=1, max_size=2)),
            st.builds(lambda n, b: Res((n,), b), names, inner),
            st.builds(lambda a, b: Par((a, b)), inner, inner),
        ),
        max_leaves=8,
    )


@settings(max_examples=120, deadline=None)
@given(_pi_terms(), st.sampled_from(_NAMES), st.sampled_from(_NAMES))
def test_substitute_matches_nameless_oracle(t, x, v):
    result = substitute(t, {x: v})
    assert _db(result, ()) == _db_subst(_db(t, ()), x, v)


def test_substitute_avoids_capture():
    # new y in x!(y') after {x := y} must not bind the payload
    t = Res((Name("y"),),
            PiChoice((PiSummand(PiOutput(Name("x"), Name("x")), Inact()),)))
    r = substitute(t, {Name("x"): Name("y")})
    assert Name("y") in free_names(r)
    assert _db(r, ()) == _db_subst(_db(t, ()), Name("x"), Name("y"))


# --- canonical forms -------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(_pi_terms(), st.randoms())
def test_canonical_key_invariant_under_shuffling(t, rng):
    key = term_key(canonicalize(t))

    def shuffle(u: Term) -> Term:
        match u:
            case Par(parts=ps):
                parts = [shuffle(p) for p in ps] + [Inact()]
                rng.shuffle(parts)
                return Par(tuple(parts))
            case Res(names=ns, body=b):
                return Res(ns, shuffle(b))
            case _:
                return u

    variant = Par((shuffle(t), Inact()))
    assert term_key(canonicalize(variant)) == key


def test_canonical_alpha_renaming():
    a = parse_term(PI, "new u in u! + a?.u!")
    b = parse_term(PI, "new w in w! + a?.w!")
    assert term_key(canonicalize(a)) == term_key(canonicalize(b))


def test_canonical_separates_different_terms():
    keys = {term_key(canonicalize(parse_term(PI, s)))
            for s in ("a!", "a?", "a! | a?", "a! + a?", "tau", "0")}
    assert len(keys) == 6
