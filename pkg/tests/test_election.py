"""Networks, hypergraphs, automorphisms, and electoral verdicts."""

from __future__ import annotations

from itertools import combinations

import pytest

from mixsep.election import (
    Automorphism, Network, hypergraph, is_automorphism, maximal_executions,
    orbits, parse_network, symmetric_wrt, verify_electoral,
)
from mixsep.parser import parse_term
from mixsep.terms import CMVP, Name, PI, TermError

from conftest import sample_text


@pytest.fixture(scope="module")
def le_pi():
    return parse_network(sample_text("le_pi.net"))


def test_network_parsing(le_pi):
    net, auto = le_pi
    assert net.calculus == PI
    assert len(net.components) == 5
    assert net.id_names == tuple(Name(str(i)) for i in range(1, 6))
    assert auto is not None


def test_hypergraph_is_complete(le_pi):
    net, _ = le_pi
    h = hypergraph(net)
    assert h.nodes == frozenset(range(1, 6))
    covered = set()
    for _, members in h.incidence:
        covered.update(combinations(sorted(members), 2))
    assert covered == set(combinations(range(1, 6), 2))


def test_automorphism_checks(le_pi):
    net, auto = le_pi
    h = hypergraph(net)
    assert is_automorphism(h, auto)
    assert orbits(auto) == [frozenset({1, 2, 3, 4, 5})]
    assert symmetric_wrt(net, auto)
    broken = Automorphism(((1, 2), (2, 1)), auto.arc_perm)
    assert not is_automorphism(h, broken)


def test_electoral_verdict(le_pi):
    net, _ = le_pi
    v = verify_electoral(net)
    assert v.status == "electoral"
    assert len(v.leader_table) == 10
    wins: dict[Name, int] = {}
    for _, leader in v.leader_table:
        wins[leader] = wins.get(leader, 0) + 1
    assert wins == {Name(str(i)): 2 for i in range(1, 6)}


def test_maximal_executions(le_pi):
    net, _ = le_pi
    count, execs = maximal_executions(net)
    assert count == 10
    assert all(len(path) == 3 for path, _ in execs)


def test_not_electoral_without_announcement():
    net = Network(PI, (Name("a"),),
                  (parse_term(PI, "a!"), parse_term(PI, "a?")),
                  (Name("1"), Name("2")))
    v = verify_electoral(net)
    assert v.status == "not-electoral"
    assert v.counterexample is not None


def test_single_winner_network_is_electoral():
    net = Network(PI, (Name("a"),),
                  (parse_term(PI, "a!"), parse_term(PI, "a?.1!")),
                  (Name("1"), Name("2")))
    v = verify_electoral(net)
    assert v.status == "electoral"
    assert all(leader == Name("1") for _, leader in v.leader_table)


@pytest.mark.parametrize("name", [
    "ring_both_sides.cmvp.net",
    "ring_deterministic.cmvp.net",
    "ring_receiver_wins.cmvp.net",
])
def test_session_rings_are_symmetric_but_never_electoral(name):
    net, auto = parse_network(sample_text(name))
    assert net.calculus == CMVP
    assert len(net.components) == 5
    assert is_automorphism(hypergraph(net), auto)
    assert orbits(auto) == [frozenset({1, 2, 3, 4, 5})]
    assert symmetric_wrt(net, auto)
    assert verify_electoral(net).status == "not-electoral"


def test_network_rejects_duplicate_ids():
    with pytest.raises(TermError):
        Network(PI, (), (parse_term(PI, "0"),), (Name("1"), Name("1")))


def test_parse_network_requires_calculus():
    from mixsep.parser import ParseError
    with pytest.raises(ParseError):
        parse_network("ids: 1 2\n0 | 0\n")
