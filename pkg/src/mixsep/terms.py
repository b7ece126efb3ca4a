"""Abstract syntax shared by the three calculi.

Structural nodes (parallel, restriction, conditional, inactive) are shared;
guard nodes are calculus specific.  Terms are immutable; all operations here
are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

PI = "pi"
CMVP = "cmv+"
CMV = "cmv"
CALCULI = (PI, CMVP, CMV)

SEND = "!"
RECV = "?"


@dataclass(frozen=True, order=True)
class Name:
    """A channel or variable name.

    ``tag`` distinguishes generated names from source names: two names are
    equal iff both base and tag agree.  Canonically renamed binders use the
    reserved base ``".b"`` which the surface grammar cannot produce.
    """

    base: str
    tag: int | None = field(default=None)

    def __str__(self) -> str:
        return self.base if self.tag is None else f"{self.base}_{self.tag}"

    @property
    def is_canonical_binder(self) -> bool:
        return self.base == ".b"


def canonical_binder(level: int) -> Name:
    return Name(".b", level)


class FreshNames:
    """Fresh-name supply; never returns a name equal to one it was seeded with."""

    def __init__(self, avoid: set[Name] = frozenset()):
        self._avoid = set(avoid)
        self._counter = itertools.count(
            max((n.tag for n in avoid if n.tag is not None), default=-1) + 1
        )

    def fresh(self, base: str = "n") -> Name:
        while True:
            n = Name(base, next(self._counter))
            if n not in self._avoid:
                self._avoid.add(n)
                return n


@dataclass(frozen=True, order=True)
class Label:
    """A branching/selection label.

    ``tag`` is unset for labels from the surface syntax.  The encoder attaches
    the polarity of the source summand ("!" / "?") or an administrative branch
    index so that generated labels can never collide with parsed ones.
    """

    base: str
    tag: str | None = None

    def __str__(self) -> str:
        if self.tag is None:
            return self.base
        if self.tag in (SEND, RECV):
            return f"{self.base}{'_snd' if self.tag == SEND else '_rcv'}"
        return f"{self.base}{self.tag}"


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: bool


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class NotV:
    operand: "Value"


@dataclass(frozen=True)
class AndV:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class OrV:
    left: "Value"
    right: "Value"


Value = Union[Lit, UnitV, Name, NotV, AndV, OrV]

TRUE = Lit(True)
FALSE = Lit(False)
UNIT = UnitV()


class EvalError(Exception):
    """Raised when a boolean expression cannot be evaluated to a literal."""


def eval_expr(v: Value) -> Value:
    """Evaluate a closed boolean expression; literals, unit and names pass through."""
    match v:
        case Lit() | UnitV() | Name():
            return v
        case NotV(operand):
            return Lit(not _as_bool(operand))
        case AndV(left, right):
            return Lit(_as_bool(left) and _as_bool(right))
        case OrV(left, right):
            return Lit(_as_bool(left) or _as_bool(right))
    raise EvalError(f"not a value: {v!r}")


def _as_bool(v: Value) -> bool:
    r = eval_expr(v)
    if isinstance(r, Lit):
        return r.value
    raise EvalError(f"expected a boolean, got {r}")


def value_names(v: Value) -> set[Name]:
    match v:
        case Name():
            return {v}
        case NotV(operand):
            return value_names(operand)
        case AndV(left, right) | OrV(left, right):
            return value_names(left) | value_names(right)
        case _:
            return set()


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Inact:
    """The inactive term 0 (in pi: the empty choice)."""


@dataclass(frozen=True)
class Par:
    """n-ary parallel composition; parsers flatten into this form."""

    parts: tuple["Term", ...]


@dataclass(frozen=True)
class Res:
    """Restriction: one name in pi, the two dual endpoints of a channel otherwise."""

    names: tuple[Name, ...]
    body: "Term"


@dataclass(frozen=True)
class Cond:
    value: Value
    then: "Term"
    els: "Term"


# --- pi ---

@dataclass(frozen=True)
class PiInput:
    chan: Name
    param: Name


@dataclass(frozen=True)
class PiOutput:
    chan: Name
    payload: Value


@dataclass(frozen=True)
class PiTau:
    pass


PiPrefix = Union[PiInput, PiOutput, PiTau]


@dataclass(frozen=True)
class PiSummand:
    prefix: PiPrefix
    cont: "Term"


@dataclass(frozen=True)
class PiChoice:
    summands: tuple[PiSummand, ...]


@dataclass(frozen=True)
class PiRep:
    body: "Term"


# --- CMV+ (mixed sessions) ---

@dataclass(frozen=True)
class MixBranch:
    label: Label
    polarity: str  # SEND or RECV
    value: Value | None  # payload for SEND
    param: Name | None  # binder for RECV
    cont: "Term"


@dataclass(frozen=True)
class MixChoice:
    endpoint: Name
    branches: tuple[MixBranch, ...]


# --- CMV (separate sessions) ---

@dataclass(frozen=True)
class CmvOut:
    chan: Name
    value: Value
    cont: "Term"


@dataclass(frozen=True)
class CmvIn:
    chan: Name
    param: Name
    cont: "Term"


@dataclass(frozen=True)
class CmvSel:
    chan: Name
    label: Label
    cont: "Term"


@dataclass(frozen=True)
class CmvBran:
    chan: Name
    arms: tuple[tuple[Label, "Term"], ...]


Term = Union[
    Inact, Par, Res, Cond,
    PiChoice, PiRep,
    MixChoice,
    CmvOut, CmvIn, CmvSel, CmvBran,
]


class TermError(Exception):
    """Malformed term (wrong calculus, duplicate branching labels, ...)."""


def calculus_of(t: Term) -> set[str]:
    """The calculi a term is well-formed in."""
    cs = set(CALCULI)
    for sub in subterms(t):
        match sub:
            case PiChoice() | PiRep():
                cs &= {PI}
            case MixChoice():
                cs &= {CMVP}
            case CmvOut() | CmvIn() | CmvSel() | CmvBran():
                cs &= {CMV}
            case Cond():
                cs &= {CMVP, CMV}
            case Res(names=ns):
                cs &= {PI} if len(ns) == 1 else {CMVP, CMV}
    return cs


def check_calculus(t: Term, calculus: str) -> None:
    if calculus not in CALCULI:
        raise TermError(f"unknown calculus {calculus!r}")
    if calculus not in calculus_of(t):
        raise TermError(f"term is not a {calculus} term")
    if calculus == CMV:
        for sub in subterms(t):
            if isinstance(sub, CmvBran):
                labels = [l for l, _ in sub.arms]
                if len(labels) != len(set(labels)):
                    raise TermError("branching labels must be pairwise distinct")


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from subterms(c)


def children(t: Term) -> tuple[Term, ...]:
    """Immediate process subterms, in a fixed order used by Occurrence paths."""
    match t:
        case Inact():
            return ()
        case Par(parts):
            return parts
        case Res(_, body) | PiRep(body):
            return (body,)
        case Cond(_, then, els):
            return (then, els)
        case PiChoice(summands):
            return tuple(s.cont for s in summands)
        case MixChoice(_, branches):
            return tuple(b.cont for b in branches)
        case CmvOut(cont=c) | CmvIn(cont=c) | CmvSel(cont=c):
            return (c,)
        case CmvBran(arms=arms):
            return tuple(p for _, p in arms)
    raise TermError(f"not a term: {t!r}")


@dataclass(frozen=True, order=True)
class Occurrence:
    """Path of child indices from the root of (the canonical form of) a term.

    ``replicated`` marks occurrences that live under a replication: each step
    through such an occurrence conceptually uses a fresh unfolding, so two
    steps sharing it do not compete for the same prefix.
    """

    path: tuple[int, ...]
    replicated: bool = False

    def resolve(self, t: Term) -> Term:
        for i in self.path:
            cs = children(t)
            if i >= len(cs):
                raise TermError(f"occurrence {self.path} does not resolve in term")
            t = cs[i]
        return t


# ---------------------------------------------------------------------------
# Free names and substitution
# ---------------------------------------------------------------------------

def free_names(t: Term) -> set[Name]:
    match t:
        case Inact():
            return set()
        case Par(parts):
            out: set[Name] = set()
            for p in parts:
                out |= free_names(p)
            return out
        case Res(names, body):
            return free_names(body) - set(names)
        case Cond(v, then, els):
            return value_names(v) | free_names(then) | free_names(els)
        case PiChoice(summands):
            out = set()
            for s in summands:
                match s.prefix:
                    case PiInput(chan, param):
                        out |= {chan} | (free_names(s.cont) - {param})
                    case PiOutput(chan, payload):
                        out |= {chan} | value_names(payload) | free_names(s.cont)
                    case PiTau():
                        out |= free_names(s.cont)
            return out
        case PiRep(body):
            return free_names(body)
        case MixChoice(endpoint, branches):
            out = {endpoint}
            for b in branches:
                if b.polarity == SEND:
                    out |= value_names(b.value) | free_names(b.cont)
                else:
                    out |= free_names(b.cont) - {b.param}
            return out
        case CmvOut(chan, value, cont):
            return {chan} | value_names(value) | free_names(cont)
        case CmvIn(chan, param, cont):
            return {chan} | (free_names(cont) - {param})
        case CmvSel(chan, _, cont):
            return {chan} | free_names(cont)
        case CmvBran(chan, arms):
            out = {chan}
            for _, p in arms:
                out |= free_names(p)
            return out
    raise TermError(f"not a term: {t!r}")


Subst = Mapping[Name, Union[Name, Value]]


def _subst_value(v: Value, m: Subst) -> Value:
    match v:
        case Name():
            return m.get(v, v)
        case NotV(operand):
            return NotV(_subst_value(operand, m))
        case AndV(left, right):
            return AndV(_subst_value(left, m), _subst_value(right, m))
        case OrV(left, right):
            return OrV(_subst_value(left, m), _subst_value(right, m))
        case _:
            return v


def _subst_chan(n: Name, m: Subst) -> Name:
    r = m.get(n, n)
    if not isinstance(r, Name):
        raise TermError(f"cannot substitute value {r!r} into channel position")
    return r


def substitute(t: Term, m: Subst, fresh: FreshNames | None = None) -> Term:
    """Simultaneous capture-avoiding substitution of free occurrences."""
    m = {k: v for k, v in m.items() if k != v}
    if not m:
        return t
    # names that must not be captured by a binder we pass under
    range_names: set[Name] = set()
    for v in m.values():
        range_names |= {v} if isinstance(v, Name) else value_names(v)
    if fresh is None:
        fresh = FreshNames(range_names | free_names(t) | set(m))
    return _subst(t, dict(m), range_names, fresh)


def _under_binders(
    binders: tuple[Name, ...], body: Term, m: Subst, avoid: set[Name],
    fresh: FreshNames,
) -> tuple[tuple[Name, ...], Term]:
    m = {k: v for k, v in m.items() if k not in binders}
    renaming: dict[Name, Name] = {}
    for b in binders:
        if m and any(b in _needed(v) for v in m.values()):
            renaming[b] = fresh.fresh(b.base or "x")
    if renaming:
        body = _subst(body, renaming, set(renaming.values()), fresh)
    binders = tuple(renaming.get(b, b) for b in binders)
    body = _subst(body, m, avoid, fresh) if m else body
    return binders, body


def _needed(v: Name | Value) -> set[Name]:
    return {v} if isinstance(v, Name) else value_names(v)


def _subst(t: Term, m: Subst, avoid: set[Name], fresh: FreshNames) -> Term:
    if not m:
        return t
    match t:
        case Inact():
            return t
        case Par(parts):
            return Par(tuple(_subst(p, m, avoid, fresh) for p in parts))
        case Res(names, body):
            names2, body2 = _under_binders(names, body, m, avoid, fresh)
            return Res(names2, body2)
        case Cond(v, then, els):
            return Cond(
                _subst_value(v, m),
                _subst(then, m, avoid, fresh),
                _subst(els, m, avoid, fresh),
            )
        case PiChoice(summands):
            out = []
            for s in summands:
                match s.prefix:
                    case PiInput(chan, param):
                        (param2,), cont2 = _under_binders(
                            (param,), s.cont, m, avoid, fresh
                        )
                        out.append(
                            PiSummand(PiInput(_subst_chan(chan, m), param2), cont2)
                        )
                    case PiOutput(chan, payload):
                        out.append(PiSummand(
                            PiOutput(_subst_chan(chan, m), _subst_value(payload, m)),
                            _subst(s.cont, m, avoid, fresh),
                        ))
                    case PiTau():
                        out.append(PiSummand(PiTau(), _subst(s.cont, m, avoid, fresh)))
            return PiChoice(tuple(out))
        case PiRep(body):
            return PiRep(_subst(body, m, avoid, fresh))
        case MixChoice(endpoint, branches):
            out = []
            for b in branches:
                if b.polarity == SEND:
                    out.append(MixBranch(
                        b.label, SEND, _subst_value(b.value, m), None,
                        _subst(b.cont, m, avoid, fresh),
                    ))
                else:
                    (param2,), cont2 = _under_binders(
                        (b.param,), b.cont, m, avoid, fresh
                    )
                    out.append(MixBranch(b.label, RECV, None, param2, cont2))
            return MixChoice(_subst_chan(endpoint, m), tuple(out))
        case CmvOut(chan, value, cont):
            return CmvOut(
                _subst_chan(chan, m), _subst_value(value, m),
                _subst(cont, m, avoid, fresh),
            )
        case CmvIn(chan, param, cont):
            (param2,), cont2 = _under_binders((param,), cont, m, avoid, fresh)
            return CmvIn(_subst_chan(chan, m), param2, cont2)
        case CmvSel(chan, label, cont):
            return CmvSel(_subst_chan(chan, m), label, _subst(cont, m, avoid, fresh))
        case CmvBran(chan, arms):
            return CmvBran(
                _subst_chan(chan, m),
                tuple((l, _subst(p, m, avoid, fresh)) for l, p in arms),
            )
    raise TermError(f"not a term: {t!r}")
