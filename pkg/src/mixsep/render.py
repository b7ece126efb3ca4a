"""Pretty-printer turning terms back into the surface syntax.

Machine-generated names (canonical binders, freshly tagged endpoints) carry
internal markers that the grammar cannot spell, so rendering first picks a
readable, collision-free display identifier for every name in the term.
"""

from __future__ import annotations

from .terms import (
    AndV, CmvBran, CmvIn, CmvOut, CmvSel, Cond, Inact, Label, Lit, MixChoice,
    Name, NotV, OrV, Par, PiChoice, PiInput, PiOutput, PiRep, PiSummand,
    PiTau, Res, Term, UnitV, Value, subterms, value_names,
)
from .parser import KEYWORDS

_POOL = "abcdefghijklmnopqrstuvwxyz"


def _plain(base: str) -> bool:
    if not base or base in KEYWORDS or base == "0":
        return False
    return all(c.islower() or c.isdigit() or c == "_" for c in base) and (
        base[0].islower() or base.isdigit()
    )


def _collect_names(t: Term) -> list[Name]:
    seen: dict[Name, None] = {}

    def visit_value(v: Value) -> None:
        for n in value_names(v):
            seen.setdefault(n, None)

    for s in subterms(t):
        match s:
            case Res(names=ns):
                for n in ns:
                    seen.setdefault(n, None)
            case PiChoice(summands=ss):
                for sm in ss:
                    match sm.prefix:
                        case PiOutput(chan=c, payload=p):
                            seen.setdefault(c, None)
                            visit_value(p)
                        case PiInput(chan=c, param=p):
                            seen.setdefault(c, None)
                            seen.setdefault(p, None)
            case MixChoice(endpoint=e, branches=bs):
                seen.setdefault(e, None)
                for b in bs:
                    if b.value is not None:
                        visit_value(b.value)
                    if b.param is not None:
                        seen.setdefault(b.param, None)
            case CmvOut(chan=c, value=v):
                seen.setdefault(c, None)
                visit_value(v)
            case CmvIn(chan=c, param=p):
                seen.setdefault(c, None)
                seen.setdefault(p, None)
            case CmvSel(chan=c) | CmvBran(chan=c):
                seen.setdefault(c, None)
            case Cond(value=v):
                visit_value(v)
    return list(seen)


def display_names(t: Term) -> dict[Name, str]:
    """Assign each name in the term a unique surface identifier."""
    names = _collect_names(t)
    taken = {n.base for n in names if n.tag is None and _plain(n.base)}
    out: dict[Name, str] = {}

    def fresh_from(candidate: str) -> str:
        if _plain(candidate) and candidate not in out.values() and (
            candidate not in taken or candidate == ""
        ):
            return candidate
        base = candidate if _plain(candidate) else "n"
        k = 1
        while True:
            c = f"{base}_{k}"
            if c not in taken and c not in out.values():
                return c
            k += 1

    pool = iter(
        p + q for p in [""] + list(_POOL) for q in _POOL
        if p + q not in taken and not (p + q) in KEYWORDS
    )
    for n in names:
        if n.tag is None and _plain(n.base) and n.base not in out.values():
            out[n] = n.base
        elif n.base in (".b", ".u"):
            out[n] = next(pool)
        elif n.tag is not None:
            out[n] = fresh_from(f"{n.base}_{n.tag}" if _plain(n.base) else f"n_{n.tag}")
        else:
            out[n] = fresh_from(n.base)
    return out


def label_text(l: Label) -> str:
    match l.tag:
        case None:
            return l.base
        case "!":
            return f"{l.base}_snd"
        case "?":
            return f"{l.base}_rcv"
        case _:
            return f"{l.base}{l.tag}"


def _value_text(v: Value, disp: dict[Name, str], prec: int = 0) -> str:
    # prec levels: 0 or-context, 1 and-context, 2 atom
    match v:
        case Lit(value=f):
            return "true" if f else "false"
        case UnitV():
            return "()"
        case Name():
            return disp.get(v, v.base)
        case NotV(operand=o):
            return f"not {_value_text(o, disp, 2)}"
        case AndV(left=a, right=b):
            s = f"{_value_text(a, disp, 1)} and {_value_text(b, disp, 1)}"
            return f"({s})" if prec >= 2 else s
        case OrV(left=a, right=b):
            s = f"{_value_text(a, disp, 0)} or {_value_text(b, disp, 0)}"
            return f"({s})" if prec >= 1 else s
    raise TypeError(f"not a value: {v!r}")


def render(t: Term, disp: dict[Name, str] | None = None) -> str:
    """Render a term in the surface grammar of its calculus."""
    if disp is None:
        disp = display_names(t)
    return _proc(t, disp)


def _nm(n: Name, disp: dict[Name, str]) -> str:
    return disp.get(n, n.base)


def _proc(t: Term, disp: dict[Name, str]) -> str:
    match t:
        case Par(parts=ps):
            return " | ".join(_par_part(p, disp) for p in ps)
        case _:
            return _par_part(t, disp)


def _par_part(t: Term, disp: dict[Name, str]) -> str:
    match t:
        case Par():
            return f"({_proc(t, disp)})"
        case PiChoice(summands=ss):
            return " + ".join(_summand(s, disp) for s in ss)
        case _:
            return _unary(t, disp)


def _unary(t: Term, disp: dict[Name, str]) -> str:
    match t:
        case Inact():
            return "0"
        case Par() :
            return f"({_proc(t, disp)})"
        case Res(names=ns, body=b):
            bound = " ".join(_nm(n, disp) for n in ns)
            return f"new {bound} in {_proc(b, disp)}"
        case PiRep(body=b):
            return f"rep {_unary(b, disp)}"
        case Cond(value=v, then=a, els=b):
            return (f"if {_value_text(v, disp)} then {_proc(a, disp)} "
                    f"else {_unary(b, disp)}")
        case PiChoice(summands=ss):
            if len(ss) == 1:
                return _summand(ss[0], disp)
            return f"({' + '.join(_summand(s, disp) for s in ss)})"
        case MixChoice(endpoint=e, branches=bs):
            inner = " + ".join(_branch(b, disp) for b in bs)
            return f"{_nm(e, disp)} ( {inner} )"
        case CmvOut(chan=c, value=v, cont=k):
            return f"{_nm(c, disp)}!{_value_text(v, disp, 2)}{_dot(k, disp)}"
        case CmvIn(chan=c, param=p, cont=k):
            return f"{_nm(c, disp)}?({_nm(p, disp)}){_dot(k, disp)}"
        case CmvSel(chan=c, label=l, cont=k):
            return f"{_nm(c, disp)} sel {label_text(l)}{_dot(k, disp)}"
        case CmvBran(chan=c, arms=arms):
            inner = ", ".join(
                f"{label_text(l)}: {_proc(p, disp)}" for l, p in arms
            )
            return f"{_nm(c, disp)} case {{ {inner} }}"
    raise TypeError(f"cannot render {t!r}")


def _summand(s: PiSummand, disp: dict[Name, str]) -> str:
    match s.prefix:
        case PiTau():
            head = "tau"
        case PiOutput(chan=c, payload=p):
            if isinstance(p, UnitV):
                head = f"{_nm(c, disp)}!"
            else:
                head = f"{_nm(c, disp)}!({_value_text(p, disp)})"
        case PiInput(chan=c, param=p):
            head = f"{_nm(c, disp)}?({_nm(p, disp)})"
        case _:
            raise TypeError(f"bad prefix {s.prefix!r}")
    return head + _dot(s.cont, disp)


def _branch(b, disp: dict[Name, str]) -> str:
    if b.polarity == "!":
        head = f"{label_text(b.label)}!{_value_text(b.value, disp, 2)}"
    else:
        head = f"{label_text(b.label)}?({_nm(b.param, disp)})"
    return head + _dot(b.cont, disp)


def _dot(cont: Term, disp: dict[Name, str]) -> str:
    if isinstance(cont, Inact):
        return ""
    match cont:
        case MixChoice() | CmvOut() | CmvIn() | CmvSel() | CmvBran():
            return "." + _unary(cont, disp)
        case PiChoice(summands=ss) if len(ss) == 1:
            return "." + _unary(cont, disp)
        case _:
            return f".({_proc(cont, disp)})"
