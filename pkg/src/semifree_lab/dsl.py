"""The ``.theory`` text format and the JSON report envelope.

A theory file is line oriented::

    # comments run to the end of the line
    theory Monoid
    op e : 0
    op mul : 2
    eq mul(mul(u, v), w) = mul(u, mul(v, w))
    eq mul(e, v) = v
    eq mul(v, e) = v
    end

Any identifier that is not a declared operation is a variable.  Unary
operations may also be written in prefix form, so ``a a v`` reads as
``a(a(v))``.  Constants are written bare (``e``) or applied (``e()``).

Reports are JSON objects ``{"format", "kind", "theory", "items", "metadata"}``
with ``format`` fixed to :data:`REPORT_FORMAT`.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from .terms import App, Equation, OpSym, Signature, Term, Theory, Var, format_term

REPORT_FORMAT = "semifree-lab/1"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident | num | punct | end
    text: str
    col: int


def _tokenize(line: str, lineno: int, file: str) -> List[_Tok]:
    toks: List[_Tok] = []
    i = 0
    while i < len(line):
        c = line[i]
        if c in " \t\r":
            i += 1
        elif c == "#":
            break
        elif c in "(),=:":
            toks.append(_Tok("punct", c, i + 1))
            i += 1
        elif c.isdigit():
            j = i
            while j < len(line) and line[j].isdigit():
                j += 1
            toks.append(_Tok("num", line[i:j], i + 1))
            i = j
        else:
            m = _IDENT.match(line, i)
            if not m:
                raise ParseError(f"unexpected character {c!r}", SourceSpan(file, lineno, i + 1))
            toks.append(_Tok("ident", m.group(), i + 1))
            i = m.end()
    toks.append(_Tok("end", "", len(line.rstrip("\r")) + 1))
    return toks


class _TermParser:
    def __init__(self, toks: List[_Tok], sig: Signature, lineno: int, file: str):
        self.toks = toks
        self.pos = 0
        self.sig = sig
        self.lineno = lineno
        self.file = file

    def span(self, tok: Optional[_Tok] = None) -> SourceSpan:
        tok = tok or self.toks[self.pos]
        return SourceSpan(self.file, self.lineno, tok.col)

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok.text != text or tok.kind == "end":
            found = tok.text or "end of line"
            raise ParseError(f"expected {text!r}, found {found!r}", self.span(tok))
        return self.take()

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind != "ident":
            found = tok.text or "end of line"
            raise ParseError(f"expected a term, found {found!r}", self.span(tok))
        self.take()
        sym = self.sig.get(tok.text)
        if sym is None:
            if self.peek().text == "(":
                raise ParseError(f"unknown operation symbol {tok.text!r}", self.span(tok))
            return Var(tok.text)
        if self.peek().text == "(":
            self.take()
            args: List[Term] = []
            if self.peek().text != ")":
                args.append(self.term())
                while self.peek().text == ",":
                    self.take()
                    args.append(self.term())
            self.expect(")")
            if len(args) != sym.arity:
                raise ParseError(
                    f"arity mismatch: {sym.name} expects {sym.arity} argument(s), got {len(args)}",
                    self.span(tok))
            return App(sym.name, tuple(args))
        if sym.arity == 0:
            return App(sym.name)
        if sym.arity == 1 and self.peek().kind == "ident":
            return App(sym.name, (self.term(),))
        raise ParseError(
            f"arity mismatch: {sym.name} expects {sym.arity} argument(s), got 0", self.span(tok))


def parse_term(text: str, sig: Signature, file: str = "<term>") -> Term:
    toks = _tokenize(text, 1, file)
    p = _TermParser(toks, sig, 1, file)
    t = p.term()
    if p.peek().kind != "end":
        raise ParseError(f"trailing input {p.peek().text!r}", p.span())
    return t


def parse_equation(text: str, sig: Signature, file: str = "<equation>") -> Equation:
    toks = _tokenize(text, 1, file)
    p = _TermParser(toks, sig, 1, file)
    lhs = p.term()
    p.expect("=")
    rhs = p.term()
    if p.peek().kind != "end":
        raise ParseError(f"trailing input {p.peek().text!r}", p.span())
    return Equation(lhs, rhs)


def parse_theory(text: str, file: str = "<theory>") -> Theory:
    name: Optional[str] = None
    symbols: List[OpSym] = []
    equations: List[Equation] = []
    finished = False
    last_line = 1
    for lineno, line in enumerate(text.split("\n"), start=1):
        last_line = lineno
        toks = _tokenize(line, lineno, file)
        if toks[0].kind == "end":
            continue
        head = toks[0]
        span = SourceSpan(file, lineno, head.col)
        if finished:
            raise ParseError("content after 'end'", span)
        if head.text == "theory":
            if name is not None:
                raise ParseError("duplicate 'theory' header", span)
            if len(toks) != 3 or toks[1].kind != "ident":
                raise ParseError("expected 'theory <Name>'", span)
            name = toks[1].text
            continue
        if name is None:
            raise ParseError("expected 'theory <Name>' before declarations", span)
        if head.text == "op":
            if (len(toks) != 5 or toks[1].kind != "ident" or toks[2].text != ":"
                    or toks[3].kind != "num"):
                raise ParseError("expected 'op <name> : <arity>'", span)
            op_name = toks[1].text
            if any(s.name == op_name for s in symbols):
                raise ParseError(f"duplicate operation symbol {op_name!r}",
                                 SourceSpan(file, lineno, toks[1].col))
            if equations:
                raise ParseError("operation declared after equations", span)
            symbols.append(OpSym(op_name, int(toks[3].text)))
        elif head.text == "eq":
            p = _TermParser(toks, Signature(tuple(symbols)), lineno, file)
            p.pos = 1
            lhs = p.term()
            p.expect("=")
            rhs = p.term()
            if p.peek().kind != "end":
                raise ParseError(f"trailing input {p.peek().text!r}", p.span())
            equations.append(Equation(lhs, rhs))
        elif head.text == "end":
            if len(toks) != 2:
                raise ParseError("trailing input after 'end'", span)
            finished = True
        else:
            raise ParseError(f"unknown declaration {head.text!r}", span)
    if name is None:
        raise ParseError("missing 'theory <Name>' header", SourceSpan(file, 1, 1))
    if not finished:
        raise ParseError("missing 'end'", SourceSpan(file, last_line, 1))
    return Theory(name, Signature(tuple(symbols)), tuple(equations))


def print_theory(th: Theory) -> str:
    lines = [f"theory {th.name}"]
    lines += [f"op {s.name} : {s.arity}" for s in th.signature.symbols]
    lines += [f"eq {format_term(e.lhs)} = {format_term(e.rhs)}" for e in th.equations]
    lines.append("end")
    return "\n".join(lines) + "\n"


def format_equation(eq: Equation) -> str:
    return f"{format_term(eq.lhs)} = {format_term(eq.rhs)}"


# -- reports -------------------------------------------------------------------

def report(kind: str, theory: Optional[str], items: Sequence[Any],
           metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        "format": REPORT_FORMAT,
        "kind": kind,
        "theory": theory,
        "items": list(items),
        "metadata": dict(metadata or {}),
    }


REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["format", "kind", "theory", "items", "metadata"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "kind": {"type": "string"},
        "theory": {"type": ["string", "null"]},
        "items": {"type": "array"},
        "metadata": {"type": "object"},
    },
    "additionalProperties": False,
}


def dumps(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


def theory_to_json(th: Theory) -> Dict[str, Any]:
    return {
        "name": th.name,
        "signature": [{"name": s.name, "arity": s.arity} for s in th.signature.symbols],
        "equations": [format_equation(e) for e in th.equations],
    }


def theory_from_json(doc: Dict[str, Any]) -> Theory:
    sig = Signature(tuple(OpSym(s["name"], s["arity"]) for s in doc["signature"]))
    eqs = tuple(parse_equation(e, sig) for e in doc["equations"])
    return Theory(doc["name"], sig, eqs)
