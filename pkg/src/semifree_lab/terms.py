"""First-order terms, signatures, equations and theories."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union


class MalformedTermError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class OpSym:
    name: str
    arity: int

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("operation symbol needs a name")
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: Tuple["Term", ...] = ()

    def __repr__(self) -> str:
        return format_term(self)


Term = Union[Var, App]
Substitution = Mapping[str, Term]


def app(op: str, *args: Term) -> App:
    return App(op, tuple(args))


@dataclass(frozen=True)
class Signature:
    symbols: Tuple[OpSym, ...] = ()

    def __post_init__(self) -> None:
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate operation symbols: {', '.join(dup)}")

    @classmethod
    def of(cls, *pairs: Tuple[str, int]) -> "Signature":
        return cls(tuple(OpSym(n, a) for n, a in pairs))

    def __contains__(self, name: object) -> bool:
        return any(s.name == name for s in self.symbols)

    def __iter__(self) -> Iterator[OpSym]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def arity(self, name: str) -> int:
        for s in self.symbols:
            if s.name == name:
                return s.arity
        raise KeyError(name)

    def get(self, name: str) -> Optional[OpSym]:
        for s in self.symbols:
            if s.name == name:
                return s
        return None

    @property
    def names(self) -> List[str]:
        return [s.name for s in self.symbols]

    def extend(self, *syms: OpSym) -> "Signature":
        return Signature(self.symbols + tuple(syms))

    def without(self, name: str) -> "Signature":
        return Signature(tuple(s for s in self.symbols if s.name != name))


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __repr__(self) -> str:
        return f"{format_term(self.lhs)} = {format_term(self.rhs)}"

    def flipped(self) -> "Equation":
        return Equation(self.rhs, self.lhs)

    def variables(self) -> List[str]:
        return _ordered_union(variables_of(self.lhs), variables_of(self.rhs))


@dataclass(frozen=True)
class Theory:
    name: str
    signature: Signature
    equations: Tuple[Equation, ...] = field(default=())

    def with_equations(self, equations: Iterable[Equation], name: Optional[str] = None) -> "Theory":
        return Theory(name or self.name, self.signature, tuple(equations))


# -- structural operations ---------------------------------------------------

def depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    if not t.args:
        return 1
    return 1 + max(depth(a) for a in t.args)


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def is_var(t: Term) -> bool:
    return isinstance(t, Var)


def variables_of(t: Term) -> List[str]:
    """Variable names of ``t`` in left-to-right first-occurrence order."""
    out: List[str] = []
    seen = set()

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            if u.name not in seen:
                seen.add(u.name)
                out.append(u.name)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return out


def _ordered_union(*lists: Iterable[str]) -> List[str]:
    out: List[str] = []
    for xs in lists:
        for x in xs:
            if x not in out:
                out.append(x)
    return out


def symbols_of(t: Term) -> List[Tuple[str, int]]:
    out: List[Tuple[str, int]] = []

    def walk(u: Term) -> None:
        if isinstance(u, App):
            key = (u.op, len(u.args))
            if key not in out:
                out.append(key)
            for a in u.args:
                walk(a)

    walk(t)
    return out


def apply_substitution(t: Term, f: Substitution, sig: Optional[Signature] = None) -> Term:
    """Simultaneous substitution; variables outside ``f`` are left alone."""
    if sig is not None:
        for image in f.values():
            check_term(image, sig)
    return _subst(t, f)


def _subst(t: Term, f: Substitution) -> Term:
    if isinstance(t, Var):
        return f.get(t.name, t)
    if not t.args:
        return t
    return App(t.op, tuple(_subst(a, f) for a in t.args))


def compose_substitutions(f: Substitution, g: Substitution) -> Dict[str, Term]:
    """The substitution h with t[h] = t[f][g]."""
    h = {v: _subst(img, g) for v, img in f.items()}
    for v, img in g.items():
        h.setdefault(v, img)
    return h


def replace_symbol(t: Term, op: str, body: Term, param: str) -> Term:
    """Replace every unary ``op(s)`` in ``t`` by ``body[param := s]``."""
    if isinstance(t, Var):
        return t
    args = tuple(replace_symbol(a, op, body, param) for a in t.args)
    if t.op == op:
        return _subst(body, {param: args[0]})
    return App(t.op, args)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def check_term(t: Term, sig: Signature) -> None:
    if isinstance(t, Var):
        return
    sym = sig.get(t.op)
    if sym is None:
        raise MalformedTermError(f"unknown operation symbol {t.op!r}")
    if sym.arity != len(t.args):
        raise MalformedTermError(
            f"{t.op} expects {sym.arity} argument(s), got {len(t.args)}")
    for a in t.args:
        check_term(a, sig)


def validate_theory(th: Theory) -> List[str]:
    """Every invariant violation of ``th``, each with its location. Empty when valid."""
    problems: List[str] = []
    names = [s.name for s in th.signature.symbols]
    for n in sorted(set(names)):
        if names.count(n) > 1:
            problems.append(f"signature: duplicate symbol {n!r}")
    arities = {s.name: s.arity for s in th.signature.symbols}
    for i, eq in enumerate(th.equations):
        for side, t in (("lhs", eq.lhs), ("rhs", eq.rhs)):
            for op, n in symbols_of(t):
                if op not in arities:
                    problems.append(f"equation {i} {side}: unknown symbol {op!r}")
                elif arities[op] != n:
                    problems.append(
                        f"equation {i} {side}: {op} applied to {n} argument(s), arity is {arities[op]}")
    return problems


# -- canonical order -----------------------------------------------------------

def term_key(t: Term) -> tuple:
    """Total order on terms: depth, then symbol name, then arguments."""
    if isinstance(t, Var):
        return (0, 0, t.name)
    return (depth(t), 1, t.op, tuple(term_key(a) for a in t.args))


def sort_terms(ts: Iterable[Term]) -> List[Term]:
    return sorted(ts, key=term_key)


# -- printing ------------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.op
    return f"{t.op}({', '.join(format_term(a) for a in t.args)})"


# -- enumeration ---------------------------------------------------------------

def enumerate_terms(sig: Signature, var_names: Iterable[str], max_size: int) -> List[Term]:
    """All terms over ``sig`` and the given variables with size <= max_size,
    ordered by size and then canonically."""
    by_size: Dict[int, List[Term]] = {1: [Var(v) for v in var_names]}
    for s in sig.symbols:
        if s.arity == 0:
            by_size[1].append(App(s.name))
    for n in range(2, max_size + 1):
        level: List[Term] = []
        for s in sig.symbols:
            if s.arity == 0:
                continue
            for parts in _compositions(n - 1, s.arity):
                pools = [by_size.get(p, []) for p in parts]
                for args in _product(pools):
                    level.append(App(s.name, args))
        by_size[n] = level
    out: List[Term] = []
    for n in range(1, max_size + 1):
        out.extend(sort_terms(by_size.get(n, [])))
    return out


def _compositions(total: int, k: int) -> Iterator[Tuple[int, ...]]:
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _product(pools: List[List[Term]]) -> Iterator[Tuple[Term, ...]]:
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for tail in _product(pools[1:]):
            yield (head,) + tail


def evaluate(t: Term, interp: Callable[[str, tuple], object], env: Mapping[str, object]) -> object:
    if isinstance(t, Var):
        return env[t.name]
    return interp(t.op, tuple(evaluate(a, interp, env) for a in t.args))
