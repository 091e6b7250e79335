"""Finite algebras: satisfaction, exhaustive model enumeration and
countermodel search.

Tables are stored per operation symbol in signature order, indexed by the
argument tuple read as a base-``size`` numeral (so table order is the
lexicographic order of argument tuples).  Models are enumerated with the
solver in :mod:`csp` and returned in lexicographic order of their
concatenated tables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .audit import note_countermodel
from .csp import FeasibilityError, Need, Solver, Top, force_equal
from .terms import Equation, Signature, Term, Theory, Var, variables_of

DEFAULT_CAP = 10 ** 7


@dataclass(frozen=True)
class FiniteAlgebra:
    size: int
    signature: Signature
    tables: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("carrier size must be at least 1")
        if len(self.tables) != len(self.signature.symbols):
            raise ValueError("one table per operation symbol is required")
        for sym, tab in zip(self.signature.symbols, self.tables):
            if len(tab) != self.size ** sym.arity:
                raise ValueError(f"table for {sym.name} has {len(tab)} entries, "
                                 f"expected {self.size ** sym.arity}")
            if any(not 0 <= x < self.size for x in tab):
                raise ValueError(f"table for {sym.name} leaves the carrier")

    @classmethod
    def from_functions(cls, size: int, signature: Signature, fns: Dict[str, Any]) -> "FiniteAlgebra":
        tables = []
        for sym in signature.symbols:
            f = fns[sym.name]
            tables.append(tuple(int(f(*args)) for args in
                                itertools.product(range(size), repeat=sym.arity)))
        return cls(size, signature, tuple(tables))

    def table(self, name: str) -> Tuple[int, ...]:
        for sym, tab in zip(self.signature.symbols, self.tables):
            if sym.name == name:
                return tab
        raise KeyError(name)

    def apply(self, name: str, args: Sequence[int]) -> int:
        return self.table(name)[index_of(args, self.size)]

    def eval(self, t: Term, env: Dict[str, int]) -> int:
        if isinstance(t, Var):
            return env[t.name]
        return self.apply(t.op, [self.eval(a, env) for a in t.args])

    def restrict(self, signature: Signature) -> "FiniteAlgebra":
        return FiniteAlgebra(self.size, signature,
                             tuple(self.table(s.name) for s in signature.symbols))

    def to_json(self) -> Dict[str, Any]:
        return {"carrier_size": self.size,
                "tables": {s.name: list(t) for s, t in zip(self.signature.symbols, self.tables)}}


def index_of(args: Sequence[int], m: int) -> int:
    i = 0
    for a in args:
        i = i * m + a
    return i


def interpret(alg: FiniteAlgebra, t: Term, env: Dict[str, int]) -> int:
    return alg.eval(t, env)


def falsifying_assignment(alg: FiniteAlgebra, eq: Equation) -> Optional[Dict[str, int]]:
    vs = sorted(set(variables_of(eq.lhs)) | set(variables_of(eq.rhs)))
    for vals in itertools.product(range(alg.size), repeat=len(vs)):
        env = dict(zip(vs, vals))
        if alg.eval(eq.lhs, env) != alg.eval(eq.rhs, env):
            return env
    return None


def satisfies(alg: FiniteAlgebra, eq: Equation) -> bool:
    """Exhaustive over all assignments of the equation's variables."""
    return falsifying_assignment(alg, eq) is None


def is_model(alg: FiniteAlgebra, th: Theory) -> bool:
    return all(satisfies(alg, eq) for eq in th.equations)


def first_violation(alg: FiniteAlgebra, th: Theory) -> Optional[Tuple[int, Dict[str, int]]]:
    for i, eq in enumerate(th.equations):
        env = falsifying_assignment(alg, eq)
        if env is not None:
            return i, env
    return None


def search_space(sig: Signature, m: int) -> int:
    return m ** sum(m ** s.arity for s in sig.symbols)


class _Layout:
    def __init__(self, sig: Signature, m: int):
        self.m = m
        self.offsets: Dict[str, int] = {}
        n = 0
        for s in sig.symbols:
            self.offsets[s.name] = n
            n += m ** s.arity
        self.ncells = n

    def ev(self, t: Term, env: Dict[str, int], vals: List[Optional[int]], top: bool):
        if isinstance(t, Var):
            return env[t.name]
        i = 0
        for a in t.args:
            i = i * self.m + self.ev(a, env, vals, False)
        cell = self.offsets[t.op] + i
        v = vals[cell]
        if v is None:
            if top:
                return Top(cell)
            raise Need(cell)
        return v


def _equation_constraints(layout: _Layout, equations: Sequence[Equation]):
    out = []
    for eq in equations:
        vs = sorted(set(variables_of(eq.lhs)) | set(variables_of(eq.rhs)))
        for vals in itertools.product(range(layout.m), repeat=len(vs)):
            env = dict(zip(vs, vals))

            def check(cells, lhs=eq.lhs, rhs=eq.rhs, env=env):
                return force_equal(layout.ev(lhs, env, cells, True),
                                   layout.ev(rhs, env, cells, True))
            out.append(check)
    return out


def _split(sig: Signature, m: int, flat: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    tables = []
    pos = 0
    for s in sig.symbols:
        k = m ** s.arity
        tables.append(tuple(flat[pos:pos + k]))
        pos += k
    return tuple(tables)


def iter_models(th: Theory, m: int, cap: Optional[int] = DEFAULT_CAP) -> Iterator[FiniteAlgebra]:
    """Models in solver order (not necessarily canonical)."""
    if m < 1:
        raise ValueError("carrier size must be at least 1")
    space = search_space(th.signature, m)
    if cap is not None and space > cap:
        raise FeasibilityError(space, cap, f"table space of {th.name} at carrier {m}")
    layout = _Layout(th.signature, m)
    solver = Solver(layout.ncells, m, _equation_constraints(layout, th.equations))
    for flat in solver.solutions():
        yield FiniteAlgebra(m, th.signature, _split(th.signature, m, flat))


def enumerate_models(th: Theory, m: int, cap: Optional[int] = DEFAULT_CAP) -> List[FiniteAlgebra]:
    """All models with carrier ``{0..m-1}``, in canonical table order.

    Raises :class:`FeasibilityError` when the raw table space exceeds ``cap``
    (pass ``cap=None`` to lift the guard)."""
    models = list(iter_models(th, m, cap))
    models.sort(key=lambda a: a.tables)
    return models


def count_models(th: Theory, m: int, cap: Optional[int] = DEFAULT_CAP) -> int:
    return sum(1 for _ in iter_models(th, m, cap))


def find_countermodel(th: Theory, s: Term, t: Term, max_carrier: int,
                      cap: Optional[int] = DEFAULT_CAP
                      ) -> Optional[Tuple[FiniteAlgebra, Dict[str, int]]]:
    """Least model (carrier size first, then table order) of ``th`` in which
    ``s = t`` fails, with the least falsifying assignment.  Carrier sizes
    whose table space exceeds ``cap`` are skipped."""
    if max_carrier < 1:
        raise ValueError("max_carrier must be at least 1")
    eq = Equation(s, t)
    if s == t:
        return None
    for m in range(1, max_carrier + 1):
        try:
            models = enumerate_models(th, m, cap)
        except FeasibilityError:
            break
        for alg in models:
            env = falsifying_assignment(alg, eq)
            if env is not None:
                note_countermodel(th, s, t)
                return alg, env
    return None
