"""Semialgebra structure maps and the G/H correspondence with models of the
semifree presentation.

Carriers are ``{0..m-1}``.  A :class:`StructureMap` is a function from monad
values over the carrier to carrier points.  For finite monads it is kept as a
table; for List and Multiset it is backed by an Eˢ-model (the output of
:func:`H_transform`) and evaluated by interpretation.

``G`` reads a Σˢ-algebra off a structure map: ``a := α∘η`` and
``op := α∘⟦op⟧∘ηⁿ``.  ``H`` goes back by interpreting a representative term
of a monad value with every leaf routed through ``⟦a⟧``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .csp import FeasibilityError, Need, Solver, Top, force_equal
from .dsl import format_equation
from .models import DEFAULT_CAP, FiniteAlgebra, enumerate_models, falsifying_assignment
from .monads import Monad, is_exhaustive, nested_values, order_key
from .semifree import SemifreeTheory, semifree_theory
from .terms import Term, Var


@dataclass
class StructureMap:
    monad: Monad
    carrier_size: int
    evaluator: Callable[[Any], int]
    table: Optional[Dict[Any, int]] = field(default=None, compare=False)

    def __call__(self, v: Any) -> int:
        return self.evaluator(v)

    def tabulate(self, values: Iterable[Any]) -> Dict[Any, int]:
        return {v: self.evaluator(v) for v in values}

    @classmethod
    def from_table(cls, monad: Monad, m: int, table: Dict[Any, int]) -> "StructureMap":
        return cls(monad, m, table.__getitem__, dict(table))


class ModelViolation(ValueError):
    """An algebra handed to H does not satisfy Eˢ."""

    def __init__(self, equation: str, assignment: Dict[str, int]):
        super().__init__(f"equation {equation} fails at {assignment}")
        self.equation = equation
        self.assignment = assignment


def carrier(m: int) -> List[int]:
    return list(range(m))


def semifree_of(monad: Monad) -> SemifreeTheory:
    return semifree_theory(monad.theory())


def monad_values(monad: Monad, m: int, bound: Optional[int]) -> List[Any]:
    """MX over ``{0..m-1}``: all of it when finite, else the bounded part."""
    return list(nested_values(monad, carrier(m), 1, bound))


# -- the two transforms --------------------------------------------------------------

def G_transform(monad: Monad, alpha: StructureMap,
                sf: Optional[SemifreeTheory] = None) -> FiniteAlgebra:
    sf = sf or semifree_of(monad)
    m = alpha.carrier_size
    fns: Dict[str, Callable[..., int]] = {}
    for sym in sf.result.signature.symbols:
        if sym.name == sf.a:
            fns[sym.name] = lambda x: alpha(monad.eta(x))
        else:
            fns[sym.name] = (lambda name: lambda *xs: alpha(monad.op(name, [monad.eta(x) for x in xs])))(sym.name)
    return FiniteAlgebra.from_functions(m, sf.result.signature, fns)


def H_transform(monad: Monad, alg: FiniteAlgebra,
                sf: Optional[SemifreeTheory] = None) -> StructureMap:
    """Refuses (raises :class:`ModelViolation`) unless ``alg`` satisfies Eˢ."""
    sf = sf or semifree_of(monad)
    for eq in sf.result.equations:
        env = falsifying_assignment(alg, eq)
        if env is not None:
            raise ModelViolation(format_equation(eq), env)
    a_table = alg.table(sf.a)

    def evaluate(v: Any) -> int:
        env: Dict[str, int] = {}

        def leaf(x: Any) -> Term:
            name = f"_x{x}"
            env[name] = a_table[x]
            return Var(name)
        return alg.eval(monad.reify(v, leaf), env)

    alpha = StructureMap(monad, alg.size, evaluate)
    if monad.finite:
        alpha.table = alpha.tabulate(monad.values(carrier(alg.size)))
        alpha.evaluator = alpha.table.__getitem__
    return alpha


# -- semialgebra laws ---------------------------------------------------------------

def check_semialgebra(monad: Monad, alpha: StructureMap, size_bound: Optional[int] = 3,
                      stop_at_first: bool = False) -> Dict[str, Any]:
    """Associativity ``α∘Mα = α∘μ``, idempotency of ``α∘η`` with
    ``α∘η∘α = α``, and ``α∘⟦op⟧ = α∘⟦op⟧∘ηⁿ∘αⁿ`` for every operation."""
    m = alpha.carrier_size
    xs = carrier(m)
    failures: List[Dict[str, str]] = []

    def fail(law: str, element: Any) -> bool:
        failures.append({"law": law, "element": repr(element)})
        return stop_at_first

    checked = {"MMX": 0, "MX": 0, "op_args": 0}
    stop = False
    for vv in nested_values(monad, xs, 2, size_bound, lazy_last=True):
        checked["MMX"] += 1
        if alpha(monad.fmap(alpha, vv)) != alpha(monad.mu(vv)):
            if fail("associativity", vv):
                stop = True
                break
    mx = monad_values(monad, m, size_bound)
    if not stop:
        for x in xs:
            e = alpha(monad.eta(x))
            if alpha(monad.eta(e)) != e:
                if fail("unit-idempotent", x):
                    stop = True
                    break
    if not stop:
        for v in mx:
            checked["MX"] += 1
            if alpha(monad.eta(alpha(v))) != alpha(v):
                if fail("eta-alpha", v):
                    stop = True
                    break
    if not stop:
        for sym in monad.theory().signature.symbols:
            for args in itertools.product(mx, repeat=sym.arity):
                checked["op_args"] += 1
                lhs = alpha(monad.op(sym.name, list(args)))
                rhs = alpha(monad.op(sym.name, [monad.eta(alpha(t)) for t in args]))
                if lhs != rhs:
                    if fail(f"op-identity:{sym.name}", args):
                        stop = True
                        break
            if stop:
                break
    failures.sort(key=lambda f: (f["law"], f["element"]))
    return {"monad": monad.name, "carrier": m, "bound": size_bound,
            "exhaustive": is_exhaustive(monad, m, 2), "checked": checked,
            "failures": failures, "passed": not failures}


def is_semialgebra(monad: Monad, alpha: StructureMap, size_bound: Optional[int] = 3) -> bool:
    return check_semialgebra(monad, alpha, size_bound, stop_at_first=True)["passed"]


@dataclass(frozen=True)
class Cell:
    """Reference to the unknown value of a map at ``key``."""
    key: Any


Relation = Callable[[Callable[[Any], int]], Tuple[Any, Any]]


def map_search(domain: Sequence[Any], m: int, relations: Sequence[Relation],
               cap: Optional[int] = DEFAULT_CAP, what: str = "map space") -> List[Dict[Any, int]]:
    """Every map ``domain → {0..m-1}`` satisfying all relations, sorted by
    table.  A relation receives ``look`` (the map being built; it blocks on
    unknown entries) and returns two sides, each a :class:`Cell` or a point."""
    space = m ** len(domain)
    if cap is not None and space > cap:
        raise FeasibilityError(space, cap, what)
    index = {v: i for i, v in enumerate(domain)}

    def constraint(rel: Relation):
        def check(vals):
            def look(v: Any) -> int:
                r = vals[index[v]]
                if r is None:
                    raise Need(index[v])
                return r

            def side(x: Any):
                if isinstance(x, Cell):
                    i = index[x.key]
                    return Top(i) if vals[i] is None else vals[i]
                return x
            left, right = rel(look)
            return force_equal(side(left), side(right))
        return check

    sols = Solver(len(domain), m, [constraint(r) for r in relations]).solutions()
    return [dict(zip(domain, sol)) for sol in sorted(sols)]


def brute_force_semialgebras(monad: Monad, m: int, cap: Optional[int] = DEFAULT_CAP
                             ) -> List[StructureMap]:
    """Every associative ``α : MX → X`` for a finite monad, found by a table
    search that knows nothing about terms or models.  Sorted by table."""
    if not monad.finite:
        raise ValueError(f"{monad.name}: MX is infinite, no table search")
    mx = sorted(monad.values(carrier(m)), key=order_key)
    relations = [(lambda vv: lambda look: (Cell(monad.fmap(look, vv)), Cell(monad.mu(vv))))(vv)
                 for vv in monad.values(mx)]
    tables = map_search(mx, m, relations, cap,
                        f"structure-map space of {monad.name} at carrier {m}")
    return [StructureMap.from_table(monad, m, t) for t in tables]


# -- homomorphisms ------------------------------------------------------------------

def is_algebra_homomorphism(f: Sequence[int], A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    for sym in A.signature.symbols:
        for args in itertools.product(range(A.size), repeat=sym.arity):
            if f[A.apply(sym.name, args)] != B.apply(sym.name, [f[x] for x in args]):
                return False
    return True


def is_semialgebra_homomorphism(monad: Monad, f: Sequence[int], alpha: StructureMap,
                                beta: StructureMap, size_bound: Optional[int] = 3) -> bool:
    """``f∘α = β∘Mf`` on every (bounded) element of MX."""
    return all(f[alpha(v)] == beta(monad.fmap(lambda x: f[x], v))
               for v in monad_values(monad, alpha.carrier_size, size_bound))


# -- the round trip -----------------------------------------------------------------

def _same_map(monad: Monad, m: int, f: StructureMap, g: StructureMap,
              size_bound: Optional[int]) -> bool:
    return all(f(v) == g(v) for v in monad_values(monad, m, size_bound))


def verify_iso(monad: Monad, carrier_size: int, size_bound: Optional[int] = 3,
               cap: Optional[int] = DEFAULT_CAP, homomorphisms: bool = True) -> Dict[str, Any]:
    """G and H are mutually inverse on carriers ``1..carrier_size``, the
    model and semialgebra counts agree (finite monads: against the table
    search), and homomorphisms correspond."""
    sf = semifree_of(monad)
    failures: List[Dict[str, Any]] = []
    per_size: List[Dict[str, Any]] = []
    pairs: Dict[int, List[Tuple[FiniteAlgebra, StructureMap]]] = {}
    for m in range(1, carrier_size + 1):
        models = enumerate_models(sf.result, m, cap)
        row: Dict[str, Any] = {"carrier": m, "models": len(models)}
        maps = []
        for A in models:
            alpha = H_transform(monad, A, sf)
            maps.append(alpha)
            if G_transform(monad, alpha, sf) != A:
                failures.append({"check": "G(H(A)) = A", "carrier": m, "model": A.to_json()})
            report = check_semialgebra(monad, alpha, size_bound, stop_at_first=True)
            if not report["passed"]:
                failures.append({"check": "H(A) is a semialgebra", "carrier": m,
                                 "model": A.to_json(), "failure": report["failures"][0]})
            again = H_transform(monad, G_transform(monad, alpha, sf), sf)
            if not _same_map(monad, m, alpha, again, size_bound):
                failures.append({"check": "H(G(H(A))) = H(A)", "carrier": m, "model": A.to_json()})
        pairs[m] = list(zip(models, maps))
        if monad.finite:
            brute = brute_force_semialgebras(monad, m, cap)
            row["semialgebras"] = len(brute)
            if len(brute) != len(models):
                failures.append({"check": "counts", "carrier": m,
                                 "models": len(models), "semialgebras": len(brute)})
            from_models = sorted(tuple(sorted(a.table.items(), key=lambda kv: order_key(kv[0])))
                                 for a in maps)
            for beta in brute:
                back = H_transform(monad, G_transform(monad, beta, sf), sf)
                if not _same_map(monad, m, beta, back, size_bound):
                    failures.append({"check": "H(G(alpha)) = alpha", "carrier": m,
                                     "alpha": repr(beta.table)})
            from_brute = sorted(tuple(sorted(b.table.items(), key=lambda kv: order_key(kv[0])))
                                for b in brute)
            if from_brute != from_models:
                failures.append({"check": "H image = brute-force semialgebras", "carrier": m})
        per_size.append(row)
    hom_checked = 0
    if homomorphisms:
        sizes = sorted(pairs)
        for m1, m2 in itertools.product(sizes, repeat=2):
            for (A, alpha), (B, beta) in itertools.product(pairs[m1], pairs[m2]):
                for f in itertools.product(range(m2), repeat=m1):
                    hom_checked += 1
                    if is_algebra_homomorphism(f, A, B) != \
                            is_semialgebra_homomorphism(monad, f, alpha, beta, size_bound):
                        failures.append({"check": "homomorphisms", "map": list(f),
                                         "from": A.to_json(), "to": B.to_json()})
    return {"monad": monad.name, "carrier_sizes": list(range(1, carrier_size + 1)),
            "bound": size_bound, "per_carrier": per_size,
            "homomorphisms_checked": hom_checked, "failures": failures,
            "passed": not failures}
