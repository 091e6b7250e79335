"""Built-in finitary monads with canonical element encodings.

Each monad knows its presenting theory and interprets that theory's
operations on ``MX``; evaluating a term this way is the normaliser.  Values
are plain hashable Python data so that equality of monad elements is
structural equality.

Encodings:

* Identity: the element itself
* Exception: ``Left(x)`` or ``Raise(k)``
* List: a tuple
* Multiset: a tuple of ``(element, multiplicity)`` pairs, key-sorted
* FiniteSet: a sorted tuple without repeats
* State(n): a tuple of ``n`` pairs ``(next_state, element)``; entry ``i - 1``
  is the outcome when started in state ``i``
* WriterMin(n): a pair ``(k, element)`` with ``k`` in ``0..n-1`` or ``INF``
* the semifree monad over M: ``Pure(x)`` or ``Wrapped(m)``
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .closure import Budget, saturate
from .terms import (App, Term, Theory, Var, apply_substitution, enumerate_terms, format_term,
                    size, term_key)
from . import theories

INF = float("inf")

Weight = Callable[[Any], int]


def order_key(v: Any) -> tuple:
    """Total order on every value the built-in monads produce."""
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, (int, float)):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    if isinstance(v, tuple):
        return (2, tuple(order_key(x) for x in v))
    key = getattr(v, "_key", None)
    if key is None:
        raise TypeError(f"no canonical order for {v!r}")
    return key()


def _unit_weight(_: Any) -> int:
    return 1


@dataclass(frozen=True)
class Left:
    value: Any

    def _key(self) -> tuple:
        return (3, order_key(self.value))


@dataclass(frozen=True)
class Raise:
    label: str

    def _key(self) -> tuple:
        return (4, self.label)


@dataclass(frozen=True)
class Pure:
    value: Any

    def _key(self) -> tuple:
        return (5, order_key(self.value))


@dataclass(frozen=True)
class Wrapped:
    value: Any

    def _key(self) -> tuple:
        return (6, order_key(self.value))


class Monad:
    name = "monad"
    finite = True  # MX finite whenever X is

    def eta(self, x: Any) -> Any:
        raise NotImplementedError

    def mu(self, vv: Any) -> Any:
        raise NotImplementedError

    def fmap(self, f: Callable[[Any], Any], v: Any) -> Any:
        raise NotImplementedError

    def theory(self) -> Theory:
        raise NotImplementedError

    def op(self, name: str, args: Sequence[Any]) -> Any:
        """Interpretation of a theory operation on MX (the free algebra)."""
        raise KeyError(name)

    def reify(self, v: Any, leaf: Callable[[Any], Term]) -> Term:
        """A canonical representative term of ``v``."""
        raise NotImplementedError

    def values(self, xs: Sequence[Any], bound: Optional[int] = None,
               weight: Weight = _unit_weight) -> List[Any]:
        """All elements of MX over ``xs``; for infinite MX only those of
        weight at most ``bound`` (see :meth:`weight`)."""
        raise NotImplementedError

    def iter_values(self, xs: Sequence[Any]) -> Iterable[Any]:
        """Lazy exhaustive enumeration of MX for finite monads."""
        return iter(self.values(xs))

    def weight(self, v: Any, weight: Weight = _unit_weight) -> int:
        return 1

    def support(self, v: Any) -> List[Any]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items(), key=str))))


class Identity(Monad):
    name = "identity"

    def eta(self, x):
        return x

    def mu(self, vv):
        return vv

    def fmap(self, f, v):
        return f(v)

    def theory(self):
        return theories.identity_theory()

    def reify(self, v, leaf):
        return leaf(v)

    def values(self, xs, bound=None, weight=_unit_weight):
        return list(xs)

    def weight(self, v, weight=_unit_weight):
        return weight(v)

    def support(self, v):
        return [v]


class Exception_(Monad):
    def __init__(self, labels: Sequence[str] = ("k",)):
        if not labels or len(set(labels)) != len(labels):
            raise ValueError("exception labels must be non-empty and distinct")
        self.labels = tuple(labels)

    @property
    def name(self):
        return "exception:K=" + ",".join(self.labels)

    def eta(self, x):
        return Left(x)

    def mu(self, vv):
        return vv.value if isinstance(vv, Left) else vv

    def fmap(self, f, v):
        return Left(f(v.value)) if isinstance(v, Left) else v

    def theory(self):
        return theories.exception_theory(self.labels)

    def op(self, name, args):
        if name.startswith("c_") and name[2:] in self.labels and not args:
            return Raise(name[2:])
        raise KeyError(name)

    def reify(self, v, leaf):
        return leaf(v.value) if isinstance(v, Left) else App(f"c_{v.label}")

    def values(self, xs, bound=None, weight=_unit_weight):
        return [Left(x) for x in xs] + [Raise(k) for k in self.labels]

    def weight(self, v, weight=_unit_weight):
        return weight(v.value) if isinstance(v, Left) else 1

    def support(self, v):
        return [v.value] if isinstance(v, Left) else []


def _product(xs: Sequence[Any], ys: Sequence[Any]) -> tuple:
    return tuple(xs) + tuple(ys)


class ListMonad(Monad):
    name = "list"
    finite = False

    def eta(self, x):
        return (x,)

    def mu(self, vv):
        return tuple(x for inner in vv for x in inner)

    def fmap(self, f, v):
        return tuple(f(x) for x in v)

    def theory(self):
        return theories.monoid_theory()

    def op(self, name, args):
        if name == "e" and not args:
            return ()
        if name == "mul" and len(args) == 2:
            return _product(args[0], args[1])
        raise KeyError(name)

    def reify(self, v, leaf):
        return _fold_product([leaf(x) for x in v])

    def values(self, xs, bound=3, weight=_unit_weight):
        return _bounded_sequences(xs, bound, weight, lambda seq: tuple(seq), ordered=True)

    def weight(self, v, weight=_unit_weight):
        return max(1, sum(weight(x) for x in v))

    def support(self, v):
        return list(v)


def _fold_product(leaves: List[Term]) -> Term:
    if not leaves:
        return App("e")
    out = leaves[-1]
    for t in reversed(leaves[:-1]):
        out = App("mul", (t, out))
    return out


def _bounded_sequences(xs: Sequence[Any], bound: Optional[int], weight: Weight,
                       build: Callable[[List[Any]], Any], ordered: bool,
                       repeats: bool = True) -> List[Any]:
    """Containers whose entries' weights sum to at most ``bound`` (an empty
    container weighs 1).  Unordered containers are generated as
    non-decreasing index sequences."""
    if bound is None:
        raise ValueError("an infinite monad needs a size bound")
    ws = [weight(x) for x in xs]
    out: List[Any] = [build([])]
    seen = {out[0]}

    def grow(prefix: List[int], used: int) -> None:
        start = 0 if ordered else (prefix[-1] + (0 if repeats else 1) if prefix else 0)
        for i in range(start, len(xs)):
            if used + ws[i] > bound:
                continue
            nxt = prefix + [i]
            v = build([xs[j] for j in nxt])
            if v not in seen:
                seen.add(v)
                out.append(v)
            grow(nxt, used + ws[i])

    grow([], 0)
    return out


class Multiset(Monad):
    name = "multiset"
    finite = False

    @staticmethod
    def make(pairs: Iterable[Tuple[Any, int]]) -> tuple:
        acc: Dict[Any, int] = {}
        for x, n in pairs:
            if n:
                acc[x] = acc.get(x, 0) + n
        return tuple(sorted(((x, n) for x, n in acc.items() if n), key=lambda p: order_key(p[0])))

    def eta(self, x):
        return ((x, 1),)

    def mu(self, vv):
        return self.make((x, n * m) for inner, n in vv for x, m in inner)

    def fmap(self, f, v):
        return self.make((f(x), n) for x, n in v)

    def theory(self):
        return theories.commutative_monoid_theory()

    def op(self, name, args):
        if name == "e" and not args:
            return ()
        if name == "mul" and len(args) == 2:
            return self.make(list(args[0]) + list(args[1]))
        raise KeyError(name)

    def reify(self, v, leaf):
        return _fold_product([leaf(x) for x, n in v for _ in range(n)])

    def values(self, xs, bound=3, weight=_unit_weight):
        return _bounded_sequences(xs, bound, weight,
                                  lambda seq: self.make((x, 1) for x in seq), ordered=False)

    def weight(self, v, weight=_unit_weight):
        return max(1, sum(weight(x) * n for x, n in v))

    def support(self, v):
        return [x for x, _ in v]


class FiniteSet(Monad):
    name = "finiteset"

    @staticmethod
    def make(xs: Iterable[Any]) -> tuple:
        return tuple(sorted(set(xs), key=order_key))

    def eta(self, x):
        return (x,)

    def mu(self, vv):
        return self.make(x for inner in vv for x in inner)

    def fmap(self, f, v):
        return self.make(f(x) for x in v)

    def theory(self):
        return theories.semilattice_theory()

    def op(self, name, args):
        if name == "e" and not args:
            return ()
        if name == "mul" and len(args) == 2:
            return self.make(list(args[0]) + list(args[1]))
        raise KeyError(name)

    def reify(self, v, leaf):
        return _fold_product([leaf(x) for x in v])

    def values(self, xs, bound=None, weight=_unit_weight):
        xs = self.make(xs)
        out = []
        for r in range(len(xs) + 1):
            if bound is not None and r > bound and r > 0:
                break
            out.extend(combo for combo in itertools.combinations(xs, r))
        return out

    def weight(self, v, weight=_unit_weight):
        return max(1, sum(weight(x) for x in v))

    def support(self, v):
        return list(v)


class State(Monad):
    """Global state over states ``1..n``: ``g<i>`` writes, ``f`` reads."""

    def __init__(self, n: int = 2):
        if n < 1:
            raise ValueError("state monad needs n >= 1")
        self.n = n

    @property
    def name(self):
        return f"state:n={self.n}"

    def eta(self, x):
        return tuple((i, x) for i in range(1, self.n + 1))

    def mu(self, vv):
        out = []
        for i in range(self.n):
            j, inner = vv[i]
            out.append(inner[j - 1])
        return tuple(out)

    def fmap(self, f, v):
        return tuple((j, f(x)) for j, x in v)

    def theory(self):
        return theories.state_theory(self.n)

    def op(self, name, args):
        if name == "f" and len(args) == self.n:
            return tuple(args[i][i] for i in range(self.n))
        if name.startswith("g") and len(args) == 1:
            j = int(name[1:])
            if 1 <= j <= self.n:
                return tuple(args[0][j - 1] for _ in range(self.n))
        raise KeyError(name)

    def reify(self, v, leaf):
        return App("f", tuple(App(f"g{j}", (leaf(x),)) for j, x in v))

    def values(self, xs, bound=None, weight=_unit_weight):
        return list(self.iter_values(xs))

    def iter_values(self, xs):
        cells = [(j, x) for j in range(1, self.n + 1) for x in xs]
        return itertools.product(cells, repeat=self.n)

    def weight(self, v, weight=_unit_weight):
        return max(weight(x) for _, x in v)

    def support(self, v):
        return [x for _, x in v]


class WriterMin(Monad):
    """Writer over the monoid ``({0..n-1, INF}, min, INF)``."""

    def __init__(self, n: int = 2):
        if n < 1:
            raise ValueError("writer monad needs n >= 1")
        self.n = n

    @property
    def name(self):
        return f"writermin:n={self.n}"

    @property
    def levels(self) -> List[Any]:
        return list(range(self.n)) + [INF]

    def eta(self, x):
        return (INF, x)

    def mu(self, vv):
        k, (j, x) = vv
        return (min(k, j), x)

    def fmap(self, f, v):
        return (v[0], f(v[1]))

    def theory(self):
        return theories.writer_min_theory(self.n)

    def op(self, name, args):
        if name.startswith("a") and len(args) == 1:
            i = int(name[1:])
            if 0 <= i < self.n:
                k, x = args[0]
                return (min(i, k), x)
        raise KeyError(name)

    def reify(self, v, leaf):
        k, x = v
        return leaf(x) if k == INF else App(f"a{k}", (leaf(x),))

    def values(self, xs, bound=None, weight=_unit_weight):
        return [(k, x) for k in self.levels for x in xs]

    def weight(self, v, weight=_unit_weight):
        return weight(v[1])

    def support(self, v):
        return [v[1]]


class Final(Monad):
    """The terminal monad: every MX is a single point."""
    name = "final"
    POINT = "*"

    def eta(self, x):
        return self.POINT

    def mu(self, vv):
        return self.POINT

    def fmap(self, f, v):
        return self.POINT

    def values(self, xs, bound=None, weight=_unit_weight):
        return [self.POINT]

    def support(self, v):
        return []


class Semifree(Monad):
    """X + MX with unit ``Pure`` and multiplication ``[id, Wrapped . mu . M[eta, id]]``."""

    def __init__(self, base: Monad):
        self.base = base

    @property
    def name(self):
        return f"semifree({self.base.name})"

    @property
    def finite(self):
        return self.base.finite

    def eta(self, x):
        return Pure(x)

    def coerce(self, w: Any) -> Any:
        """The cotuple [eta, id] : X + MX -> MX."""
        return self.base.eta(w.value) if isinstance(w, Pure) else w.value

    def mu(self, vv):
        if isinstance(vv, Pure):
            return vv.value
        return Wrapped(self.base.mu(self.base.fmap(self.coerce, vv.value)))

    def fmap(self, f, v):
        if isinstance(v, Pure):
            return Pure(f(v.value))
        return Wrapped(self.base.fmap(f, v.value))

    def values(self, xs, bound=None, weight=_unit_weight):
        inner = self.base.values(xs, bound, weight)
        return [Pure(x) for x in xs] + [Wrapped(v) for v in inner]

    def iter_values(self, xs):
        yield from (Pure(x) for x in xs)
        yield from (Wrapped(v) for v in self.base.iter_values(xs))

    def weight(self, v, weight=_unit_weight):
        if isinstance(v, Pure):
            return weight(v.value)
        return self.base.weight(v.value, weight)

    def support(self, v):
        return [v.value] if isinstance(v, Pure) else self.base.support(v.value)


# -- module-level API -------------------------------------------------------------

def monad_by_name(name: str) -> Monad:
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    head, _, rest = name.partition(":")
    params = theories.parse_params(rest)
    if head == "identity":
        return Identity()
    if head == "exception":
        return Exception_([k for k in params.get("K", "k").split(",") if k])
    if head in ("list", "monoid"):
        return ListMonad()
    if head == "multiset":
        return Multiset()
    if head == "finiteset":
        return FiniteSet()
    if head == "state":
        return State(int(params.get("n", "2")))
    if head == "writermin":
        return WriterMin(int(params.get("n", "2")))
    raise KeyError(f"no built-in monad named {name!r}")


def eta(m: Monad, x: Any) -> Any:
    return m.eta(x)


def mu(m: Monad, vv: Any) -> Any:
    return m.mu(vv)


def fmap(m: Monad, f: Callable[[Any], Any], v: Any) -> Any:
    return m.fmap(f, v)


def semifree_eta(x: Any) -> Pure:
    return Pure(x)


def semifree_mu(m: Monad, vv: Any) -> Any:
    return Semifree(m).mu(vv)


class SymbolMismatch(ValueError):
    pass


def normalize(m: Monad, t: Term, theory: Optional[Theory] = None) -> Any:
    """Evaluate ``t`` in the free algebra MX over its variable names."""
    theory = theory or m.theory()
    sig = theory.signature

    def go(u: Term) -> Any:
        if isinstance(u, Var):
            return m.eta(u.name)
        sym = sig.get(u.op)
        if sym is None or sym.arity != len(u.args):
            raise SymbolMismatch(f"{u.op}/{len(u.args)} is not an operation of {theory.name}")
        return m.op(u.op, [go(a) for a in u.args])

    return go(t)


def evaluate_semifree_term(m: Monad, t: Term, a_name: str = "a",
                           env: Optional[Dict[str, Any]] = None) -> Any:
    """Evaluate a term over the semifree signature in X + MX.

    Variables denote ``Pure`` elements (their names, unless ``env`` maps
    them); ``a`` wraps; every other operation acts in MX on coerced arguments.
    """
    sf = Semifree(m)
    sig = m.theory().signature

    def go(u: Term) -> Any:
        if isinstance(u, Var):
            return Pure(env[u.name] if env is not None else u.name)
        args = [go(x) for x in u.args]
        if u.op == a_name and len(args) == 1:
            return Wrapped(sf.coerce(args[0]))
        sym = sig.get(u.op)
        if sym is None or sym.arity != len(args):
            raise SymbolMismatch(f"{u.op}/{len(args)} is not in the semifree signature")
        return Wrapped(m.op(u.op, [sf.coerce(x) for x in args]))

    return go(t)


def semifree_closure(m: Monad, xs: Sequence[str], a_name: str = "a",
                     max_depth: int = 50) -> Dict[Any, Term]:
    """Distinct values of semifree-signature terms over ``xs``, grown depth by
    depth until no new value appears.  Maps each value to a witness term."""
    sig = m.theory().signature
    ops = [(a_name, 1)] + [(s.name, s.arity) for s in sig.symbols]
    found: Dict[Any, Term] = {}
    for x in xs:
        found.setdefault(evaluate_semifree_term(m, Var(x), a_name), Var(x))
    for _ in range(max_depth):
        witnesses = list(found.values())
        new = {}
        for op, n in ops:
            for args in itertools.product(witnesses, repeat=n):
                t = App(op, tuple(args))
                val = evaluate_semifree_term(m, t, a_name)
                if val not in found and val not in new:
                    new[val] = t
        if not new:
            break
        found.update(new)
    return found


# -- law checking --------------------------------------------------------------------

EXHAUSTIVE_CAP = 10 ** 7


def cardinality(m: Monad, n: int) -> Optional[int]:
    """|MX| for |X| = n, or None when MX is infinite."""
    if isinstance(m, Semifree):
        inner = cardinality(m.base, n)
        return None if inner is None else n + inner
    if not m.finite:
        return None
    if isinstance(m, Identity):
        return n
    if isinstance(m, Exception_):
        return n + len(m.labels)
    if isinstance(m, FiniteSet):
        return 2 ** n
    if isinstance(m, State):
        return (m.n * n) ** m.n
    if isinstance(m, WriterMin):
        return (m.n + 1) * n
    if isinstance(m, Final):
        return 1
    return None


def nested_cardinality(m: Monad, n: int, level: int) -> Optional[int]:
    for _ in range(level):
        nxt = cardinality(m, n)
        if nxt is None or nxt > 10 ** 12:
            return None
        n = nxt
    return n


def nested_values(m: Monad, xs: Sequence[Any], level: int, bound: Optional[int],
                  lazy_last: bool = False) -> Iterable[Any]:
    """Elements of M^level X.  Exhaustive when that set has at most
    EXHAUSTIVE_CAP elements; otherwise those of total weight <= bound."""
    total = nested_cardinality(m, len(xs), level)
    if total is not None and total <= EXHAUSTIVE_CAP:
        vals: List[Any] = list(xs)
        for i in range(level):
            if lazy_last and i == level - 1:
                return m.iter_values(vals)
            vals = m.values(vals)
        return vals
    if bound is None:
        raise ValueError(f"{m.name}: M^{level}X is too large to enumerate without a bound")
    vals = list(xs)
    weights: Dict[Any, int] = {x: 1 for x in xs}
    for _ in range(level):
        w = weights.get
        nxt = m.values(vals, bound, lambda v: w(v, 1))
        weights = {v: m.weight(v, lambda u: w(u, 1)) for v in nxt}
        vals = nxt
    return vals


def is_exhaustive(m: Monad, n: int, level: int) -> bool:
    total = nested_cardinality(m, n, level)
    return total is not None and total <= EXHAUSTIVE_CAP


def check_laws(m: Monad, xs: Sequence[Any], bound: Optional[int] = 3) -> Dict[str, Any]:
    """Unit laws on MX and associativity on MMMX, elementwise."""
    failures: List[Dict[str, str]] = []
    mx = list(nested_values(m, xs, 1, bound))
    for v in mx:
        if m.mu(m.eta(v)) != v:
            failures.append({"law": "left-unit", "element": repr(v)})
        if m.mu(m.fmap(m.eta, v)) != v:
            failures.append({"law": "right-unit", "element": repr(v)})
    count = 0
    # inner values of MMMX repeat a lot; multiplication is a pure function
    cache: Dict[Any, Any] = {}

    def mu_(v: Any) -> Any:
        r = cache.get(v)
        if r is None:
            r = cache[v] = m.mu(v)
        return r
    for V in nested_values(m, xs, 3, bound, lazy_last=True):
        count += 1
        if mu_(m.mu(V)) != m.mu(m.fmap(mu_, V)):
            failures.append({"law": "associativity", "element": repr(V)})
    failures.sort(key=lambda f: (f["law"], f["element"]))
    return {"monad": m.name, "carrier": len(xs), "bound": bound,
            "checked": {"MX": len(mx), "MMMX": count},
            "exhaustive": is_exhaustive(m, len(xs), 3),
            "failures": failures, "passed": not failures}


def check_monad_laws(m: Monad, xs: Sequence[Any], size_bound: Optional[int] = 3) -> Dict[str, Any]:
    """Laws for (eta, mu) and for the semifree structure on X + MX."""
    base = check_laws(m, xs, size_bound)
    semi = check_laws(Semifree(m), xs, size_bound)
    return {"monad": base, "semifree": semi, "passed": base["passed"] and semi["passed"]}


# -- bounded free algebra for arbitrary theories --------------------------------------

@dataclass
class FreeGenericStructure:
    """Congruence classes of the terms of size <= ``bound`` over ``xs``.

    This under-approximates the free algebra: two class ids can denote
    E-equal terms whose identification needs terms larger than the bound.
    ``op`` and ``mu`` return ``None`` when the result leaves the universe.
    """
    theory: Theory
    xs: Tuple[str, ...]
    bound: int
    classes: List[Tuple[Term, ...]]
    saturated: bool
    _index: Dict[Term, int]

    def representative(self, cls: int) -> Term:
        return self.classes[cls][0]

    def class_of(self, t: Term) -> Optional[int]:
        return self._index.get(t)

    def eta(self, x: str) -> int:
        return self._index[Var(x)]

    def op(self, name: str, args: Sequence[int]) -> Optional[int]:
        return self.class_of(App(name, tuple(self.representative(c) for c in args)))

    def mu(self, t: Term, env: Dict[str, int]) -> Optional[int]:
        """Flatten a term whose variables stand for classes."""
        return self.class_of(apply_substitution(t, {k: self.representative(c) for k, c in env.items()}))

    def report(self) -> Dict[str, Any]:
        return {"theory": self.theory.name, "vars": list(self.xs), "bound": self.bound,
                "saturated": self.saturated, "under_approximation": True,
                "classes": [[format_term(t) for t in ts] for ts in self.classes]}


def free_algebra(th: Theory, xs: Sequence[str], bound: int,
                 max_rounds: int = 64, max_nodes: int = 200000) -> FreeGenericStructure:
    universe = enumerate_terms(th.signature, list(xs), bound)
    budget = Budget(max_size=bound, max_nodes=max_nodes, max_rounds=max_rounds)
    cc, stats = saturate(th, universe, budget)
    groups: Dict[int, List[Term]] = {}
    for t in universe:
        groups.setdefault(cc.find(cc.ids[t]), []).append(t)
    # representative = least member by size, then canonical order
    classes = sorted((tuple(sorted(ts, key=_term_order)) for ts in groups.values()),
                     key=lambda ts: _term_order(ts[0]))
    index = {t: i for i, ts in enumerate(classes) for t in ts}
    return FreeGenericStructure(th, tuple(xs), bound, classes, stats.saturated, index)


def _term_order(t: Term) -> tuple:
    return (size(t), term_key(t))
