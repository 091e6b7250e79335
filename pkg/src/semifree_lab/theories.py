"""Built-in algebraic theories and their name resolution (``builtin:<name>``)."""
from __future__ import annotations

from typing import Dict, List, Sequence

from .terms import App, Equation, Signature, Theory, Var, app

u, v, w = Var("u"), Var("v"), Var("w")


def identity_theory() -> Theory:
    return Theory("Identity", Signature(), ())


def exception_theory(labels: Sequence[str]) -> Theory:
    if not labels:
        raise ValueError("exception theory needs at least one label")
    if len(set(labels)) != len(labels):
        raise ValueError("exception labels must be distinct")
    return Theory("Exception", Signature.of(*[(f"c_{k}", 0) for k in labels]), ())


def monoid_theory() -> Theory:
    e = App("e")
    return Theory("Monoid", Signature.of(("e", 0), ("mul", 2)), (
        Equation(app("mul", app("mul", u, v), w), app("mul", u, app("mul", v, w))),
        Equation(app("mul", e, v), v),
        Equation(app("mul", v, e), v),
    ))


def commutative_monoid_theory() -> Theory:
    base = monoid_theory()
    return base.with_equations(
        base.equations + (Equation(app("mul", u, v), app("mul", v, u)),), "CommutativeMonoid")


def semilattice_theory() -> Theory:
    base = commutative_monoid_theory()
    return base.with_equations(
        base.equations + (Equation(app("mul", v, v), v),), "Semilattice")


def state_theory(n: int) -> Theory:
    """Global state over ``n`` states: ``g<i>`` writes state i, ``f`` reads and branches."""
    if n < 1:
        raise ValueError("state theory needs n >= 1")
    vs = [Var(f"v{i}") for i in range(1, n + 1)]
    sig = Signature.of(("f", n), *[(f"g{i}", 1) for i in range(1, n + 1)])
    eqs: List[Equation] = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            eqs.append(Equation(app(f"g{i}", app(f"g{j}", v)), app(f"g{j}", v)))
    for i in range(1, n + 1):
        eqs.append(Equation(app(f"g{i}", App("f", tuple(vs))), app(f"g{i}", vs[i - 1])))
    eqs.append(Equation(App("f", tuple(app(f"g{i}", v) for i in range(1, n + 1))), v))
    return Theory(f"State{n}", sig, tuple(eqs))


def writer_min_theory(n: int) -> Theory:
    """n unary idempotents with ``a<i> a<j> v = a<min(i,j)> v``."""
    if n < 1:
        raise ValueError("writer theory needs n >= 1")
    sig = Signature.of(*[(f"a{i}", 1) for i in range(n)])
    eqs = tuple(
        Equation(app(f"a{i}", app(f"a{j}", v)), app(f"a{min(i, j)}", v))
        for i in range(n) for j in range(n))
    return Theory(f"WriterMin{n}", sig, eqs)


def idempotent_theory(name: str = "a") -> Theory:
    a = name
    return Theory("IdSemifree", Signature.of((a, 1)), (Equation(app(a, app(a, v)), app(a, v)),))


def parse_params(spec: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for part in spec.split(":"):
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"malformed builtin parameter {part!r}")
        k, val = part.split("=", 1)
        out[k] = val
    return out


BUILTIN_NAMES = ("identity", "exception", "list", "monoid", "multiset", "finiteset",
                 "state", "writermin", "idsemifree")


def builtin_theory(name: str) -> Theory:
    """Resolve ``identity``, ``exception:K=k1,k2``, ``list``, ``multiset``,
    ``finiteset``, ``state:n=2``, ``writermin:n=3``, ``idsemifree``."""
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    head, _, rest = name.partition(":")
    params = parse_params(rest)
    if head == "identity":
        return identity_theory()
    if head == "exception":
        labels = params.get("K", "k").split(",")
        return exception_theory([k for k in labels if k])
    if head in ("list", "monoid"):
        return monoid_theory()
    if head == "multiset":
        return commutative_monoid_theory()
    if head == "finiteset":
        return semilattice_theory()
    if head == "state":
        return state_theory(int(params.get("n", "2")))
    if head == "writermin":
        return writer_min_theory(int(params.get("n", "2")))
    if head == "idsemifree":
        return idempotent_theory()
    raise KeyError(f"unknown builtin theory {name!r}")
