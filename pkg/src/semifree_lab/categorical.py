"""Checks on the semifree construction viewed as a functor on monads: the
ideal-monad structure, the comonad ``(ε, δ)``, lifting of monad morphisms,
the ideal-monad algebra correspondence and the failure of pointedness.

Everything is checked elementwise on finite or bounded sets of values.
Naturality is checked against every function between carriers of size at
most :data:`NATURALITY_CARRIERS`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .models import DEFAULT_CAP
from .monads import (Final, FiniteSet, ListMonad, Monad, Multiset, Pure, Semifree, Wrapped,
                     check_laws, is_exhaustive, nested_values, order_key)
from .semialgebras import Cell, StructureMap, map_search

NATURALITY_CARRIERS = 2


def _failure(law: str, element: Any) -> Dict[str, str]:
    return {"law": law, "element": repr(element)}


def _report(name: str, xs: Sequence[Any], bound: Optional[int], exhaustive: bool,
            failures: List[Dict[str, str]], **extra: Any) -> Dict[str, Any]:
    failures.sort(key=lambda f: (f["law"], f["element"]))
    out = {"check": name, "carrier": len(xs), "bound": bound, "exhaustive": exhaustive}
    out.update(extra)
    out["failures"] = failures
    out["passed"] = not failures
    return out


# -- the ideal structure ------------------------------------------------------------

def coerce(m: Monad, w: Any) -> Any:
    """``[η, id] : X + MX → MX``."""
    return m.eta(w.value) if isinstance(w, Pure) else w.value


def m0(m: Monad, v: Any) -> Any:
    """``M Mˢ X → M M X → M X``."""
    return m.mu(m.fmap(lambda w: coerce(m, w), v))


def check_ideal(m: Monad, xs: Sequence[Any], size_bound: Optional[int] = 3) -> Dict[str, Any]:
    """``μˢ = [id, Wrapped∘m0]`` on every (bounded) element of MˢMˢX."""
    s = Semifree(m)
    failures = []
    count = 0
    for V in nested_values(s, xs, 2, size_bound, lazy_last=True):
        count += 1
        cotuple = V.value if isinstance(V, Pure) else Wrapped(m0(m, V.value))
        if s.mu(V) != cotuple:
            failures.append(_failure("ideal", V))
    return _report("ideal", xs, size_bound, is_exhaustive(s, len(xs), 2), failures, checked=count)


# -- monad morphisms ----------------------------------------------------------------

@dataclass(frozen=True)
class MonadMorphism:
    name: str
    source: Monad
    target: Monad
    component: Callable[[Any], Any]

    def __call__(self, v: Any) -> Any:
        return self.component(v)


class MorphismError(ValueError):
    def __init__(self, report: Dict[str, Any]):
        first = report["failures"][0] if report["failures"] else {}
        super().__init__(f"{report['morphism']} is not a monad morphism: {first}")
        self.report = report


def _functions(k: int, n: int) -> List[Callable[[int], int]]:
    return [(lambda t: lambda x: t[x])(t) for t in itertools.product(range(n), repeat=k)]


def check_monad_morphism(sigma: MonadMorphism, xs: Sequence[Any],
                         size_bound: Optional[int] = 3) -> Dict[str, Any]:
    """Unit and multiplication axioms on ``xs``; naturality for every
    function between carriers ``{0..k-1}`` with ``k <= NATURALITY_CARRIERS``."""
    S, T = sigma.source, sigma.target
    failures = []
    for x in xs:
        if sigma(S.eta(x)) != T.eta(x):
            failures.append(_failure("unit", x))
    count = 0
    for V in nested_values(S, xs, 2, size_bound, lazy_last=True):
        count += 1
        lhs = sigma(S.mu(V))
        rhs = T.mu(sigma(S.fmap(sigma, V)))
        if lhs != rhs:
            failures.append(_failure("multiplication", V))
    natural = 0
    for k1, k2 in itertools.product(range(NATURALITY_CARRIERS + 1), repeat=2):
        dom = list(nested_values(S, list(range(k1)), 1, size_bound))
        for f in _functions(k1, k2):
            for v in dom:
                natural += 1
                if sigma(S.fmap(f, v)) != T.fmap(f, sigma(v)):
                    failures.append(_failure(f"naturality:{k1}->{k2}", v))
    return _report("monad-morphism", xs, size_bound, is_exhaustive(S, len(xs), 2), failures,
                   morphism=sigma.name, checked={"SSX": count, "naturality": natural})


def identity_morphism(m: Monad) -> MonadMorphism:
    return MonadMorphism(f"id[{m.name}]", m, m, lambda v: v)


def support_morphism() -> MonadMorphism:
    """Multiset ⇒ FiniteSet."""
    return MonadMorphism("support", Multiset(), FiniteSet(),
                         lambda v: FiniteSet.make(x for x, _ in v))


def forget_order_morphism() -> MonadMorphism:
    """List ⇒ Multiset."""
    return MonadMorphism("forget-order", ListMonad(), Multiset(),
                         lambda v: Multiset.make((x, 1) for x in v))


def compose(sigma: MonadMorphism, tau: MonadMorphism) -> MonadMorphism:
    """``tau ∘ sigma``."""
    return MonadMorphism(f"{tau.name}.{sigma.name}", sigma.source, tau.target,
                         lambda v: tau(sigma(v)))


def _lift(sigma: MonadMorphism) -> MonadMorphism:
    def component(w: Any) -> Any:
        return w if isinstance(w, Pure) else Wrapped(sigma(w.value))
    return MonadMorphism(f"{sigma.name}^s", Semifree(sigma.source), Semifree(sigma.target), component)


def semifree_morphism(sigma: MonadMorphism, xs: Sequence[Any] = (0, 1),
                      size_bound: Optional[int] = 3) -> MonadMorphism:
    """``σˢ = id + σ``.  Both σ and σˢ are checked; a failing σ is refused."""
    report = check_monad_morphism(sigma, xs, size_bound)
    if not report["passed"]:
        raise MorphismError(report)
    lifted = _lift(sigma)
    again = check_monad_morphism(lifted, xs, size_bound)
    if not again["passed"]:
        raise MorphismError(again)
    return lifted


# -- the comonad (ε, δ) -------------------------------------------------------------

def epsilon(m: Monad, w: Any) -> Any:
    """``ε = [η, id] : X + MX → MX``."""
    return coerce(m, w)


def delta(m: Monad, w: Any) -> Any:
    """``δ = id + inr : X + MX → X + (X + MX)``."""
    return w if isinstance(w, Pure) else Wrapped(w)


def epsilon_morphism(m: Monad) -> MonadMorphism:
    return MonadMorphism(f"epsilon[{m.name}]", Semifree(m), m, lambda w: epsilon(m, w))


def delta_morphism(m: Monad) -> MonadMorphism:
    return MonadMorphism(f"delta[{m.name}]", Semifree(m), Semifree(Semifree(m)),
                         lambda w: delta(m, w))


def check_comonad(m: Monad, xs: Sequence[Any], size_bound: Optional[int] = 3) -> Dict[str, Any]:
    s = Semifree(m)
    eps_lift = _lift(epsilon_morphism(m))          # εˢ : Mˢˢ ⇒ Mˢ
    eps_outer = epsilon_morphism(s)                # ε_{Mˢ} : Mˢˢ ⇒ Mˢ
    delta_lift = _lift(delta_morphism(m))          # δˢ : Mˢˢ ⇒ Mˢˢˢ
    delta_outer = delta_morphism(s)                # δ_{Mˢ} : Mˢˢ ⇒ Mˢˢˢ
    failures = []
    values = list(nested_values(s, xs, 1, size_bound))
    for w in values:
        d = delta(m, w)
        if eps_lift(d) != w:
            failures.append(_failure("counit-lifted", w))
        if eps_outer(d) != w:
            failures.append(_failure("counit-outer", w))
        if delta_lift(d) != delta_outer(d):
            failures.append(_failure("coassociativity", w))
        if isinstance(w, Wrapped) and epsilon(m, w) != w.value:
            failures.append(_failure("retraction", w))
    morphisms = {}
    for sigma in (epsilon_morphism(m), delta_morphism(m)):
        rep = check_monad_morphism(sigma, xs, size_bound)
        morphisms[sigma.name] = rep["passed"]
        failures += [dict(f, law=f"{sigma.name}:{f['law']}") for f in rep["failures"]]
    return _report("comonad", xs, size_bound, is_exhaustive(s, len(xs), 2), failures,
                   checked=len(values), morphisms=morphisms)


# -- the ideal-monad algebra correspondence -----------------------------------------

def _em_algebras_of_semifree(m: Monad, k: int, cap: Optional[int]) -> List[Dict[Any, int]]:
    """Every Eilenberg-Moore algebra ``β : X + MX → X`` of Mˢ, by table search."""
    s = Semifree(m)
    cells = sorted(s.values(list(range(k))), key=order_key)
    relations = [(lambda x: lambda look: (Cell(Pure(x)), x))(x) for x in range(k)]
    relations += [(lambda V: lambda look: (Cell(s.fmap(look, V)), Cell(s.mu(V))))(V)
                  for V in s.values(cells)]
    # the unit law fixes the Pure cells, so only the MX part counts towards the cap
    return map_search(cells, k, relations, None if cap is None else cap * k ** k,
                      f"EM-algebra space of {s.name} at carrier {k}")


def _mixed(m: Monad, k: int, size_bound: Optional[int]) -> List[Any]:
    """Elements of ``M(X + MX)`` (bounded when M is infinite)."""
    s = Semifree(m)
    inner = list(nested_values(s, list(range(k)), 1, size_bound))
    return m.values(inner) if m.finite else m.values(inner, size_bound)


def _square(m: Monad, u: Any, a: Callable[[Any], int]) -> Tuple[Any, Any]:
    return m.fmap(lambda w: w.value if isinstance(w, Pure) else a(w.value), u), m0(m, u)


def ideal_square_holds(m: Monad, a: Callable[[Any], int], k: int,
                       size_bound: Optional[int] = 3) -> Optional[Any]:
    """``a ∘ M[id, a] = a ∘ m0`` on ``M(X + MX)``.  Returns a failing element
    or ``None``."""
    for u in _mixed(m, k, size_bound):
        left, right = _square(m, u, a)
        if a(left) != a(right):
            return u
    return None


def square_maps(m: Monad, k: int, cap: Optional[int] = DEFAULT_CAP) -> List[Dict[Any, int]]:
    """Every ``a : MX → X`` satisfying the ideal square, by table search."""
    mx = sorted(m.values(list(range(k))), key=order_key)
    relations = [(lambda u: lambda look: tuple(Cell(t) for t in _square(m, u, look)))(u)
                 for u in _mixed(m, k, None)]
    return map_search(mx, k, relations, cap, f"map space MX -> X of {m.name} at carrier {k}")


def _cotuple(a: Callable[[Any], int]) -> Callable[[Any], int]:
    return lambda w: w.value if isinstance(w, Pure) else a(w.value)


def check_ideal_algebra_correspondence(m: Monad, carrier_size: int,
                                       size_bound: Optional[int] = 3,
                                       cap: Optional[int] = DEFAULT_CAP,
                                       candidates: Optional[Dict[int, List[StructureMap]]] = None
                                       ) -> Dict[str, Any]:
    """EM(Mˢ) on carriers ``1..carrier_size`` are exactly the cotuples
    ``[id, a]`` whose ``a`` satisfies the ideal square.

    For finite M both sides are found by independent table searches and
    compared.  For infinite M the ``candidates`` (bounded structure maps,
    typically from H) are checked in both directions at the bound."""
    failures: List[Dict[str, str]] = []
    rows = []
    for k in range(1, carrier_size + 1):
        xs = list(range(k))
        if m.finite:
            em = _em_algebras_of_semifree(m, k, cap)
            squares = square_maps(m, k, cap)
            from_em = sorted(tuple(sorted(((w.value, v) for w, v in beta.items()
                                           if isinstance(w, Wrapped)), key=lambda p: order_key(p[0])))
                             for beta in em)
            from_sq = sorted(tuple(sorted(t.items(), key=lambda p: order_key(p[0]))) for t in squares)
            if from_em != from_sq:
                failures.append(_failure("correspondence", k))
            rows.append({"carrier": k, "em_algebras": len(em), "square_maps": len(squares)})
        else:
            s = Semifree(m)
            maps = (candidates or {}).get(k, [])
            for alpha in maps:
                beta = _cotuple(alpha)
                bad = ideal_square_holds(m, alpha, k, size_bound)
                if bad is not None:
                    failures.append(_failure("square", bad))
                for V in nested_values(s, xs, 2, size_bound):
                    if beta(s.fmap(beta, V)) != beta(s.mu(V)):
                        failures.append(_failure("em-associativity", V))
                        break
                for x in xs:
                    if beta(Pure(x)) != x:
                        failures.append(_failure("em-unit", x))
            rows.append({"carrier": k, "checked_maps": len(maps)})
    return _report("ideal-algebra-correspondence", list(range(carrier_size)), size_bound,
                   m.finite, failures, per_carrier=rows)


# -- non-pointedness ----------------------------------------------------------------

def nonpointedness_witness() -> Dict[str, Any]:
    """A natural point ``τ : Id ⇒ (−)ˢ`` would give, at the final monad 1,
    components ``τ_X : 1 → X + 1``.  Over the empty carrier the only such
    map is the right injection; naturality along ``∅ → X`` forces the same
    choice everywhere, and on a one-element carrier that breaks the unit
    axiom ``τ ∘ η = ηˢ``."""
    final = Final()
    s = Semifree(final)
    # τ_∅ picks an element of ∅ + 1
    empty_components = s.values([])
    # naturality along the empty map into {x}: τ_{x}(*) = 1ˢ(!)(τ_∅(*))
    forced = [s.fmap(lambda v: v, c) for c in empty_components]
    x = "x"
    tau_eta = forced  # η(x) = * in the final monad, so τ(η x) = τ(*)
    eta_s = s.eta(x)
    violated = bool(forced) and all(w != eta_s for w in tau_eta)
    return {
        "verdict": "no natural point exists" if violated and len(empty_components) == 1
                   else "inconclusive",
        "monad": final.name,
        "empty_carrier_components": [repr(w) for w in empty_components],
        "forced_component": [repr(w) for w in forced],
        "witness_carrier_size": 1,
        "unit_axiom": {"tau_eta": [repr(w) for w in tau_eta], "eta_s": repr(eta_s),
                       "holds": not violated},
        "final_monad_laws": check_laws(final, [x], None)["passed"],
    }
