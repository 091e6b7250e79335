"""Equational-logic proof trees and their checker.

Six rules: axiom, reflexivity, symmetry, transitivity, congruence and
substitution.  Axiom leaves store an index into the theory's equation list,
so a proof only makes sense against the theory it was built for.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .dsl import parse_term
from .terms import (App, MalformedTermError, Signature, Term, Theory, apply_substitution,
                    check_term, format_term)


@dataclass(frozen=True)
class Axiom:
    index: int


@dataclass(frozen=True)
class Refl:
    term: Term


@dataclass(frozen=True)
class Symm:
    premise: "Proof"


@dataclass(frozen=True)
class Trans:
    first: "Proof"
    second: "Proof"


@dataclass(frozen=True)
class Cong:
    op: str
    premises: Tuple["Proof", ...]


@dataclass(frozen=True)
class Subst:
    premise: "Proof"
    mapping: Tuple[Tuple[str, Term], ...]

    @property
    def substitution(self) -> Dict[str, Term]:
        return dict(self.mapping)


Proof = Union[Axiom, Refl, Symm, Trans, Cong, Subst]


def subst(p: Proof, mapping: Mapping[str, Term]) -> Proof:
    return Subst(p, tuple(sorted(mapping.items())))


def symm(p: Proof) -> Proof:
    if isinstance(p, Symm):
        return p.premise
    if isinstance(p, Refl):
        return p
    return Symm(p)


def trans(*ps: Proof) -> Proof:
    """Left-nested transitivity chain; reflexivity links are dropped."""
    chain = [p for p in ps if not isinstance(p, Refl)]
    if not chain:
        return ps[0]
    out = chain[0]
    for p in chain[1:]:
        out = Trans(out, p)
    return out


@dataclass(frozen=True)
class Judgment:
    lhs: Term
    rhs: Term

    def __repr__(self) -> str:
        return f"{format_term(self.lhs)} = {format_term(self.rhs)}"


class ProofError(ValueError):
    def __init__(self, path: Sequence[int], message: str):
        loc = "/".join(str(i) for i in path) or "root"
        super().__init__(f"at {loc}: {message}")
        self.path = list(path)
        self.message = message


def check_proof(th: Theory, p: Proof) -> Judgment:
    """The judgment ``p`` proves under ``th``; raises :class:`ProofError`
    at the first rule violation."""
    memo: Dict[int, Judgment] = {}
    return _check(th, p, [], memo)


def _check(th: Theory, p: Proof, path: List[int], memo: Dict[int, Judgment]) -> Judgment:
    key = id(p)
    if key in memo:
        return memo[key]
    sig = th.signature
    if isinstance(p, Axiom):
        if not 0 <= p.index < len(th.equations):
            raise ProofError(path, f"axiom index {p.index} out of range (theory has "
                                   f"{len(th.equations)} equations)")
        eq = th.equations[p.index]
        j = Judgment(eq.lhs, eq.rhs)
    elif isinstance(p, Refl):
        _well_formed(p.term, sig, path)
        j = Judgment(p.term, p.term)
    elif isinstance(p, Symm):
        inner = _check(th, p.premise, path + [0], memo)
        j = Judgment(inner.rhs, inner.lhs)
    elif isinstance(p, Trans):
        a = _check(th, p.first, path + [0], memo)
        b = _check(th, p.second, path + [1], memo)
        if a.rhs != b.lhs:
            raise ProofError(path, f"transitivity midpoint mismatch: "
                                   f"{format_term(a.rhs)} vs {format_term(b.lhs)}")
        j = Judgment(a.lhs, b.rhs)
    elif isinstance(p, Cong):
        sym = sig.get(p.op)
        if sym is None:
            raise ProofError(path, f"congruence on unknown symbol {p.op!r}")
        if sym.arity != len(p.premises):
            raise ProofError(path, f"congruence arity mismatch: {p.op} has arity "
                                   f"{sym.arity}, got {len(p.premises)} premise(s)")
        parts = [_check(th, q, path + [i], memo) for i, q in enumerate(p.premises)]
        j = Judgment(App(p.op, tuple(q.lhs for q in parts)),
                     App(p.op, tuple(q.rhs for q in parts)))
    elif isinstance(p, Subst):
        inner = _check(th, p.premise, path + [0], memo)
        f = p.substitution
        for img in f.values():
            _well_formed(img, sig, path)
        j = Judgment(apply_substitution(inner.lhs, f), apply_substitution(inner.rhs, f))
    else:
        raise ProofError(path, f"not a proof node: {p!r}")
    memo[key] = j
    return j


def _well_formed(t: Term, sig: Signature, path: List[int]) -> None:
    try:
        check_term(t, sig)
    except MalformedTermError as exc:
        raise ProofError(path, str(exc)) from None


def proof_size(p: Proof) -> int:
    if isinstance(p, (Axiom, Refl)):
        return 1
    if isinstance(p, (Symm, Subst)):
        return 1 + proof_size(p.premise)
    if isinstance(p, Trans):
        return 1 + proof_size(p.first) + proof_size(p.second)
    return 1 + sum(proof_size(q) for q in p.premises)


def uses_substitution(p: Proof) -> bool:
    if isinstance(p, Subst):
        return True
    if isinstance(p, (Symm,)):
        return uses_substitution(p.premise)
    if isinstance(p, Trans):
        return uses_substitution(p.first) or uses_substitution(p.second)
    if isinstance(p, Cong):
        return any(uses_substitution(q) for q in p.premises)
    return False


# -- JSON ----------------------------------------------------------------------

def proof_to_json(p: Proof) -> Dict[str, Any]:
    if isinstance(p, Axiom):
        return {"rule": "axiom", "children": [], "axiom": p.index}
    if isinstance(p, Refl):
        return {"rule": "reflexivity", "children": [], "term": format_term(p.term)}
    if isinstance(p, Symm):
        return {"rule": "symmetry", "children": [proof_to_json(p.premise)]}
    if isinstance(p, Trans):
        return {"rule": "transitivity",
                "children": [proof_to_json(p.first), proof_to_json(p.second)]}
    if isinstance(p, Cong):
        return {"rule": "congruence", "op": p.op,
                "children": [proof_to_json(q) for q in p.premises]}
    return {"rule": "substitution", "children": [proof_to_json(p.premise)],
            "subst": {k: format_term(t) for k, t in p.mapping}}


def proof_from_json(doc: Dict[str, Any], sig: Signature) -> Proof:
    rule = doc.get("rule")
    kids = doc.get("children", [])
    if rule == "axiom":
        return Axiom(int(doc["axiom"]))
    if rule == "reflexivity":
        return Refl(parse_term(doc["term"], sig))
    if rule == "symmetry":
        return Symm(proof_from_json(kids[0], sig))
    if rule == "transitivity":
        return Trans(proof_from_json(kids[0], sig), proof_from_json(kids[1], sig))
    if rule == "congruence":
        return Cong(doc["op"], tuple(proof_from_json(k, sig) for k in kids))
    if rule == "substitution":
        mapping = {k: parse_term(t, sig) for k, t in doc.get("subst", {}).items()}
        return subst(proof_from_json(kids[0], sig), mapping)
    raise ValueError(f"unknown proof rule {rule!r}")


def axiom_instance(index: int, mapping: Optional[Mapping[str, Term]] = None) -> Proof:
    if not mapping:
        return Axiom(index)
    return subst(Axiom(index), mapping)


# -- a generated corpus of valid proofs -----------------------------------------------

def generate_proofs(th: Theory, count: int, seed: int = 0, max_term_size: int = 3,
                    min_substitutions: int = 5) -> List[Proof]:
    """``count`` distinct valid proofs under ``th``, built by random rule
    applications from axiom instances and reflexivity.  At least
    ``min_substitutions`` of them contain a substitution node."""
    import random
    from .terms import enumerate_terms, variables_of

    rng = random.Random(seed)
    pool_vars = ["x", "y"]
    terms = enumerate_terms(th.signature, pool_vars, max_term_size)
    ops = [s for s in th.signature.symbols if s.arity >= 1]

    def base() -> Proof:
        if th.equations and rng.random() < 0.7:
            i = rng.randrange(len(th.equations))
            eq = th.equations[i]
            vs = sorted(set(variables_of(eq.lhs)) | set(variables_of(eq.rhs)))
            return subst(Axiom(i), {v: rng.choice(terms) for v in vs}) if vs else Axiom(i)
        return Refl(rng.choice(terms))

    def grow(p: Proof, depth: int) -> Proof:
        for _ in range(depth):
            j = check_proof(th, p)
            r = rng.random()
            if r < 0.25:
                p = Symm(p)
            elif r < 0.5 and ops:
                sym = rng.choice(ops)
                k = rng.randrange(sym.arity)
                prem = tuple(p if i == k else Refl(rng.choice(terms)) for i in range(sym.arity))
                p = Cong(sym.name, prem)
            elif r < 0.7:
                p = Subst(p, tuple(sorted({v: rng.choice(terms)
                                           for v in variables_of(j.lhs) + variables_of(j.rhs)}.items())))
            else:
                q = grow(base(), 1)
                qj = check_proof(th, q)
                if qj.lhs == j.rhs:
                    p = Trans(p, q)
                elif qj.rhs == j.rhs:
                    p = Trans(p, Symm(q))
                else:
                    p = Trans(p, Refl(j.rhs))
        return p

    out: List[Proof] = []
    seen = set()
    with_subst = 0
    attempts = 0
    while len(out) < count or with_subst < min_substitutions:
        attempts += 1
        if attempts > 100 * count:
            raise RuntimeError(f"could not generate {count} distinct proofs for {th.name}")
        p = grow(base(), rng.randrange(1, 5))
        if p in seen:
            continue
        has = uses_substitution(p)
        if len(out) >= count and not has:
            continue
        check_proof(th, p)
        seen.add(p)
        out.append(p)
        with_subst += has
    return out
