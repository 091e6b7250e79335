"""Acceptance criteria 1-10.

Each criterion is a function returning ``(passed, detail)``.  Under pytest
every criterion is one test and the PASS/FAIL lines are printed in the
terminal summary; run this file directly to print them without pytest.
Every proof search and countermodel search in the module happens while the
soundness recorder is active, which criterion 10 then inspects.
"""
from __future__ import annotations

import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import golden, simplified  # noqa: E402
from semifree_lab.audit import Recorder, recording  # noqa: E402
from semifree_lab.categorical import (check_comonad, check_ideal,  # noqa: E402
                                      check_ideal_algebra_correspondence, forget_order_morphism,
                                      nonpointedness_witness, semifree_morphism,
                                      support_morphism)
from semifree_lab.closure import Budget  # noqa: E402
from semifree_lab.dsl import parse_term  # noqa: E402
from semifree_lab.models import enumerate_models, satisfies  # noqa: E402
from semifree_lab.monads import Semifree, check_monad_laws, monad_by_name, semifree_closure  # noqa: E402
from semifree_lab.proofs import check_proof, generate_proofs, uses_substitution  # noqa: E402
from semifree_lab.semialgebras import H_transform, check_semialgebra, semifree_of, verify_iso  # noqa: E402
from semifree_lab.semifree import (Equivalent, iterate_semifree, lift_proof,  # noqa: E402
                                   presentations_equivalent, semifree_theory)
from semifree_lab.terms import Equation, Term, Theory, Var, App  # noqa: E402
from semifree_lab.theories import builtin_theory, identity_theory  # noqa: E402

Result = Tuple[bool, str]

BUILTINS = ["identity", "exception:K=k", "exception:K=k1,k2", "list", "multiset", "finiteset",
            "state:n=2", "writermin:n=2", "writermin:n=3"]
FAMILIES = ["Idempotency", "FrontAbsorption", "InsideAbsorption", "LiftedAxiom"]
PROOF_BUDGET = Budget(max_size=8)


def _canonical_vars(eq: Equation) -> Equation:
    """Rename variables to v0, v1, ... in order of first occurrence."""
    names: Dict[str, str] = {}

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return Var(names.setdefault(t.name, f"v{len(names)}"))
        return App(t.op, tuple(go(a) for a in t.args))
    lhs = go(eq.lhs)
    return Equation(lhs, go(eq.rhs))


def _checked_equivalence(t1: Theory, t2: Theory, renaming=None) -> Result:
    v = presentations_equivalent(t1, t2, PROOF_BUDGET, renaming=renaming)
    if not isinstance(v, Equivalent):
        return False, f"{v.verdict}: {getattr(v, 'unproved', '')}"
    from semifree_lab.semifree import rename_theory
    t2r = rename_theory(t2, renaming or {})
    t2r = Theory(t2r.name, t1.signature, t2r.equations)
    for src, dst, proofs in ((t1, t2r, v.forward), (t2r, t1, v.backward)):
        for eq, p in zip(dst.equations, proofs):
            j = check_proof(src, p)
            if (j.lhs, j.rhs) != (eq.lhs, eq.rhs):
                return False, f"proof of {eq} re-checks to {j}"
    return True, f"Equivalent ({len(v.forward)}+{len(v.backward)} checked proofs)"


# -- the criteria ----------------------------------------------------------------------

def criterion_1() -> Result:
    for name in BUILTINS:
        th = builtin_theory(name)
        sf = semifree_theory(th)
        n_pos = sum(1 for s in th.signature if s.arity >= 1)
        want = 1 + len(th.signature) + n_pos + len(th.equations)
        fams = [p.family for p in sf.provenance]
        if len(sf.result.equations) != want:
            return False, f"{name}: {len(sf.result.equations)} equations, expected {want}"
        if fams != sorted(fams, key=FAMILIES.index) or \
                [fams.count(f) for f in FAMILIES] != [1, len(th.signature), n_pos, len(th.equations)]:
            return False, f"{name}: provenance families {fams}"
    sf = semifree_theory(builtin_theory("exception:K=k"))
    sig = sf.result.signature
    # the exception example: {a a v = a v} together with {a c_k = c_k | k in K}
    expected = [Equation(parse_term("a a v", sig), parse_term("a v", sig)),
                Equation(parse_term("a c_k", sig), parse_term("c_k", sig))]
    got = sorted(map(_canonical_vars, sf.result.equations), key=repr)
    if got != sorted(map(_canonical_vars, expected), key=repr):
        return False, f"exception K={{k}} gave {list(sf.result.equations)}"
    return True, f"{len(BUILTINS)} built-ins, exception K={{k}} matches"


def criterion_2() -> Result:
    details = []
    for name, stem in [("list", "list"), ("multiset", "multiset"), ("finiteset", "finiteset"),
                       ("state:n=2", "state2")]:
        ok, msg = _checked_equivalence(simplified(name).theory, golden(stem))
        if not ok:
            return False, f"{name}: {msg}"
        details.append(name)
    return True, "Equivalent at size 8: " + ", ".join(details)


def criterion_3() -> Result:
    it2 = iterate_semifree(identity_theory(), 2)
    ok, msg = _checked_equivalence(it2, golden("idsemifree2"))
    if not ok:
        return False, f"iterate 2: {msg}"
    it3 = iterate_semifree(identity_theory(), 3)
    # iteration names a, b, c; a is the innermost and absorbs the others
    ok, msg = _checked_equivalence(it3, golden("writermin3"), {"a0": "a", "a1": "b", "a2": "c"})
    if not ok:
        return False, f"iterate 3: {msg}"
    return True, "iterate 2 and iterate 3 Equivalent"


ISO_MONADS = ["identity", "exception:K=k", "finiteset", "state:n=2", "writermin:n=2"]


def criterion_4() -> Result:
    counts = {}
    for name in ISO_MONADS:
        # State at carrier 3 has 3^18 raw tables; the solver handles it but
        # the default cap would refuse, so the cap is lifted there
        cap = None if name.startswith("state") else 10 ** 7
        r = verify_iso(monad_by_name(name), 3, 3, cap=cap)
        if not r["passed"]:
            return False, f"{name}: {r['failures'][:2]}"
        for row in r["per_carrier"]:
            if row["models"] != row["semialgebras"]:
                return False, f"{name} carrier {row['carrier']}: {row}"
        counts[name] = [row["models"] for row in r["per_carrier"]]
    if counts["identity"][1] != 3 or counts["exception:K=k"][1] != 4:
        return False, f"reference values differ: {counts}"
    return True, "models = semialgebras per carrier 1..3: " + \
        "; ".join(f"{k} {v}" for k, v in counts.items())


def criterion_5() -> Result:
    out = []
    for name in ("list", "multiset"):
        monad = monad_by_name(name)
        sf = semifree_of(monad)
        models = enumerate_models(sf.result, 2)
        for A in models:
            rep = check_semialgebra(monad, H_transform(monad, A, sf), 3)
            if not rep["passed"]:
                return False, f"{name}: {rep['failures'][:2]}"
        out.append(f"{name} {len(models)} models")
    return True, "all H-maps pass at |X| = 2, bound 3: " + ", ".join(out)


def criterion_6() -> Result:
    got = {}
    for name, expected in [("exception:K=k", 5), ("finiteset", 6), ("state:n=2", 18)]:
        m = monad_by_name(name)
        xs = ["x", "y"]
        values = set(semifree_closure(m, xs))
        oracle = set(Semifree(m).values(xs))
        if values != oracle or len(values) != expected:
            return False, f"{name}: {len(values)} values, oracle {len(oracle)}, expected {expected}"
        got[name] = len(values)
    return True, ", ".join(f"{k} {v}" for k, v in got.items())


LIFT_THEORIES = ["identity", "exception:K=k", "list", "multiset", "finiteset", "state:n=2",
                 "writermin:n=2"]


def criterion_7() -> Result:
    total = 0
    for name in LIFT_THEORIES:
        th = builtin_theory(name)
        sf = semifree_theory(th)
        corpus = generate_proofs(th, 25, seed=11)
        n_subst = sum(uses_substitution(p) for p in corpus)
        if len(corpus) < 20 or n_subst < 5:
            return False, f"{name}: corpus {len(corpus)} with {n_subst} substitutions"
        for p in corpus:
            j = check_proof(th, p)
            lj = check_proof(sf.result, lift_proof(sf, p))
            if (lj.lhs, lj.rhs) != (sf.wrap(j.lhs), sf.wrap(j.rhs)):
                return False, f"{name}: lifted {lj} for {j}"
        total += len(corpus)
    return True, f"{total} lifted proofs checked across {len(LIFT_THEORIES)} theories"


def criterion_8() -> Result:
    checked = 0
    bounded = []
    for name in ["identity", "exception:K=k", "finiteset", "state:n=2", "writermin:n=2"]:
        for k in (1, 2):
            # the weight bound only applies where a level cannot be listed,
            # which is the semifree FiniteSet at |X| = 2 (about 2^70 elements)
            r = check_monad_laws(monad_by_name(name), list(range(k)), 3)
            if not r["passed"]:
                return False, f"{name} |X|={k}: {r['monad']['failures'][:1]} {r['semifree']['failures'][:1]}"
            if not r["monad"]["exhaustive"]:
                return False, f"{name} |X|={k}: base monad not checked exhaustively"
            if not r["semifree"]["exhaustive"]:
                bounded.append(f"semifree {name} |X|={k}")
            checked += 2
    for name in ("list", "multiset"):
        r = check_monad_laws(monad_by_name(name), [0, 1], 3)
        if not r["passed"]:
            return False, f"{name}: failures"
        checked += 2
    note = f" (weight-bounded: {', '.join(bounded)})" if bounded else ""
    return True, f"{checked} law reports pass{note}"


CATEGORICAL = ["identity", "exception:K=k", "list", "multiset", "finiteset", "state:n=2",
               "writermin:n=2"]


def criterion_9() -> Result:
    xs = [0, 1]
    for name in CATEGORICAL:
        m = monad_by_name(name)
        for label, rep in (("ideal", check_ideal(m, xs, 3)), ("comonad", check_comonad(m, xs, 3))):
            if not rep["passed"]:
                return False, f"{name} {label}: {rep['failures'][:1]}"
        candidates = None
        if not m.finite:
            sf = semifree_of(m)
            candidates = {k: [H_transform(m, A, sf) for A in enumerate_models(sf.result, k)]
                          for k in (1, 2)}
        rep = check_ideal_algebra_correspondence(m, 2, 3, candidates=candidates)
        if not rep["passed"]:
            return False, f"{name} correspondence: {rep['failures'][:1]}"
    w = nonpointedness_witness()
    if w["verdict"] != "no natural point exists" or w["witness_carrier_size"] != 1:
        return False, f"nonpointedness: {w}"
    for sigma in (support_morphism(), forget_order_morphism()):
        semifree_morphism(sigma, xs, 3)
    return True, f"{len(CATEGORICAL)} monads, non-pointedness, support and forget-order lifts"


def _semantic_agreement(rec: Recorder) -> Tuple[int, int, List[str]]:
    """Every recorded proved equation holds in every model of its theory of
    size at most 3."""
    by_theory: Dict[Tuple, List[Tuple[Term, Term]]] = {}
    for sig, eqs, s, t in rec.proved:
        by_theory.setdefault((sig, eqs), []).append((s, t))
    bad: List[str] = []
    models_seen = 0
    for (sig, eqs), goals in by_theory.items():
        th = Theory("recorded", sig, tuple(sorted(eqs, key=repr)))
        for m in (1, 2, 3):
            for A in enumerate_models(th, m, cap=None):
                models_seen += 1
                for s, t in goals:
                    if not satisfies(A, Equation(s, t)):
                        bad.append(f"{s} = {t} fails in a model of size {m}")
    return len(by_theory), models_seen, bad


def criterion_10(rec: Recorder) -> Result:
    if rec.recheck_failures:
        return False, f"re-check failures: {rec.recheck_failures[:2]}"
    if rec.collisions():
        return False, f"{len(rec.collisions())} proved-and-refuted collisions"
    theories, models, bad = _semantic_agreement(rec)
    if bad:
        return False, bad[0]
    return True, (f"{rec.proofs_checked} proofs re-checked, {len(rec.refuted)} refutations, "
                  f"no collisions; {len(rec.proved)} proved equations hold in {models} models "
                  f"of {theories} theories")


CRITERIA: List[Callable[[], Result]] = [criterion_1, criterion_2, criterion_3, criterion_4,
                                        criterion_5, criterion_6, criterion_7, criterion_8,
                                        criterion_9]
RESULTS: Dict[int, Tuple[bool, str, float]] = {}


def _run(n: int, fn: Callable[[], Result]) -> Tuple[bool, str]:
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    RESULTS[n] = (ok, detail, time.perf_counter() - start)
    return ok, detail


def format_line(n: int) -> str:
    ok, detail, secs = RESULTS[n]
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({secs:5.1f}s)  {detail}"


# -- pytest wiring ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def recorder():
    with recording() as rec:
        yield rec


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(recorder, n):
    ok, detail = _run(n, CRITERIA[n - 1])
    print(format_line(n))
    assert ok, detail


def test_criterion_10(recorder):
    ok, detail = _run(10, lambda: criterion_10(recorder))
    print(format_line(10))
    assert ok, detail


if __name__ == "__main__":
    with recording() as rec:
        for i, fn in enumerate(CRITERIA, start=1):
            _run(i, fn)
            print(format_line(i), flush=True)
        _run(10, lambda: criterion_10(rec))
        print(format_line(10), flush=True)
    sys.exit(0 if all(r[0] for r in RESULTS.values()) else 1)
