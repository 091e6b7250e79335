"""Command-line front end.

Exit codes: 0 success or verified, 1 verification failure (witnesses are
printed), 2 usage or parse error, 3 refused for budget or feasibility.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import categorical as cat
from .closure import Budget, prove_bounded
from .csp import FeasibilityError
from .dsl import (ParseError, dumps, format_equation, parse_equation, parse_theory, print_theory,
                  report, theory_to_json)
from .models import DEFAULT_CAP, enumerate_models, find_countermodel
from .monads import Monad, check_monad_laws, free_algebra, monad_by_name
from .proofs import ProofError, check_proof, proof_from_json, proof_size, proof_to_json
from .semialgebras import H_transform, semifree_of, verify_iso
from .semifree import (Equivalent, Inequivalent, SignatureMismatch, iterate_semifree,
                       presentations_equivalent, semifree_theory, simplify_presentation,
                       lift_proof, verdict_to_json)
from .terms import Theory, format_term
from .theories import builtin_theory

OK, FAILED, USAGE, REFUSED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def load_theory(spec: str) -> Theory:
    """A ``.theory`` file path, ``builtin:<name>`` or a bare built-in name."""
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            return parse_theory(fh.read(), spec)
    name = spec[len("builtin:"):] if spec.startswith("builtin:") else spec
    try:
        return builtin_theory(name)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"no theory file or built-in named {spec!r}: {exc}") from None


def load_monad(spec: str) -> Monad:
    try:
        return monad_by_name(spec)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"no built-in monad named {spec!r}: {exc}") from None


def _budget(k: Optional[int]) -> Budget:
    return Budget() if k is None else Budget(max_size=k)


def _emit(args: argparse.Namespace, kind: str, theory: Optional[str], items: List[Any],
          text: Sequence[str], metadata: Optional[Dict[str, Any]] = None) -> None:
    if args.json:
        print(dumps(report(kind, theory, items, metadata)))
    else:
        for line in text:
            print(line)


def _verdict(code: int) -> str:
    return {OK: "ok", FAILED: "failed", REFUSED: "refused"}[code]


# -- subcommands ------------------------------------------------------------------

def cmd_semifree(args: argparse.Namespace) -> int:
    th = load_theory(args.theory)
    if args.iterate:
        out = iterate_semifree(th, args.iterate, _budget(args.budget), simplify=True)
        _emit(args, "semifree", th.name, [theory_to_json(out)], [print_theory(out)],
              {"iterate": args.iterate, "verdict": "ok"})
        return OK
    sf = semifree_theory(th)
    if not args.simplify:
        items = [theory_to_json(sf.result),
                 {"provenance": [{"family": p.family, "op": p.op, "index": p.index}
                                 for p in sf.provenance]}]
        _emit(args, "semifree", th.name, items, [print_theory(sf.result)],
              {"equations": len(sf.result.equations), "verdict": "ok"})
        return OK
    simp = simplify_presentation(sf, _budget(args.budget))
    elim = None if simp.eliminated is None else \
        f"{simp.eliminated[0]}(v) = {format_term(simp.eliminated[1])}"
    text = [print_theory(simp.theory)]
    if elim:
        text.insert(0, f"# eliminated {elim}")
    _emit(args, "semifree", th.name, [theory_to_json(simp.theory), {"audit": simp.audit}], text,
          {"eliminated": elim, "verdict": "ok"})
    return OK


def cmd_prove(args: argparse.Namespace) -> int:
    th = load_theory(args.theory)
    eq = parse_equation(args.equation, th.signature)
    proof, stats = prove_bounded(th, eq.lhs, eq.rhs, _budget(args.budget))
    if proof is None:
        _emit(args, "prove", th.name, [], [f"not found within budget: {stats.as_dict()}"],
              {"verdict": "refused", "budget": _budget(args.budget).as_dict(),
               "stats": stats.as_dict()})
        return REFUSED
    j = check_proof(th, proof)
    _emit(args, "prove", th.name, [proof_to_json(proof)],
          [f"proved {format_term(j.lhs)} = {format_term(j.rhs)} "
           f"(proof size {proof_size(proof)})", json.dumps(proof_to_json(proof), sort_keys=True)],
          {"verdict": "ok", "equation": format_equation(eq), "stats": stats.as_dict()})
    return OK


def cmd_countermodel(args: argparse.Namespace) -> int:
    th = load_theory(args.theory)
    eq = parse_equation(args.equation, th.signature)
    hit = find_countermodel(th, eq.lhs, eq.rhs, args.max_carrier, args.cap)
    if hit is None:
        _emit(args, "countermodel", th.name, [],
              [f"no countermodel with carrier <= {args.max_carrier}"],
              {"verdict": "refused", "max_carrier": args.max_carrier})
        return REFUSED
    alg, env = hit
    lines = [f"countermodel of size {alg.size}, failing at {env}"]
    lines += [f"  {name}: {list(tab)}" for name, tab in alg.to_json()["tables"].items()]
    _emit(args, "countermodel", th.name, [{"model": alg.to_json(), "assignment": env}], lines,
          {"verdict": "ok", "equation": format_equation(eq)})
    return OK


def cmd_lift_proof(args: argparse.Namespace) -> int:
    th = load_theory(args.theory)
    with open(args.proof, encoding="utf-8") as fh:
        doc = json.load(fh)
    doc = doc.get("proof", doc) if isinstance(doc, dict) else doc
    proof = proof_from_json(doc, th.signature)
    try:
        j = check_proof(th, proof)
    except ProofError as exc:
        _emit(args, "lift-proof", th.name, [{"error": str(exc)}], [f"input proof fails: {exc}"],
              {"verdict": "failed"})
        return FAILED
    sf = semifree_theory(th)
    lifted = lift_proof(sf, proof)
    lj = check_proof(sf.result, lifted)
    expected = (sf.wrap(j.lhs), sf.wrap(j.rhs))
    ok = (lj.lhs, lj.rhs) == expected
    _emit(args, "lift-proof", th.name, [proof_to_json(lifted)],
          [f"input:  {format_term(j.lhs)} = {format_term(j.rhs)}",
           f"lifted: {format_term(lj.lhs)} = {format_term(lj.rhs)}",
           "checked under the semifree theory" if ok else "lifted judgment mismatch"],
          {"verdict": "ok" if ok else "failed"})
    return OK if ok else FAILED


def cmd_free(args: argparse.Namespace) -> int:
    th = load_theory(args.theory)
    xs = [x.strip() for x in args.vars.split(",") if x.strip()]
    fa = free_algebra(th, xs, args.bound)
    rep = fa.report()
    lines = [f"{len(fa.classes)} classes (bound {args.bound}, under-approximation"
             f"{', saturated' if fa.saturated else ''})"]
    lines += ["  " + " = ".join(c[:4]) + (" = ..." if len(c) > 4 else "") for c in rep["classes"]]
    _emit(args, "free", th.name, rep["classes"], lines,
          {"verdict": "ok", "bound": args.bound, "saturated": fa.saturated,
           "under_approximation": True})
    return OK


def cmd_models(args: argparse.Namespace) -> int:
    th = load_theory(args.theory)
    models = enumerate_models(th, args.carrier, args.cap)
    lines = [f"{len(models)} models"]
    for i, alg in enumerate(models):
        lines.append(f"  #{i}: " + ", ".join(f"{k}={v}" for k, v in alg.to_json()["tables"].items()))
    _emit(args, "models", th.name, [a.to_json() for a in models], lines,
          {"verdict": "ok", "carrier": args.carrier, "count": len(models)})
    return OK


def cmd_verify_iso(args: argparse.Namespace) -> int:
    m = load_monad(args.monad)
    rep = verify_iso(m, args.carrier, args.bound, args.cap)
    code = OK if rep["passed"] else FAILED
    lines = [f"{row['carrier']}: {row['models']} models"
             + (f", {row['semialgebras']} semialgebras" if "semialgebras" in row else "")
             for row in rep["per_carrier"]]
    lines.append(f"homomorphism pairs checked: {rep['homomorphisms_checked']}")
    lines += [f"FAIL {f}" for f in rep["failures"]]
    lines.append("verified" if rep["passed"] else "failed")
    _emit(args, "verify-iso", m.name, [rep], lines, {"verdict": _verdict(code)})
    return code


def cmd_verify_monad(args: argparse.Namespace) -> int:
    m = load_monad(args.monad)
    rep = check_monad_laws(m, list(range(args.set_size)), args.bound)
    code = OK if rep["passed"] else FAILED
    lines = []
    for part in ("monad", "semifree"):
        r = rep[part]
        lines.append(f"{r['monad']}: {'pass' if r['passed'] else 'FAIL'} "
                     f"(MX {r['checked']['MX']}, MMMX {r['checked']['MMMX']}, "
                     f"{'exhaustive' if r['exhaustive'] else 'bounded'})")
        lines += [f"  FAIL {f}" for f in r["failures"][:20]]
    _emit(args, "verify-monad", m.name, [rep], lines, {"verdict": _verdict(code)})
    return code


def _morphisms_for(m: Monad) -> List[cat.MonadMorphism]:
    out = [cat.identity_morphism(m)]
    for sigma in (cat.support_morphism(), cat.forget_order_morphism()):
        if m in (sigma.source, sigma.target):
            out.append(sigma)
    return out


def cmd_verify_categorical(args: argparse.Namespace) -> int:
    m = load_monad(args.monad)
    xs = list(range(args.set_size))
    chosen = [k for k in ("ideal", "comonad", "morphisms", "nonpointed") if getattr(args, k)]
    chosen = chosen or ["ideal", "comonad", "morphisms", "nonpointed"]
    items: List[Dict[str, Any]] = []
    lines: List[str] = []
    passed = True
    if "ideal" in chosen:
        rep = cat.check_ideal(m, xs, args.bound)
        cands = None
        if not m.finite:
            sf = semifree_of(m)
            cands = {k: [H_transform(m, A, sf) for A in enumerate_models(sf.result, k, args.cap)]
                     for k in range(1, args.set_size + 1)}
        corr = cat.check_ideal_algebra_correspondence(m, args.set_size, args.bound, args.cap, cands)
        items += [rep, corr]
        passed &= rep["passed"] and corr["passed"]
        lines.append(f"ideal: {'pass' if rep['passed'] else 'FAIL'}")
        lines.append(f"ideal-algebra correspondence: {'pass' if corr['passed'] else 'FAIL'}")
    if "comonad" in chosen:
        rep = cat.check_comonad(m, xs, args.bound)
        items.append(rep)
        passed &= rep["passed"]
        lines.append(f"comonad: {'pass' if rep['passed'] else 'FAIL'}")
    if "morphisms" in chosen:
        for sigma in _morphisms_for(m):
            try:
                lifted = cat.semifree_morphism(sigma, xs, args.bound)
                items.append({"check": "semifree-morphism", "morphism": lifted.name, "passed": True})
                lines.append(f"{lifted.name}: pass")
            except cat.MorphismError as exc:
                passed = False
                items.append(exc.report)
                lines.append(f"{sigma.name}: FAIL {exc}")
    if "nonpointed" in chosen:
        rep = cat.nonpointedness_witness()
        items.append(rep)
        passed &= rep["verdict"] == "no natural point exists"
        lines.append(f"nonpointed: {rep['verdict']} (witness carrier size {rep['witness_carrier_size']})")
    code = OK if passed else FAILED
    _emit(args, "verify-categorical", m.name, items, lines, {"verdict": _verdict(code)})
    return code


def _parse_renaming(text: Optional[str]) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for part in (text or "").split(","):
        if part.strip():
            src, sep, dst = part.partition("=")
            if not sep:
                raise UsageError(f"bad renaming entry {part!r}; expected old=new")
            out[src.strip()] = dst.strip()
    return out


def cmd_equiv(args: argparse.Namespace) -> int:
    t1, t2 = load_theory(args.theory_a), load_theory(args.theory_b)
    try:
        v = presentations_equivalent(t1, t2, _budget(args.budget), args.max_carrier,
                                     _parse_renaming(args.rename))
    except SignatureMismatch as exc:
        raise UsageError(str(exc)) from None
    doc = verdict_to_json(v)
    if isinstance(v, Equivalent):
        code = OK
        text = [f"Equivalent ({len(v.forward)} forward and {len(v.backward)} backward proofs)"]
    elif isinstance(v, Inequivalent):
        code = FAILED
        text = [f"Inequivalent: {format_equation(v.failing_equation)} fails at {v.assignment} "
                f"in a model of {v.model_of} of size {v.countermodel.size}"]
    else:
        code = REFUSED
        text = ["Unknown within budget; unproved:"] + [f"  {e}" for e in v.unproved]
    _emit(args, "equiv", f"{t1.name} ~ {t2.name}", [doc], text, {"verdict": _verdict(code)})
    return code


# -- parser -----------------------------------------------------------------------

def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--json", action="store_true", default=d if suppress else False,
                   help="emit a semifree-lab/1 JSON report")
    p.add_argument("--seed-order", choices=["canonical"], default=d if suppress else "canonical",
                   help="enumeration order (only canonical is supported)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semifree-lab",
                                 description="Semifree presentations, proofs and finite models.")
    _global_options(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name: str, fn, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        _global_options(p, suppress=True)
        p.set_defaults(fn=fn)
        return p

    p = cmd("semifree", cmd_semifree, "print the semifree presentation")
    p.add_argument("theory")
    p.add_argument("--simplify", action="store_true")
    p.add_argument("--iterate", type=int, default=0, metavar="N")
    p.add_argument("--budget", type=int, default=None, metavar="K")

    p = cmd("prove", cmd_prove, "bounded proof search")
    p.add_argument("theory")
    p.add_argument("equation")
    p.add_argument("--budget", type=int, default=None, metavar="K")

    p = cmd("countermodel", cmd_countermodel, "search for a finite countermodel")
    p.add_argument("theory")
    p.add_argument("equation")
    p.add_argument("--max-carrier", type=int, default=3, metavar="M")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = cmd("lift-proof", cmd_lift_proof, "lift a proof into the semifree theory")
    p.add_argument("theory")
    p.add_argument("proof", help="proof tree as JSON")

    p = cmd("free", cmd_free, "bounded free algebra")
    p.add_argument("theory")
    p.add_argument("--vars", required=True)
    p.add_argument("--bound", type=int, required=True, metavar="B")

    p = cmd("models", cmd_models, "enumerate finite models")
    p.add_argument("theory")
    p.add_argument("--carrier", type=int, required=True, metavar="M")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = cmd("verify-iso", cmd_verify_iso, "check the semialgebra/model correspondence")
    p.add_argument("monad")
    p.add_argument("--carrier", type=int, default=2, metavar="M")
    p.add_argument("--bound", type=int, default=3, metavar="B")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = cmd("verify-monad", cmd_verify_monad, "check monad and semifree-monad laws")
    p.add_argument("monad")
    p.add_argument("--set-size", type=int, default=2, metavar="K")
    p.add_argument("--bound", type=int, default=3, metavar="B")

    p = cmd("verify-categorical", cmd_verify_categorical, "ideal, comonad and morphism checks")
    p.add_argument("monad")
    p.add_argument("--ideal", action="store_true")
    p.add_argument("--comonad", action="store_true")
    p.add_argument("--morphisms", action="store_true")
    p.add_argument("--nonpointed", action="store_true")
    p.add_argument("--set-size", type=int, default=2, metavar="K")
    p.add_argument("--bound", type=int, default=3, metavar="B")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = cmd("equiv", cmd_equiv, "decide mutual derivability within budget")
    p.add_argument("theory_a")
    p.add_argument("theory_b")
    p.add_argument("--budget", type=int, default=None, metavar="K")
    p.add_argument("--max-carrier", type=int, default=2, metavar="M")
    p.add_argument("--rename", default=None, help="symbol renaming for theory B, e.g. a0=a,a1=b")
    return ap


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, ParseError, OSError, json.JSONDecodeError) as exc:
        return _fail(args, USAGE, "usage-error", f"error: {exc}")
    except FeasibilityError as exc:
        return _fail(args, REFUSED, "refused", f"refused: {exc}",
                     {"space": exc.space, "cap": exc.cap})


def _fail(args: argparse.Namespace, code: int, verdict: str, message: str,
          extra: Optional[Dict[str, Any]] = None) -> int:
    print(message, file=sys.stderr)
    if args.json:
        meta = {"verdict": verdict, "message": message}
        meta.update(extra or {})
        print(dumps(report(args.command, None, [], meta)))
    return code


def main() -> None:
    sys.exit(run())
