"""Opt-in soundness recorder.

While a :func:`recording` block is active, every proof returned by
``prove_bounded`` is re-checked and every countermodel returned by
``find_countermodel`` is remembered, so a run can confirm that no equation
was both proved and refuted over the same theory.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, List, Set, Tuple

from .terms import Term, Theory

_Key = Tuple[object, object, Term, Term]


def _key(th: Theory, s: Term, t: Term) -> _Key:
    lo, hi = sorted([s, t], key=repr)
    return (th.signature, frozenset(th.equations), lo, hi)


@dataclass
class Recorder:
    proved: Set[_Key] = field(default_factory=set)
    refuted: Set[_Key] = field(default_factory=set)
    proofs_checked: int = 0
    recheck_failures: List[str] = field(default_factory=list)

    def collisions(self) -> Set[_Key]:
        return self.proved & self.refuted


_active: List[Recorder] = []


@contextmanager
def recording() -> Iterator[Recorder]:
    rec = Recorder()
    _active.append(rec)
    try:
        yield rec
    finally:
        _active.remove(rec)


def note_proof(th: Theory, s: Term, t: Term, proof: object) -> None:
    if not _active:
        return
    from .proofs import ProofError, check_proof
    key = _key(th, s, t)
    for rec in _active:
        rec.proofs_checked += 1
        try:
            j = check_proof(th, proof)  # type: ignore[arg-type]
            if (j.lhs, j.rhs) != (s, t):
                rec.recheck_failures.append(f"judgment mismatch for {s!r} = {t!r}")
        except ProofError as exc:
            rec.recheck_failures.append(f"{s!r} = {t!r}: {exc}")
        rec.proved.add(key)


def note_countermodel(th: Theory, s: Term, t: Term) -> None:
    for rec in _active:
        rec.refuted.add(_key(th, s, t))
