from __future__ import annotations

import functools
from pathlib import Path

from semifree_lab.dsl import parse_theory
from semifree_lab.semifree import Simplification, semifree_theory, simplify_presentation
from semifree_lab.terms import Theory
from semifree_lab.theories import builtin_theory

ROOT = Path(__file__).resolve().parent.parent


@functools.lru_cache(maxsize=None)
def simplified(name: str) -> Simplification:
    """Simplification of a built-in's semifree presentation, shared across tests."""
    return simplify_presentation(semifree_theory(builtin_theory(name)))


@functools.lru_cache(maxsize=None)
def golden(stem: str) -> Theory:
    path = ROOT / "golden" / f"{stem}.theory"
    return parse_theory(path.read_text(encoding="utf-8"), str(path))


def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion that ran."""
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.format_line(n))
