"""A small backtracking solver over finite tables.

A problem has ``n`` cells, each taking a value in ``range(domain)``.  Each
constraint is a callable reading cell values through ``vals`` (a list with
``None`` for unassigned cells).  It returns ``True``/``False`` once it can be
decided, or raises :class:`Need` naming the unassigned cell it is blocked on.
When the blocking cell is the last missing piece of an equality, the
constraint can also say which value would satisfy it, and the solver assigns
that value straight away.

Constraints wait on watch lists and are re-run when their cell gets a value.
Watch-list moves and assignments go on a trail so backtracking is exact.
Solutions come out in lexicographic order of the cell vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

Constraint = Callable[[List[Optional[int]]], bool]


class Need(Exception):
    __slots__ = ("cell", "forced")

    def __init__(self, cell: int, forced: Optional[int] = None):
        self.cell = cell
        self.forced = forced


class FeasibilityError(RuntimeError):
    """The raw search space exceeds the configured cap."""

    def __init__(self, space: int, cap: int, what: str = "search space"):
        super().__init__(f"{what} has {space} candidates, above the cap of {cap}; "
                         f"raise the cap to proceed")
        self.space = space
        self.cap = cap


@dataclass
class Top:
    """Result of evaluating an expression whose outermost lookup is missing."""
    cell: int


def force_equal(left: "int | Top", right: "int | Top") -> bool:
    """Decide ``left == right`` or raise :class:`Need` (with a forced value
    when exactly one side is blocked on its final lookup)."""
    if isinstance(left, Top):
        if isinstance(right, Top):
            raise Need(left.cell)
        raise Need(left.cell, right)
    if isinstance(right, Top):
        raise Need(right.cell, left)
    return left == right


def lookup(vals: List[Optional[int]], cell: int) -> int:
    v = vals[cell]
    if v is None:
        raise Need(cell)
    return v


def lookup_top(vals: List[Optional[int]], cell: int) -> "int | Top":
    v = vals[cell]
    return Top(cell) if v is None else v


class Solver:
    def __init__(self, ncells: int, domain: int, constraints: Sequence[Constraint]):
        self.n = ncells
        self.domain = domain
        self.constraints = list(constraints)
        self.vals: List[Optional[int]] = [None] * ncells
        self.watch: List[List[int]] = [[] for _ in range(ncells)]
        self.trail: List[Tuple[int, int, object]] = []
        self.nodes = 0

    # trail records: (0, cell, None) assignment; (1, cell, None) append to
    # watch[cell]; (2, cell, old_list) watch list taken
    def _assign(self, cell: int, value: int, queue: List[int]) -> None:
        self.vals[cell] = value
        self.trail.append((0, cell, None))
        queue.append(cell)

    def _run(self, ci: int, queue: List[int]) -> bool:
        try:
            return bool(self.constraints[ci](self.vals))
        except Need as need:
            d = need.cell
            self.watch[d].append(ci)
            self.trail.append((1, d, None))
            if need.forced is not None and self.vals[d] is None:
                if not 0 <= need.forced < self.domain:
                    return False
                self._assign(d, need.forced, queue)
            return True

    def _propagate(self, queue: List[int]) -> bool:
        while queue:
            cell = queue.pop()
            pending = self.watch[cell]
            if not pending:
                continue
            self.watch[cell] = []
            self.trail.append((2, cell, pending))
            for ci in pending:
                if not self._run(ci, queue):
                    return False
        return True

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            kind, cell, extra = self.trail.pop()
            if kind == 0:
                self.vals[cell] = None
            elif kind == 1:
                self.watch[cell].pop()
            else:
                self.watch[cell] = extra  # type: ignore[assignment]

    def solutions(self) -> Iterator[Tuple[int, ...]]:
        queue: List[int] = []
        for ci in range(len(self.constraints)):
            if not self._run(ci, queue):
                return
        if not self._propagate(queue):
            return
        yield from self._search(0)

    def _search(self, start: int) -> Iterator[Tuple[int, ...]]:
        cell = start
        while cell < self.n and self.vals[cell] is not None:
            cell += 1
        if cell == self.n:
            yield tuple(self.vals)  # type: ignore[arg-type]
            return
        for value in range(self.domain):
            self.nodes += 1
            mark = len(self.trail)
            queue: List[int] = []
            self._assign(cell, value, queue)
            if self._propagate(queue):
                yield from self._search(cell + 1)
            self._undo(mark)


def solve(ncells: int, domain: int, constraints: Sequence[Constraint]) -> List[Tuple[int, ...]]:
    """All solutions in lexicographic order."""
    out = list(Solver(ncells, domain, constraints).solutions())
    out.sort()
    return out
