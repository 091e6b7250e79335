"""Proof-producing congruence closure and bounded equality saturation.

Every node is a concrete term (hash-consed).  Merges are recorded as labelled
edges of a proof forest, so any two equal nodes can be explained by a chain
of axiom instances and congruence steps, which becomes a :mod:`proofs` tree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .audit import note_proof
from .proofs import Cong, Proof, Refl, Axiom, subst, symm, trans
from .terms import App, Term, Theory, Var, size, variables_of


@dataclass(frozen=True)
class Budget:
    """Search limits: largest term admitted, node cap and saturation rounds."""
    max_size: int = 8
    max_nodes: int = 4000
    max_rounds: int = 8

    @classmethod
    def coerce(cls, b: "Budget | int | None") -> "Budget":
        if b is None:
            return cls()
        if isinstance(b, Budget):
            return b
        return cls(max_size=int(b))

    def as_dict(self) -> Dict[str, int]:
        return {"max_size": self.max_size, "max_nodes": self.max_nodes,
                "max_rounds": self.max_rounds}


@dataclass
class _AxiomEdge:
    index: int
    mapping: Tuple[Tuple[str, Term], ...]
    flipped: bool  # True when the edge runs rhs -> lhs


class _Cong:
    __slots__ = ()


_CONG = _Cong()


class CongruenceClosure:
    def __init__(self) -> None:
        self.terms: List[Term] = []
        self.ops: List[Optional[str]] = []
        self.kids: List[Tuple[int, ...]] = []
        self.sizes: List[int] = []
        self.ids: Dict[Term, int] = {}
        self.uf: List[int] = []
        self.members: Dict[int, List[int]] = {}
        self.uses: Dict[int, List[int]] = {}
        self.best: Dict[int, int] = {}
        self.table: Dict[tuple, int] = {}
        # proof forest: parent pointer and the label of the edge to the parent
        self.pf_parent: List[int] = []
        self.pf_label: List[object] = []
        self.pf_ends: List[Tuple[int, int]] = []
        self.merges = 0

    # -- union-find ----------------------------------------------------------
    def find(self, x: int) -> int:
        uf = self.uf
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def _sig(self, n: int) -> tuple:
        return (self.ops[n], tuple(self.find(c) for c in self.kids[n]))

    # -- construction ----------------------------------------------------------
    def add(self, t: Term) -> int:
        got = self.ids.get(t)
        if got is not None:
            return got
        if isinstance(t, Var):
            n = self._new(t, None, ())
            return n
        kids = tuple(self.add(a) for a in t.args)
        n = self._new(t, t.op, kids)
        for c in kids:
            self.uses[self.find(c)].append(n)
        sig = self._sig(n)
        other = self.table.get(sig)
        if other is not None:
            self.union(n, other, _CONG)
        else:
            self.table[sig] = n
        return n

    def _new(self, t: Term, op: Optional[str], kids: Tuple[int, ...]) -> int:
        n = len(self.terms)
        self.terms.append(t)
        self.ops.append(op)
        self.kids.append(kids)
        self.sizes.append(1 + sum(self.sizes[c] for c in kids))
        self.ids[t] = n
        self.uf.append(n)
        self.members[n] = [n]
        self.uses[n] = []
        self.best[n] = n
        self.pf_parent.append(n)
        self.pf_label.append(None)
        self.pf_ends.append((n, n))
        return n

    def union(self, a: int, b: int, label: object) -> bool:
        pending = [(a, b, label)]
        changed = False
        while pending:
            x, y, lab = pending.pop()
            rx, ry = self.find(x), self.find(y)
            if rx == ry:
                continue
            changed = True
            self.merges += 1
            self._forest_link(x, y, lab)
            if len(self.members[rx]) < len(self.members[ry]):
                rx, ry = ry, rx
            # ry joins rx
            self.uf[ry] = rx
            self.members[rx].extend(self.members.pop(ry))
            bx, by = self.best[rx], self.best.pop(ry)
            if (self.sizes[by], by) < (self.sizes[bx], bx):
                self.best[rx] = by
            moved = self.uses.pop(ry)
            for p in moved:
                sig = self._sig(p)
                other = self.table.get(sig)
                if other is not None and self.find(other) != self.find(p):
                    pending.append((p, other, _CONG))
                elif other is None:
                    self.table[sig] = p
            self.uses[rx].extend(moved)
        return changed

    def _forest_link(self, x: int, y: int, label: object) -> None:
        # make x the root of its proof tree, then hang it under y
        self._reroot(x)
        self.pf_parent[x] = y
        self.pf_label[x] = label
        self.pf_ends[x] = (x, y)

    def _reroot(self, x: int) -> None:
        prev, prev_label, prev_ends = x, None, (x, x)
        cur = x
        while True:
            nxt = self.pf_parent[cur]
            lab, ends = self.pf_label[cur], self.pf_ends[cur]
            self.pf_parent[cur] = prev
            self.pf_label[cur] = prev_label
            self.pf_ends[cur] = prev_ends
            if nxt == cur:
                break
            prev, prev_label, prev_ends = cur, lab, ends
            cur = nxt
        self.pf_parent[x] = x
        self.pf_label[x] = None
        self.pf_ends[x] = (x, x)

    # -- explanation -------------------------------------------------------------
    def explain(self, a: int, b: int, memo: Optional[Dict[Tuple[int, int], Proof]] = None) -> Proof:
        """A proof of ``term(a) = term(b)``; the two must already be merged."""
        if memo is None:
            memo = {}
        if a == b:
            return Refl(self.terms[a])
        key = (a, b)
        if key in memo:
            return memo[key]
        if not self.same(a, b):
            raise ValueError("explain called on unmerged nodes")
        up_a = self._ancestors(a)
        up_b = self._ancestors(b)
        pos_b = {n: i for i, n in enumerate(up_b)}
        lca_i = next(i for i, n in enumerate(up_a) if n in pos_b)
        lca = up_a[lca_i]
        steps: List[Proof] = []
        for n in up_a[:lca_i]:
            steps.append(self._edge_proof(n, True, memo))
        down: List[Proof] = []
        for n in up_b[:pos_b[lca]]:
            down.append(self._edge_proof(n, False, memo))
        steps.extend(reversed(down))
        p = trans(*steps) if steps else Refl(self.terms[a])
        memo[key] = p
        return p

    def _ancestors(self, n: int) -> List[int]:
        out = [n]
        while self.pf_parent[n] != n:
            n = self.pf_parent[n]
            out.append(n)
        return out

    def _edge_proof(self, child: int, upward: bool, memo: Dict[Tuple[int, int], Proof]) -> Proof:
        # proves child = parent when upward, parent = child otherwise
        x, y = (child, self.pf_parent[child]) if upward else (self.pf_parent[child], child)
        lab = self.pf_label[child]
        u, v = self.pf_ends[child]
        if isinstance(lab, _Cong):
            p = Cong(self.ops[u], tuple(self.explain(cu, cv, memo)
                                        for cu, cv in zip(self.kids[u], self.kids[v])))
        elif isinstance(lab, _AxiomEdge):
            base: Proof = subst(Axiom(lab.index), dict(lab.mapping)) if lab.mapping else Axiom(lab.index)
            p = symm(base) if lab.flipped else base
        else:
            raise ValueError(f"unknown edge label {lab!r}")
        return p if (u, v) == (x, y) else symm(p)

    # -- e-matching ------------------------------------------------------------------
    def match(self, pattern: Term, root: int, env: Dict[str, int]) -> Iterator[Dict[str, int]]:
        if isinstance(pattern, Var):
            bound = env.get(pattern.name)
            if bound is None:
                out = dict(env)
                out[pattern.name] = root
                yield out
            elif self.find(bound) == root:
                yield env
            return
        arity = len(pattern.args)
        for n in list(self.members[root]):
            if self.ops[n] != pattern.op or len(self.kids[n]) != arity:
                continue
            yield from self._match_args(pattern.args, self.kids[n], 0, env)

    def _match_args(self, pats: Sequence[Term], kids: Sequence[int], i: int,
                    env: Dict[str, int]) -> Iterator[Dict[str, int]]:
        if i == len(pats):
            yield env
            return
        for env2 in self.match(pats[i], self.find(kids[i]), env):
            yield from self._match_args(pats, kids, i + 1, env2)

    def roots(self) -> List[int]:
        return sorted(self.members)

    def rep_term(self, root: int) -> Term:
        return self.terms[self.best[self.find(root)]]


@dataclass(frozen=True)
class _Rule:
    index: int
    lhs: Term
    rhs: Term
    flipped: bool
    extra: Tuple[str, ...]


def _rules(th: Theory) -> List[_Rule]:
    out: List[_Rule] = []
    for i, eq in enumerate(th.equations):
        for lhs, rhs, flipped in ((eq.lhs, eq.rhs, False), (eq.rhs, eq.lhs, True)):
            if lhs == rhs:
                continue
            lv = variables_of(lhs)
            extra = tuple(x for x in variables_of(rhs) if x not in lv)
            out.append(_Rule(i, lhs, rhs, flipped, extra))
    # shrinking rules first, variable patterns last
    out.sort(key=lambda r: (isinstance(r.lhs, Var), len(r.extra) > 0, size(r.rhs) > size(r.lhs)))
    return out


def _instantiate(t: Term, env: Dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return env[t.name]
    if not t.args:
        return t
    return App(t.op, tuple(_instantiate(a, env) for a in t.args))


@dataclass
class SearchStats:
    rounds: int = 0
    nodes: int = 0
    merges: int = 0
    saturated: bool = False
    exhausted: Optional[str] = None

    def as_dict(self) -> Dict[str, object]:
        return {"rounds": self.rounds, "nodes": self.nodes, "merges": self.merges,
                "saturated": self.saturated, "exhausted": self.exhausted}


def saturate(th: Theory, seeds: Sequence[Term], budget: Budget,
             goal: Optional[Tuple[int, int]] = None,
             cc: Optional[CongruenceClosure] = None) -> Tuple[CongruenceClosure, SearchStats]:
    """Grow a closure from ``seeds`` by instantiating axioms of ``th`` in both
    directions.  Stops early once the ``goal`` node pair is merged."""
    cc = cc or CongruenceClosure()
    for s in seeds:
        cc.add(s)
    stats = SearchStats()
    rules = _rules(th)
    atoms: List[Term] = []
    for s in seeds:
        for x in variables_of(s):
            if Var(x) not in atoms:
                atoms.append(Var(x))
    atoms += [App(o.name) for o in th.signature.symbols if o.arity == 0]
    applied = set()
    # seeds are always admitted, so instances as large as a seed are too
    limit = max([budget.max_size] + [size(x) for x in seeds])
    match_cap = budget.max_nodes * 20

    def done() -> bool:
        return goal is not None and cc.same(*goal)

    for rnd in range(budget.max_rounds):
        if done():
            break
        stats.rounds = rnd + 1
        before = (len(cc.terms), cc.merges)
        work: List[Tuple[_Rule, Dict[str, int]]] = []
        for rule in rules:
            for root in cc.roots():
                if root not in cc.members:
                    continue
                for env in cc.match(rule.lhs, root, {}):
                    work.append((rule, env))
                    if len(work) > match_cap:
                        break
                if len(work) > match_cap:
                    break
            if len(work) > match_cap:
                stats.exhausted = "max_matches"
                break
        for rule, env in work:
            if len(cc.terms) > budget.max_nodes:
                stats.exhausted = "max_nodes"
                break
            tenv = {k: cc.rep_term(n) for k, n in env.items()}
            fillers: List[Dict[str, Term]] = [{}]
            if rule.extra:
                fillers = [dict(zip(rule.extra, combo))
                           for combo in itertools.product(atoms, repeat=len(rule.extra))]
            for fill in fillers:
                full = dict(tenv)
                full.update(fill)
                key = (rule.index, rule.flipped, tuple(sorted((k, cc.ids.get(t, t)) for k, t in full.items())))
                if key in applied:
                    continue
                applied.add(key)
                lt = _instantiate(rule.lhs, full)
                rt = _instantiate(rule.rhs, full)
                if size(lt) > limit or size(rt) > limit:
                    continue
                ln = cc.add(lt)
                rn = cc.add(rt)
                if not cc.same(ln, rn):
                    mapping = tuple(sorted((k, t) for k, t in full.items()
                                           if not (isinstance(t, Var) and t.name == k)))
                    # keep only variables of the axiom
                    cc.union(ln, rn, _AxiomEdge(rule.index, mapping, rule.flipped))
                if done():
                    break
            if done() or stats.exhausted:
                break
        if (stats.exhausted and stats.exhausted != "max_matches") or done():
            break
        if (len(cc.terms), cc.merges) == before and not stats.exhausted:
            stats.saturated = True
            break
    stats.nodes = len(cc.terms)
    stats.merges = cc.merges
    return cc, stats


def prove_bounded(th: Theory, s: Term, t: Term, budget: "Budget | int | None" = None
                  ) -> Tuple[Optional[Proof], SearchStats]:
    """Search for a proof of ``s = t`` from ``th``.  ``None`` means "not found
    within budget", never "refuted"."""
    b = Budget.coerce(budget)
    cc = CongruenceClosure()
    sn, tn = cc.add(s), cc.add(t)
    if cc.same(sn, tn):
        proof = cc.explain(sn, tn)
        note_proof(th, s, t, proof)
        return proof, SearchStats(nodes=len(cc.terms), merges=cc.merges)
    cc, stats = saturate(th, [s, t], b, goal=(sn, tn), cc=cc)
    if cc.same(sn, tn):
        proof = cc.explain(sn, tn)
        note_proof(th, s, t, proof)
        return proof, stats
    if stats.exhausted is None and not stats.saturated:
        stats.exhausted = "max_rounds"
    return None, stats
