"""Goal-dependent denotational semantics over a pluggable domain.

The same clause and body equations drive two instances: the abstract sharing
domain, solved by a tabulated fixpoint, and the concrete collecting domain,
iterated a fixed number of times from the bottom denotation.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass, field

from . import concrete as ps
from . import sharing as shr
from .concrete import BOT, TOP, AnalysisError
from .syntax import Atom, Program, goal_vars, term_str, vars_of


@dataclass(frozen=True)
class Domain:
    name: str
    lub: Callable
    forward: Callable
    backward: Callable
    describe: Callable = repr

    def is_bot(self, a) -> bool:
        return a is BOT


def sharing_domain(fwd: str = "opt", bwd: str = "opt") -> Domain:
    return Domain(
        name=f"sharing[fwd={fwd},bwd={bwd}]",
        lub=shr.sh_lub,
        forward=lambda chi, a1, a2: shr.sh_forward(chi, a1, a2, fwd),
        backward=lambda ex, call, a1, a2: shr.sh_backward(ex, call, a1, a2, bwd),
        describe=shr.format_groups,
    )


def concrete_domain(bwd: str = "match") -> Domain:
    return Domain(
        name=f"concrete[bwd={bwd}]",
        lub=ps.ps_lub,
        forward=ps.ps_forward,
        backward=lambda ex, call, a1, a2: ps.ps_backward(ex, call, a1, a2, bwd),
    )


@dataclass
class AnalysisResult:
    answer: object
    table: dict = field(default_factory=dict)
    iterations: int = 0
    elapsed_ms: float = 0.0


def _check(value, what: str):
    if value is TOP:
        raise AnalysisError(f"{what} produced the top element: mismatched variable sets")
    return value


def _element_vars(a):
    return getattr(a, "U", None)


class Semantics:
    """Clause and body transfer functions for one program and domain."""

    def __init__(self, program: Program, domain: Domain, check_relevance: bool = True):
        self.program = program
        self.domain = domain
        self.check_relevance = check_relevance
        self._clauses: dict = {}
        for c in program.clauses:
            self._clauses.setdefault((c.head.name, c.head.arity), []).append(c)

    def clauses_for(self, atom: Atom) -> list:
        return self._clauses.get((atom.name, atom.arity), [])

    def body(self, body, d, chi):
        for a in body:
            if chi is BOT:
                return BOT
            chi = _check(d(a, chi), f"call to {term_str(a)}")
        return chi

    def clause(self, cl, d, atom, chi):
        dom = self.domain
        entry = _check(dom.forward(chi, atom, cl.head), f"forward unification with {term_str(cl.head)}")
        if entry is BOT:
            return BOT
        ex = self.body(cl.body, d, entry)
        return _check(dom.backward(ex, chi, cl.head, atom), f"backward unification with {term_str(cl.head)}")

    def step(self, d, atom, chi):
        """One application of the program's clauses: the lub over all clauses."""
        out = BOT
        for cl in self.clauses_for(atom):
            out = _check(self.domain.lub(out, self.clause(cl, d, atom, chi)), "least upper bound")
        if self.check_relevance and out is not BOT:
            want = chi.U | vars_of(atom)
            if out.U != want:
                raise AnalysisError(
                    f"relevance violated at {term_str(atom)}: result over {sorted(out.U)}, expected {sorted(want)}"
                )
        return out


def _require_query(goal, chi0):
    if chi0 is BOT or chi0 is TOP:
        return
    missing = goal_vars(goal) - chi0.U
    if missing:
        raise AnalysisError(f"goal variables {sorted(missing)} are not covered by the initial element")


def solve_abstract(program: Program, goal, chi0, domain: Domain | None = None, max_rounds: int = 10_000) -> AnalysisResult:
    """Least fixpoint restricted to the call patterns reachable from the query.

    Every reachable (atom, input) pair gets a table entry starting at bottom.
    Rounds recompute all entries until neither values nor the key set change.
    """
    domain = domain or sharing_domain()
    _require_query(goal, chi0)
    sem = Semantics(program, domain)
    table: dict = {}
    started = time.perf_counter()

    def lookup(atom, chi):
        if chi is BOT:
            return BOT
        key = (atom, chi)
        if key not in table:
            table[key] = BOT
        return table[key]

    rounds = 0
    while True:
        rounds += 1
        if rounds > max_rounds:
            raise AnalysisError("fixpoint iteration did not stabilise")
        before = len(table)
        answer = _check(sem.body(goal, lookup, chi0), "query")
        changed = False
        for key in list(table):
            atom, chi = key
            old = table[key]
            new = _check(domain.lub(old, sem.step(lookup, atom, chi)), "least upper bound")
            if new != old:
                table[key] = new
                changed = True
        if not changed and len(table) == before:
            break
    return AnalysisResult(answer, table, rounds, (time.perf_counter() - started) * 1000)


def solve_concrete(program: Program, goal, chi0, depth: int = 5, domain: Domain | None = None) -> AnalysisResult:
    """Evaluate the query against the ``depth``-th Kleene iterate of the concrete semantics."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    domain = domain or concrete_domain()
    _require_query(goal, chi0)
    sem = Semantics(program, domain)
    memo: dict = {}
    started = time.perf_counter()

    def denot(i):
        def d(atom, chi):
            if i == 0 or chi is BOT:
                return BOT
            key = (i, atom, chi)
            r = memo.get(key)
            if r is None:
                r = memo[key] = sem.step(denot(i - 1), atom, chi)
            return r

        return d

    answer = _check(sem.body(goal, denot(depth), chi0), "query")
    table = {(a, c): v for (i, a, c), v in memo.items() if i == depth}
    return AnalysisResult(answer, table, depth, (time.perf_counter() - started) * 1000)


def solve_exhaustive(program: Program, goal, chi0, universe: list, domain: Domain) -> AnalysisResult:
    """Kleene iteration over a fully enumerated finite table, for cross-checking the tabulation.

    ``universe`` lists every (atom, input) key of the full table.
    """
    sem = Semantics(program, domain, check_relevance=False)
    table = {k: BOT for k in universe}

    def lookup(atom, chi):
        if chi is BOT:
            return BOT
        if (atom, chi) not in table:
            raise AnalysisError(f"call pattern {term_str(atom)} / {chi!r} outside the enumerated table")
        return table[(atom, chi)]

    rounds = 0
    while True:
        rounds += 1
        new_table = {k: domain.lub(v, sem.step(lookup, *k)) for k, v in table.items()}
        if new_table == table:
            break
        table = new_table
    return AnalysisResult(sem.body(goal, lookup, chi0), table, rounds)
