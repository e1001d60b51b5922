"""Depth-bounded SLD resolution with the leftmost selection rule."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .exsubst import ExSubst
from .subst import Renaming, apply, mgu_atoms
from .syntax import Program, goal_vars, vars_of


@dataclass(frozen=True, order=True)
class SldAnswer:
    answer: ExSubst
    length: int


def solve(program: Program, goal, max_depth: int, init: Mapping | None = None) -> set:
    """Computed answers of refutations of at most ``max_depth`` steps.

    With ``init`` the query is ``goal`` instantiated by ``init`` and answers
    are the composition of the refutation with ``init``, seen on the goal
    variables. Each answer class is reported once, with its shortest length.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    init = init or {}
    gv = sorted(goal_vars(goal))
    start_goal = tuple(apply(init, a) for a in goal)
    start_terms = tuple(apply(init, v) for v in gv)
    by_class: dict = {}
    frontier = [(start_goal, start_terms)]
    for length in range(max_depth + 1):
        nxt = []
        for goals, terms in frontier:
            if not goals:
                e = ExSubst(gv, terms)
                if e not in by_class:
                    by_class[e] = length
                continue
            if length == max_depth:
                continue
            sel, rest = goals[0], goals[1:]
            for cl in program.clauses:
                if cl.head.name != sel.name or cl.head.arity != sel.arity:
                    continue
                rho = Renaming.fresh_for(vars_of(cl))
                s = mgu_atoms(sel, rho(cl.head))
                if s is None:
                    continue
                new_goals = tuple(apply(s, rho(b)) for b in cl.body) + tuple(apply(s, g) for g in rest)
                nxt.append((new_goals, tuple(apply(s, t) for t in terms)))
        frontier = nxt
    return {SldAnswer(e, n) for e, n in by_class.items()}


def answer_classes(program: Program, goal, max_depth: int, init: Mapping | None = None) -> set:
    return {a.answer for a in solve(program, goal, max_depth, init)}
