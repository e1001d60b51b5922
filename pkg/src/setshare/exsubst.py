"""Existential substitutions: substitutions up to renaming, seen through a set of variables.

A class ``[s]_U`` is determined by the tuple ``(s(u))`` for ``u`` in ``U``,
up to a consistent renaming of all variables in that tuple. The canonical
representative renames those variables, in order of first occurrence, to
local variables ``_1, _2, ...``. Two classes are equal iff their variable
sets and canonical tuples coincide.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from .subst import Renaming, Substitution, apply, match, mgu_eqs
from .syntax import (
    LOCAL,
    Fn,
    Var,
    local_var,
    term_str,
    uvars_of,
    var_occurrences,
    vars_of,
)


def _renumber(terms: tuple, start: int = 0) -> tuple:
    """Rename all variables in ``terms`` to locals by first occurrence."""
    m: dict = {}

    def go(t):
        if isinstance(t, Var):
            v = m.get(t)
            if v is None:
                v = m[t] = local_var(start + len(m) + 1)
            return v
        if not t.args:
            return t
        return Fn(t.name, tuple(go(a) for a in t.args))

    return tuple(go(t) for t in terms), len(m)


class ExSubst:
    """Canonical existential substitution ``[s]_U``."""

    __slots__ = ("U", "_hash", "nlocal", "terms", "vars_sorted")

    def __init__(self, U: Iterable[Var], terms: tuple, _canonical: bool = False):
        vs = tuple(sorted(U))
        if not _canonical:
            terms, n = _renumber(tuple(terms))
        else:
            n = len({v for t in terms for v in var_occurrences(t)})
        self.vars_sorted = vs
        self.U = frozenset(vs)
        self.terms = terms
        self.nlocal = n
        self._hash = hash((vs, terms))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, ExSubst)
            and self._hash == other._hash
            and self.vars_sorted == other.vars_sorted
            and self.terms == other.terms
        )

    def __lt__(self, other):
        return (self.vars_sorted, str(self)) < (other.vars_sorted, str(other))

    def image(self, u: Var):
        """Canonical image of ``u``; variables outside ``U`` map to themselves."""
        try:
            return self.terms[self.vars_sorted.index(u)]
        except ValueError:
            return u

    def items(self):
        return zip(self.vars_sorted, self.terms)

    @property
    def rep(self) -> Substitution:
        return Substitution(self.items())

    def __repr__(self):
        inner = ", ".join(f"{u}/{term_str(t)}" for u, t in self.items() if t is not u)
        return "[{" + inner + "}]_{" + " ".join(v.name for v in self.vars_sorted) + "}"


def canonicalize(s: Mapping, U: Iterable[Var]) -> ExSubst:
    """The class ``[s]_U`` of any substitution ``s`` (idempotent or not)."""
    vs = sorted(U)
    return ExSubst(vs, tuple(apply(s, u) for u in vs))


def identity(U: Iterable[Var]) -> ExSubst:
    return canonicalize({}, U)


def ex_project(e: ExSubst, V: Iterable[Var]) -> ExSubst:
    V = set(V)
    keep = [(u, t) for u, t in e.items() if u in V]
    return ExSubst([u for u, _ in keep], tuple(t for _, t in keep))


def ex_rename(rho: Renaming, e: ExSubst) -> ExSubst:
    pairs = sorted((rho.var(u), t) for u, t in e.items())
    return ExSubst([u for u, _ in pairs], tuple(t for _, t in pairs))


def ex_mgu(e1: ExSubst, e2: ExSubst) -> ExSubst | None:
    """Most general unifier of two classes over ``U1 | U2``, or None on failure."""
    shift = {local_var(i): local_var(i + e1.nlocal) for i in range(1, e2.nlocal + 1)}
    t2 = {u: apply(shift, t) for u, t in e2.items()}
    t1 = dict(e1.items())
    eqs = [(t1[u], t2[u]) for u in e1.vars_sorted if u in t2]
    s = mgu_eqs(eqs)
    if s is None:
        return None
    t1.update((u, t) for u, t in t2.items() if u not in t1)
    vs = sorted(t1)
    return ExSubst(vs, tuple(apply(s, t1[u]) for u in vs))


def ex_mgu_subst(e: ExSubst, s: Mapping) -> ExSubst | None:
    """``mgu(e, [s]_vars(s))``."""
    return ex_mgu(e, canonicalize(s, _subst_vars(s)))


def _subst_vars(s: Mapping) -> frozenset:
    return frozenset(s) | vars_of(tuple(s.values()))


def ex_leq(e1: ExSubst, e2: ExSubst, W: Iterable[Var] | None = None) -> bool:
    """``e1`` is at least as instantiated as ``e2`` on ``W``.

    Holds iff some substitution ``d`` maps the image of every ``u`` in ``W``
    under ``e2`` onto its image under ``e1``. Variables outside a class's
    domain are their own image. ``W`` defaults to ``U1 & U2``.
    """
    W = (e1.U & e2.U) if W is None else W
    b: dict = {}
    for u in sorted(W):
        if match(e2.image(u), e1.image(u), b) is None:
            return False
    return True


def ex_equal(e1: ExSubst, e2: ExSubst) -> bool:
    return e1 == e2


def var_status(e: ExSubst, x: Var) -> dict:
    """Freeness, independence and unusedness of ``x`` in ``e``."""
    if x not in e.U:
        raise ValueError(f"{x} is not among the variables of {e}")
    t = e.image(x)
    vs = vars_of(t)
    indep = frozenset(u for u, s in e.items() if u is not x and vars_of(s).isdisjoint(vs))
    free = isinstance(t, Var)
    return {
        "free": free,
        "ground": not vs,
        "linear": vs == uvars_of(t),
        "independent_of": indep,
        "unused": free and indep == e.U - {x},
    }


def is_local(v: Var) -> bool:
    return v.kind == LOCAL
