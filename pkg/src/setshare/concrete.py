"""The concrete collecting domain: sets of existential substitutions over a fixed variable set."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .exsubst import (
    ExSubst,
    canonicalize,
    ex_leq,
    ex_mgu,
    ex_project,
    ex_rename,
    identity,
)
from .subst import Renaming, mgu_atoms
from .syntax import Fn, Var, vars_of


class AnalysisError(Exception):
    """Raised when an operator precondition or an integrity check fails."""


class _Extreme:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label

    def __repr__(self):
        return self.label

    def __reduce__(self):
        return self.label


BOT = _Extreme("BOT")
TOP = _Extreme("TOP")


@dataclass(frozen=True)
class PSet:
    """``[Theta, U]``: a set of classes all over ``U``."""

    members: frozenset
    U: frozenset

    def __post_init__(self):
        for e in self.members:
            if e.U != self.U:
                raise AnalysisError(f"member {e} is not over {sorted(self.U)}")

    def __repr__(self):
        body = ", ".join(repr(e) for e in sorted(self.members))
        return f"PSet({{{body}}}, {sorted(self.U)})"


def pset(members: Iterable[ExSubst], U: Iterable[Var]) -> PSet:
    return PSet(frozenset(members), frozenset(U))


def from_substs(substs: Iterable[Mapping], U: Iterable[Var]) -> PSet:
    U = frozenset(U)
    return PSet(frozenset(canonicalize(s, U) for s in substs), U)


def ps_leq(a, b) -> bool:
    if a is BOT or b is TOP:
        return True
    if b is BOT or a is TOP:
        return False
    return a.U == b.U and a.members <= b.members


def ps_lub(a, b):
    if a is BOT:
        return b
    if b is BOT:
        return a
    if a is TOP or b is TOP or a.U != b.U:
        return TOP
    return PSet(a.members | b.members, a.U)


def ps_project(a, V: Iterable[Var]):
    if a is BOT or a is TOP:
        return a
    V = frozenset(V)
    return PSet(frozenset(ex_project(e, V) for e in a.members), a.U & V)


def ps_rename(rho: Renaming, a):
    if a is BOT or a is TOP:
        return a
    return PSet(frozenset(ex_rename(rho, e) for e in a.members), rho.vars(a.U))


def ps_unif(a, delta: Mapping):
    """Unify every member with ``[delta]_vars(delta)``, dropping failures."""
    if a is BOT or a is TOP:
        return a
    dv = frozenset(delta) | vars_of(tuple(delta.values()))
    d = canonicalize(delta, dv)
    out = set()
    for e in a.members:
        r = ex_mgu(e, d)
        if r is not None:
            out.add(r)
    return PSet(frozenset(out), a.U | dv)


def ps_iota(a, V: Iterable[Var]):
    """Extend the variables of ``a`` with ``V``, new variables left free."""
    if a is BOT or a is TOP:
        return a
    V = frozenset(V)
    eps = identity(V)
    out = {ex_mgu(e, eps) for e in a.members}
    return PSet(frozenset(out), a.U | V)


def ps_match(a1, a2):
    """Keep the mgus of the pairs whose first component is more instantiated on the common variables."""
    if a1 is BOT or a2 is BOT:
        return BOT
    if a1 is TOP or a2 is TOP:
        return TOP
    W = a1.U & a2.U
    out = set()
    for e1 in a1.members:
        for e2 in a2.members:
            if ex_leq(e1, e2, W):
                r = ex_mgu(e1, e2)
                if r is not None:
                    out.add(r)
    return PSet(frozenset(out), a1.U | a2.U)


def ps_unif3(a1, a2, delta: Mapping):
    """Pointwise mgu of members of ``a1``, members of ``a2`` and ``delta``, without filtering."""
    if a1 is BOT or a2 is BOT:
        return BOT
    if a1 is TOP or a2 is TOP:
        return TOP
    dv = frozenset(delta) | vars_of(tuple(delta.values()))
    d = canonicalize(delta, dv)
    out = set()
    for e1 in a1.members:
        for e2 in a2.members:
            r = ex_mgu(e1, e2)
            if r is not None:
                r = ex_mgu(r, d)
                if r is not None:
                    out.add(r)
    return PSet(frozenset(out), a1.U | a2.U | dv)


def ps_forward(chi, a1: Fn, a2: Fn):
    """Entry substitution for calling ``a1`` under ``chi`` against a clause head ``a2``."""
    if chi is BOT or chi is TOP:
        return chi
    rho = Renaming.fresh_for(chi.U | vars_of(a1))
    delta = mgu_atoms(rho(a1), a2)
    if delta is None:
        return BOT
    return ps_project(ps_unif(ps_rename(rho, chi), delta), vars_of(a2))


def ps_backward(exit_, call, a1: Fn, a2: Fn, variant: str = "match"):
    """Success substitution of ``a2`` under ``call`` given the exit ``exit_`` of callee ``a1``."""
    if exit_ is BOT or call is BOT:
        return BOT
    if exit_ is TOP or call is TOP:
        return TOP
    rho = Renaming.fresh_for(exit_.U | vars_of(a1))
    delta = mgu_atoms(rho(a1), a2)
    if delta is None:
        return BOT
    keep = call.U | vars_of(a2)
    if variant == "match":
        r = ps_match(ps_rename(rho, exit_), ps_unif(call, delta))
    elif variant == "unif":
        r = ps_unif3(ps_rename(rho, exit_), call, delta)
    else:
        raise ValueError(f"unknown backward variant {variant!r}")
    return ps_project(r, keep)


def ps_backward_unif(exit_, call, a1: Fn, a2: Fn):
    return ps_backward(exit_, call, a1, a2, variant="unif")
