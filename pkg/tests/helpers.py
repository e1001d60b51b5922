"""Small constructors that keep the tests readable."""

from setshare.cli import parse_bindings
from setshare.exsubst import canonicalize
from setshare.sharing import Sh
from setshare.syntax import parse_goal, parse_program, parse_term, user_var


def vs(names):
    """``vs("X Y Z")`` is the set of those user variables."""
    return frozenset(user_var(n) for n in names.split())


def V(name):
    return user_var(name)


def T(text):
    return parse_term(text)


def S(text):
    """``S("X=a, Y=f(Z)")`` is the substitution with those bindings."""
    return parse_bindings(text)


def E(text, U):
    """The class of ``S(text)`` over the variables named in ``U``."""
    return canonicalize(S(text), vs(U))


def groups(spec):
    """``groups("X Y, Y Z")``; an empty spec gives no groups. The empty group is added by ``Sh``."""
    out = set()
    for part in spec.split(","):
        if part.strip():
            out.add(vs(part))
    return frozenset(out)


def G(spec, U):
    """A sharing element with the groups of ``spec`` over ``U``."""
    return Sh(groups(spec) | {frozenset()}, vs(U))


def nonempty(a):
    return {g for g in a.groups if g}


def P(src):
    return parse_program(src)


def Q(src):
    return parse_goal(src)
