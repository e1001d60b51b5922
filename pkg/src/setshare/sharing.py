"""The set-sharing abstract domain and its unification, matching, projection and renaming."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .concrete import BOT, TOP, PSet
from .exsubst import ExSubst, canonicalize
from .subst import Renaming, Substitution, is_idempotent, mgu_atoms
from .syntax import Fn, Var, fresh_var, uvars_of, vars_of

EMPTY_GROUP = frozenset()
GROUND = Fn("$a")


@dataclass(frozen=True)
class Sh:
    """``[S, U]``: a set of sharing groups over the variables ``U``.

    ``S`` either is empty (no substitution at all) or contains the empty
    group. The constructor restores the empty group when needed.
    """

    groups: frozenset
    U: frozenset

    def __post_init__(self):
        for g in self.groups:
            if not g <= self.U:
                raise ValueError(f"group {sorted(g)} is not contained in {sorted(self.U)}")
        if self.groups and EMPTY_GROUP not in self.groups:
            object.__setattr__(self, "groups", self.groups | {EMPTY_GROUP})

    @property
    def is_empty(self) -> bool:
        return not self.groups

    def nonempty_groups(self) -> list:
        return sorted((g for g in self.groups if g), key=group_key)

    def __repr__(self):
        return f"Sh({format_groups(self)}, {{{' '.join(v.name for v in sorted(self.U))}}})"


def sh(groups: Iterable[Iterable[Var]], U: Iterable[Var]) -> Sh:
    return Sh(frozenset(frozenset(g) for g in groups), frozenset(U))


def group_key(g) -> tuple:
    vs = sorted(g)
    return (len(vs), vs)


def format_groups(s) -> str:
    if s is BOT:
        return "⊥"
    if s is TOP:
        return "⊤"
    if not s.groups:
        return "{}"
    gs = s.nonempty_groups()
    if not gs:
        return "{∅}"
    return "{" + ", ".join(" ".join(v.name for v in sorted(g)) for g in gs) + "}"


def top_sharing(U: Iterable[Var]) -> Sh:
    """Every variable alone in its own group: no aliasing at all."""
    U = frozenset(U)
    return Sh(frozenset({EMPTY_GROUP} | {frozenset((v,)) for v in U}), U)


# ---------------------------------------------------------------- group algebra


def rel(A: Iterable[frozenset], V: Iterable[Var]) -> set:
    V = V if isinstance(V, (set, frozenset)) else set(V)
    return {g for g in A if not g.isdisjoint(V)}


def bin_(A: Iterable[frozenset], B: Iterable[frozenset]) -> set:
    B = list(B)
    return {a | b for a in A for b in B}


def star(A: Iterable[frozenset]) -> set:
    """Closure under union of nonempty subsets of ``A``."""
    out: set = set()
    for g in A:
        out |= {g | r for r in out}
        out.add(g)
    return out


# ---------------------------------------------------------------- lattice


def sh_leq(a, b) -> bool:
    if a is BOT or b is TOP:
        return True
    if b is BOT or a is TOP:
        return False
    return a.U == b.U and a.groups <= b.groups


def sh_lub(a, b):
    if a is BOT:
        return b
    if b is BOT:
        return a
    if a is TOP or b is TOP or a.U != b.U:
        return TOP
    return Sh(a.groups | b.groups, a.U)


def sh_project(a, V: Iterable[Var]):
    if a is BOT or a is TOP:
        return a
    V = frozenset(V)
    return Sh(frozenset(g & V for g in a.groups), a.U & V)


def sh_rename(rho: Renaming, a):
    if a is BOT or a is TOP:
        return a
    return Sh(frozenset(rho.vars(g) for g in a.groups), rho.vars(a.U))


def sh_iota(a, V: Iterable[Var]):
    """Add the variables ``V`` as fresh, independent variables. An empty element stays empty."""
    if a is BOT or a is TOP:
        return a
    V = frozenset(V)
    if not a.groups:
        return Sh(a.groups, a.U | V)
    return Sh(a.groups | {frozenset((x,)) for x in V - a.U}, a.U | V)


# ---------------------------------------------------------------- abstraction


def alpha_ex(e: ExSubst) -> Sh:
    occ: dict = {}
    for u, t in e.items():
        for y in vars_of(t):
            occ.setdefault(y, set()).add(u)
    return Sh(frozenset({EMPTY_GROUP} | {frozenset(g) for g in occ.values()}), e.U)


def alpha(a):
    if a is BOT or a is TOP:
        return a
    out: set = set()
    for e in a.members:
        out |= alpha_ex(e).groups
    return Sh(frozenset(out), a.U)


def gamma_contains(s, e: ExSubst) -> bool:
    if s is BOT:
        return False
    if s is TOP:
        return True
    if s.U != e.U:
        raise ValueError(f"{e} is not over {sorted(s.U)}")
    return alpha_ex(e).groups <= s.groups


def witness_subst(X: Iterable[Var], U: Iterable[Var]) -> Substitution:
    """The substitution binding ``X`` to one shared fresh variable and grounding the rest of ``U``."""
    X = frozenset(X)
    w = fresh_var()
    return Substitution((x, w if x in X else GROUND) for x in sorted(U))


def gamma_witnesses(s: Sh) -> list:
    """One class in the concretization per group, together generating ``s`` under abstraction."""
    return [canonicalize(witness_subst(X, s.U), s.U) for X in sorted(s.groups, key=group_key)]


def gamma_member(K: Iterable[frozenset], U: Iterable[Var], shape: str = "var") -> ExSubst:
    """A class whose sharing groups are exactly ``K`` (plus the empty group).

    Each group gets its own fresh variable; a variable of ``U`` is bound to a
    term over the variables of its groups: the variable itself when it has a
    single group (``var``), a proper list (``list``) or a partial list
    (``open``). Variables in no group become the empty list.
    """
    U = frozenset(U)
    K = sorted((g for g in K if g), key=group_key)
    w = {g: fresh_var() for g in K}
    nil = Fn("[]")
    binding = {}
    for x in sorted(U):
        mine = [w[g] for g in K if x in g]
        if not mine:
            binding[x] = nil
        elif shape == "var" and len(mine) == 1:
            binding[x] = mine[0]
        elif shape == "open":
            t = mine[-1]
            for v in reversed(mine[:-1]):
                t = Fn(".", (v, t))
            binding[x] = Fn(".", (mine[0], t)) if len(mine) == 1 else t
        else:
            t = nil
            for v in reversed(mine):
                t = Fn(".", (v, t))
            binding[x] = t
    return canonicalize(binding, U)


def gamma_witness_pset(s: Sh):
    if s is BOT or s is TOP:
        return s
    return PSet(frozenset(gamma_witnesses(s)), s.U)


# ---------------------------------------------------------------- unification


def _bindings(delta) -> list:
    return list(delta.items()) if isinstance(delta, Mapping) else list(delta)


def u_sh(A: Iterable[frozenset], delta) -> set:
    """Standard abstract unification of a set of groups with a substitution, binding by binding."""
    S = set(A)
    for x, t in _bindings(delta):
        rx = rel(S, (x,))
        rt = rel(S, vars_of(t))
        S = (S - rx - rt) | bin_(star(rx), star(rt))
    return S


def sh_unif_std(a, delta):
    """Standard unification. Requires ``vars(delta)`` inside the variables of ``a``."""
    if a is BOT or a is TOP:
        return a
    dv = _delta_vars(delta)
    if not dv <= a.U:
        raise ValueError(f"variables {sorted(dv - a.U)} of the unifier are outside {sorted(a.U)}")
    if not a.groups:
        return a
    return Sh(frozenset(u_sh(a.groups, delta)), a.U)


def _delta_vars(delta) -> frozenset:
    out = set()
    for x, t in _bindings(delta):
        out.add(x)
        out |= vars_of(t)
    return frozenset(out)


def u_sh_free(S: set, free: set, delta, refine: bool = True) -> set:
    """Unification that tracks the set of variables known to be free and unaliased.

    With ``refine`` the groups used for the linear free part of a term skip
    those that also meet the rest of the term: every union they would
    contribute is produced by the ``Z`` terms anyway, so the result is the
    same. Keeping only groups entirely inside ``Y`` would not be exact, since
    a free variable may already share with a variable bound earlier.
    """
    S = set(S)
    free = set(free)
    for x, t in _bindings(delta):
        tv = vars_of(t)
        rx = rel(S, (x,))
        rt = rel(S, tv)
        rest = S - rx - rt
        if x in free:
            S = rest | bin_(rx, rt)
            free.discard(x)
        else:
            Y = uvars_of(t) & free
            Z = tv - Y
            rz = rel(S, Z)
            ry = rel(S, Y)
            if refine:
                ry -= rz
            xs = star(rx)
            ys = star(ry)
            zs = star(rz)
            xz = bin_(xs, zs)
            S = rest | bin_(rx, ys) | xz | bin_(xz, ys)
            free -= tv
            free.discard(x)
    return S


def sh_unif_opt(a, delta, refine: bool = True):
    """Optimal unification with a substitution whose new variables are free."""
    if a is BOT or a is TOP:
        return a
    if not is_idempotent(dict(_bindings(delta))):
        raise ValueError(f"unifier {delta} is not idempotent")
    new = _delta_vars(delta) - a.U
    U = a.U | new
    if not a.groups:
        return Sh(frozenset(), U)
    S = set(a.groups) | {frozenset((x,)) for x in new}
    return Sh(frozenset(u_sh_free(S, new, delta, refine)), U)


def sh_match(a1, a2):
    """Abstract matching of an exit element ``a1`` against a call element ``a2``."""
    if a1 is BOT or a2 is BOT:
        return BOT
    if a1 is TOP or a2 is TOP:
        return TOP
    U1, U2 = a1.U, a2.U
    U = U1 | U2
    if not a1.groups or not a2.groups:
        return Sh(frozenset(), U)
    s1p = {g for g in a1.groups if g.isdisjoint(U2)}
    s1pp = a1.groups - s1p
    s2p = {g for g in a2.groups if g.isdisjoint(U1)}
    s2pp = a2.groups - s2p
    out = s1p | s2p
    by_trace: dict = {}
    for g in star(s2pp):
        by_trace.setdefault(g & U1, []).append(g)
    for x1 in s1pp:
        for x2 in by_trace.get(x1 & U2, ()):
            out.add(x1 | x2)
    return Sh(frozenset(out), U)


# ---------------------------------------------------------------- forward / backward


def sh_forward(chi, a1: Fn, a2: Fn, variant: str = "opt"):
    """Entry element for calling ``a1`` under ``chi`` against the head ``a2``."""
    if chi is BOT or chi is TOP:
        return chi
    rho = Renaming.fresh_for(chi.U | vars_of(a1))
    ra1 = rho(a1)
    delta = mgu_atoms(ra1, a2)
    if delta is None:
        return BOT
    rc = sh_rename(rho, chi)
    if variant == "opt":
        r = sh_unif_opt(rc, delta)
    elif variant == "std":
        r = sh_unif_std(sh_iota(rc, vars_of(ra1) | vars_of(a2)), delta)
    else:
        raise ValueError(f"unknown forward variant {variant!r}")
    return sh_project(r, vars_of(a2))


def sh_backward(exit_, call, a1: Fn, a2: Fn, variant: str = "opt"):
    """Success element of ``a2`` under ``call`` given the exit element of the head ``a1``."""
    if exit_ is BOT or call is BOT:
        return BOT
    if exit_ is TOP or call is TOP:
        return TOP
    rho = Renaming.fresh_for(exit_.U | vars_of(a1))
    delta = mgu_atoms(rho(a1), a2)
    if delta is None:
        return BOT
    re_ = sh_rename(rho, exit_)
    keep = call.U | vars_of(a2)
    if variant == "opt":
        r = sh_match(re_, sh_unif_opt(call, delta))
    elif variant == "std":
        if not re_.groups or not call.groups:
            r = Sh(frozenset(), re_.U | call.U)
        else:
            r = sh_unif_opt(Sh(re_.groups | call.groups, re_.U | call.U), delta)
    else:
        raise ValueError(f"unknown backward variant {variant!r}")
    return sh_project(r, keep)
