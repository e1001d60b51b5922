"""Constructive optimality witnesses for the refined abstract unification.

For a group ``X`` in the result of unifying ``[S1, U1]`` with ``theta``, we
build one concrete substitution ``delta`` whose own sharing is drawn from
``S1`` and whose unification with ``theta`` really produces ``X``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .exsubst import canonicalize, ex_mgu
from .sharing import GROUND, alpha_ex, group_key, sh_unif_opt
from .subst import Substitution, apply
from .syntax import Fn, Var, fresh_var, uvars_of, vars_of

PAIR = "$c"


@dataclass(frozen=True)
class WitnessPlan:
    X: frozenset
    U1: frozenset
    K1: tuple
    carriers: tuple  # (y, x_y) pairs

    @property
    def X1(self) -> frozenset:
        return self.X & self.U1


def _image(theta: Mapping, x: Var):
    return apply(theta, x)


def related(b1: frozenset, b2: frozenset, theta: Mapping, X: frozenset) -> bool:
    """Whether ``theta`` can merge the groups ``b1`` and ``b2`` inside ``X``."""
    for x1 in b1:
        t1 = _image(theta, x1)
        v1 = vars_of(t1) & X
        if not v1:
            continue
        for x2 in b2:
            common = v1 & vars_of(_image(theta, x2))
            if x1 is x2:
                common -= uvars_of(t1)
            if common:
                return True
    return False


def connected_decomposition(S1, U1, theta: Mapping, X) -> WitnessPlan | None:
    """Groups of ``S1`` covering ``X & U1`` that are connected by ``related``, or None."""
    X, U1 = frozenset(X), frozenset(U1)
    X1 = X & U1
    theta = Substitution(theta)
    if not X1:
        return WitnessPlan(X, U1, (), ())
    cands = sorted((g for g in S1 if g and g <= X1), key=group_key)
    parent = list(range(len(cands)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            if find(i) != find(j) and related(cands[i], cands[j], theta, X):
                parent[find(i)] = find(j)
    comps: dict = {}
    for i, g in enumerate(cands):
        comps.setdefault(find(i), []).append(g)
    for comp in sorted(comps.values(), key=lambda c: (len(c), [group_key(g) for g in c])):
        if frozenset().union(*comp) == X1:
            return WitnessPlan(X, U1, tuple(comp), _carriers(theta, U1, X))
    return None


def _carriers(theta: Mapping, U1: frozenset, X: frozenset) -> tuple:
    out = {}
    for x in sorted(U1):
        for y in vars_of(_image(theta, x)) & X:
            out.setdefault(y, x)
    return tuple(sorted(out.items()))


def _chain(args: list):
    """Encode an n-ary tuple with one binary symbol and one constant."""
    t = GROUND
    for a in reversed(args):
        t = Fn(PAIR, (a, t))
    return t


def build_witness(plan: WitnessPlan, theta: Mapping) -> Substitution:
    theta = Substitution(theta)
    X, U1, X1 = plan.X, plan.U1, plan.X1
    if not frozenset().union(*plan.K1) == X1:
        raise ValueError("plan groups do not cover the target group")
    w = {B: fresh_var() for B in plan.K1}
    blocks = {x: [B for B in plan.K1 if x in B] for x in sorted(X1)}
    N = max((len(b) for b in blocks.values()), default=0)
    s, s2 = {}, {}
    for x, bx in blocks.items():
        k = len(bx)
        pad = [Fn(PAIR, (w[bx[0]], w[bx[0]]))] * (N - k)
        s[x] = _chain([Fn(PAIR, (w[B], w[B])) for B in bx] + pad)
        s2[x] = _chain([Fn(PAIR, (w[bx[i]], w[bx[(i + 1) % k]])) for i in range(k)] + pad)
    carrier = dict(plan.carriers)

    def rebuild(x, t, seen):
        if isinstance(t, Var):
            if t not in X:
                return GROUND
            i = seen[t] = seen.get(t, 0) + 1
            if x not in s:
                raise ValueError(f"{x} is outside the target group but its image mentions {t}")
            return s[x] if carrier.get(t) is x and i == 1 else s2[x]
        if not t.args:
            return t
        return Fn(t.name, tuple(rebuild(x, a, seen) for a in t.args))

    return Substitution((x, rebuild(x, _image(theta, x), {})) for x in sorted(U1))


def check_witness(delta: Mapping, theta: Mapping, S1, U1, X) -> bool:
    """``delta`` is described by ``S1`` and its unification with ``theta`` yields the group ``X``."""
    U1 = frozenset(U1)
    d = canonicalize(delta, U1)
    if not alpha_ex(d).groups <= frozenset(S1) | {frozenset()}:
        return False
    theta = Substitution(theta)
    U = U1 | theta.vars()
    m = ex_mgu(d, canonicalize(theta, U))
    return m is not None and frozenset(X) in alpha_ex(m).groups


def witness_for(S1, U1, theta: Mapping, X) -> Substitution | None:
    plan = connected_decomposition(S1, U1, theta, X)
    return None if plan is None else build_witness(plan, theta)


def witness_all(s1, theta: Mapping) -> dict:
    """Witness for every group of the abstract unification of ``s1`` with ``theta``."""
    res = sh_unif_opt(s1, theta)
    return {X: witness_for(s1.groups, s1.U, theta, X) for X in sorted(res.groups, key=group_key)}
