"""Substitutions, Robinson unification and renamings."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from .syntax import Fn, Var, fresh_var, term_str, vars_of


class Substitution(Mapping):
    """An immutable finite map from variables to terms.

    Bindings ``x/x`` are dropped on construction. Insertion order is kept
    and is the order in which bindings are processed by the abstract
    unification operators.
    """

    __slots__ = ("_hash", "_map")

    def __init__(self, bindings=()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._map = {x: t for x, t in items if t is not x}
        self._hash = None

    def __getitem__(self, v):
        return self._map[v]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __call__(self, t):
        return apply(self, t)

    def dom(self) -> frozenset:
        return frozenset(self._map)

    def rng(self) -> frozenset:
        return vars_of(tuple(self._map.values()))

    def vars(self) -> frozenset:
        return self.dom() | self.rng()

    def __repr__(self):
        inner = ", ".join(f"{x}/{term_str(t)}" for x, t in sorted(self._map.items()))
        return "{" + inner + "}"


EMPTY = Substitution()


def apply(s: Mapping, t):
    """Apply ``s`` to a term (simultaneous, one step)."""
    if isinstance(t, Var):
        return s.get(t, t)
    if not t.args:
        return t
    new = tuple(apply(s, a) for a in t.args)
    if all(a is b for a, b in zip(new, t.args)):
        return t
    return Fn(t.name, new)


def compose(s2: Mapping, s1: Mapping) -> Substitution:
    """``s2 . s1``: first ``s1``, then ``s2``."""
    out = {x: apply(s2, t) for x, t in s1.items()}
    for x, t in s2.items():
        if x not in out:
            out[x] = t
    return Substitution(out)


def restrict(s: Mapping, vs: Iterable[Var]) -> Substitution:
    vs = set(vs)
    return Substitution((x, t) for x, t in s.items() if x in vs)


def is_idempotent(s: Mapping) -> bool:
    dom = set(s.keys())
    return not any(vars_of(t) & dom for t in s.values())


def occ(s: Mapping, y: Var, universe: Iterable[Var]) -> frozenset:
    """Variables of ``universe`` whose image under ``s`` contains ``y``."""
    return frozenset(x for x in universe if y in vars_of(apply(s, x)))


# ---------------------------------------------------------------- unification


def _walk(b: dict, t):
    while isinstance(t, Var):
        nxt = b.get(t)
        if nxt is None:
            return t
        t = nxt
    return t


def _occurs(b: dict, v: Var, t) -> bool:
    stack = [t]
    while stack:
        s = _walk(b, stack.pop())
        if s is v:
            return True
        if isinstance(s, Fn):
            stack.extend(s.args)
    return False


def _unify_into(b: dict, pairs: list) -> bool:
    stack = list(reversed(pairs))
    while stack:
        l, r = stack.pop()
        l = _walk(b, l)
        r = _walk(b, r)
        if l is r:
            continue
        if isinstance(l, Var):
            if _occurs(b, l, r):
                return False
            b[l] = r
        elif isinstance(r, Var):
            if _occurs(b, r, l):
                return False
            b[r] = l
        else:
            if l.name != r.name or len(l.args) != len(r.args):
                return False
            stack.extend(reversed(list(zip(l.args, r.args))))
    return True


def _resolve(b: dict) -> Substitution:
    memo: dict = {}

    def full(t):
        if isinstance(t, Var):
            if t in memo:
                return memo[t]
            nxt = b.get(t)
            res = t if nxt is None else full(nxt)
            memo[t] = res
            return res
        if not t.args:
            return t
        return Fn(t.name, tuple(full(a) for a in t.args))

    return Substitution((x, full(x)) for x in b)


def mgu_eqs(eqs: Iterable[tuple]) -> Substitution | None:
    """Most general idempotent unifier of a list of term equations, or None.

    Variable-variable pairs bind the left variable to the right one, so the
    result is deterministic for a given equation order.
    """
    b: dict = {}
    if not _unify_into(b, list(eqs)):
        return None
    return _resolve(b)


def mgu_atoms(a1: Fn, a2: Fn) -> Substitution | None:
    if a1.name != a2.name or len(a1.args) != len(a2.args):
        return None
    return mgu_eqs(zip(a1.args, a2.args))


def subst_eqs(s: Mapping) -> list:
    return [(x, t) for x, t in s.items()]


def mgu_substs(*substs: Mapping) -> Substitution | None:
    """mgu of the union of the equation sets of the given substitutions."""
    eqs = []
    for s in substs:
        eqs.extend(subst_eqs(s))
    return mgu_eqs(eqs)


def match(pattern, target, binding: dict | None = None) -> dict | None:
    """One-sided matching: find ``d`` with ``d(pattern) == target``.

    Variables of ``target`` are treated as constants. ``binding`` is extended
    in place and returned, or None on failure.
    """
    b = {} if binding is None else binding
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            cur = b.get(p)
            if cur is None:
                b[p] = t
            elif cur != t:
                return None
        elif isinstance(t, Var) or p.name != t.name or len(p.args) != len(t.args):
            return None
        else:
            stack.extend(zip(p.args, t.args))
    return b


# ---------------------------------------------------------------- renamings


class Renaming:
    """A bijective variable renaming, stored as a finite permutation."""

    __slots__ = ("_fwd",)

    def __init__(self, pairs):
        fwd = dict(pairs.items() if isinstance(pairs, Mapping) else pairs)
        if len(set(fwd.values())) != len(fwd):
            raise ValueError("renaming is not injective")
        # close into a permutation so that the map is a bijection on all variables
        img = set(fwd.values())
        missing_src = [v for v in img if v not in fwd]
        free_tgt = [v for v in fwd if v not in img]
        for a, b in zip(missing_src, free_tgt):
            fwd[a] = b
        self._fwd = {x: y for x, y in fwd.items() if x is not y}

    @classmethod
    def fresh_for(cls, vs: Iterable[Var]) -> Renaming:
        """Rename every variable of ``vs`` to a brand-new fresh variable."""
        return cls({v: fresh_var() for v in sorted(vs)})

    def __call__(self, x):
        if isinstance(x, Var):
            return self._fwd.get(x, x)
        return apply(self._fwd, x)

    def var(self, v: Var) -> Var:
        return self._fwd.get(v, v)

    def vars(self, vs: Iterable[Var]) -> frozenset:
        return frozenset(self._fwd.get(v, v) for v in vs)

    def inverse(self) -> Renaming:
        return Renaming({y: x for x, y in self._fwd.items()})

    def as_subst(self) -> Substitution:
        return Substitution(self._fwd)

    def items(self):
        return self._fwd.items()

    def __repr__(self):
        return "{" + ", ".join(f"{x}/{y}" for x, y in sorted(self._fwd.items())) + "}"


def rename_apply(rho: Renaming, s: Mapping) -> Substitution:
    """``rho . s . rho^-1``, the renaming of a substitution."""
    return Substitution((rho.var(x), rho(t)) for x, t in s.items())
