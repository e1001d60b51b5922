"""Terms, atoms, clauses and a parser for a small Edinburgh-style subset.

Variables come in three kinds:

* user variables, named in source text;
* fresh variables from a process-wide supply, used to rename clauses apart
  (rendered ``_G<n>``);
* local variables, used only inside the canonical representatives of
  existential substitutions (rendered ``_<n>``).

Both generated renderings are rejected by the parser, so generated names can
never capture a user name.
"""

from __future__ import annotations

import itertools
import re
import threading
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import ClassVar

USER, FRESH, LOCAL = 0, 1, 2

RESERVED_FUNCTORS = {("$a", 0), ("$c", 2)}
LIST_CONS = "."
LIST_NIL = "[]"

_GENERATED_NAME = re.compile(r"^_(G)?\d+$")


class Var:
    """A variable. Instances are interned, so identity equals equality."""

    __slots__ = ("_hash", "key", "kind")
    _pool: ClassVar[dict] = {}
    _lock = threading.Lock()

    def __new__(cls, kind: int, key):
        k = (kind, key)
        v = cls._pool.get(k)
        if v is None:
            with cls._lock:
                v = cls._pool.get(k)
                if v is None:
                    v = object.__new__(cls)
                    v.kind = kind
                    v.key = key
                    v._hash = hash(k)
                    cls._pool[k] = v
        return v

    def __reduce__(self):
        return (Var, (self.kind, self.key))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __lt__(self, other: Var):
        return (self.kind, self.key) < (other.kind, other.key)

    def __le__(self, other: Var):
        return (self.kind, self.key) <= (other.kind, other.key)

    def __gt__(self, other: Var):
        return (self.kind, self.key) > (other.kind, other.key)

    def __ge__(self, other: Var):
        return (self.kind, self.key) >= (other.kind, other.key)

    @property
    def name(self) -> str:
        if self.kind == USER:
            return self.key
        if self.kind == FRESH:
            return f"_G{self.key}"
        return f"_{self.key}"

    def __repr__(self):
        return self.name

    __str__ = __repr__


def user_var(name: str) -> Var:
    return Var(USER, name)


def local_var(i: int) -> Var:
    return Var(LOCAL, i)


class Fn:
    """A compound term or constant ``name(args...)``. Atoms use the same class."""

    __slots__ = ("_hash", "_vars", "args", "name")

    def __init__(self, name: str, args: tuple = ()):
        self.name = name
        self.args = tuple(args)
        self._hash = hash((name, self.args))
        self._vars = None

    @property
    def arity(self) -> int:
        return len(self.args)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Fn)
            and self._hash == other._hash
            and self.name == other.name
            and self.args == other.args
        )

    def __repr__(self):
        return term_str(self)


Term = Var | Fn
Atom = Fn


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple = ()

    def __str__(self):
        if not self.body:
            return f"{term_str(self.head)}."
        return f"{term_str(self.head)} :- {', '.join(term_str(b) for b in self.body)}."


@dataclass(frozen=True)
class Program:
    clauses: tuple

    def __iter__(self):
        return iter(self.clauses)

    def predicates(self) -> set:
        return {(c.head.name, c.head.arity) for c in self.clauses}

    def clauses_for(self, name: str, arity: int) -> list:
        return [c for c in self.clauses if c.head.name == name and c.head.arity == arity]

    def __str__(self):
        return "\n".join(str(c) for c in self.clauses)


def signature(*objs) -> set:
    """Function symbols with arities, plus the reserved witness symbols."""
    sig = set(RESERVED_FUNCTORS)
    stack = list(objs)
    while stack:
        o = stack.pop()
        if isinstance(o, Program):
            for c in o.clauses:
                stack.extend(c.head.args)
                for b in c.body:
                    stack.extend(b.args)
        elif isinstance(o, Fn):
            sig.add((o.name, len(o.args)))
            stack.extend(o.args)
        elif isinstance(o, (tuple, list)):
            stack.extend(a for x in o for a in (x.args if isinstance(x, Fn) else (x,)))
    return sig


# ---------------------------------------------------------------- variables


def vars_of(t) -> frozenset:
    """All variables of a term, atom, tuple of terms or clause."""
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, Fn):
        if t._vars is None:
            acc = set()
            for a in t.args:
                acc |= vars_of(a)
            t._vars = frozenset(acc)
        return t._vars
    if isinstance(t, Clause):
        acc = set(vars_of(t.head))
        for b in t.body:
            acc |= vars_of(b)
        return frozenset(acc)
    acc = set()
    for x in t:
        acc |= vars_of(x)
    return frozenset(acc)


def var_occurrences(t) -> Iterator[Var]:
    """Variables of ``t`` left to right, with repetitions."""
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            yield s
        else:
            stack.extend(reversed(s.args))


def uvars_of(t) -> frozenset:
    """Variables occurring exactly once in ``t`` (linear variables)."""
    seen, dup = set(), set()
    for v in var_occurrences(t):
        if v in seen:
            dup.add(v)
        seen.add(v)
    return frozenset(seen - dup)


def is_ground(t) -> bool:
    return not vars_of(t)


def term_depth(t) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def goal_vars(goal: Iterable[Atom]) -> frozenset:
    return vars_of(tuple(goal))


class FreshSupply:
    """Thread-safe source of fresh variables."""

    def __init__(self):
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def fresh(self) -> Var:
        with self._lock:
            return Var(FRESH, next(self._counter))

    def fresh_many(self, n: int) -> list:
        with self._lock:
            return [Var(FRESH, next(self._counter)) for _ in range(n)]


SUPPLY = FreshSupply()


def fresh_var() -> Var:
    return SUPPLY.fresh()


# ---------------------------------------------------------------- printing

_PLAIN_ATOM = re.compile(r"^[a-z][A-Za-z0-9_]*$")
_NUMBER = re.compile(r"^\d+$")


def _atom_name(name: str) -> str:
    if _PLAIN_ATOM.match(name) or _NUMBER.match(name) or name == LIST_NIL:
        return name
    if name.startswith("$"):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def term_str(t) -> str:
    if isinstance(t, Var):
        return t.name
    if t.name == LIST_CONS and len(t.args) == 2:
        items = []
        cur = t
        while isinstance(cur, Fn) and cur.name == LIST_CONS and len(cur.args) == 2:
            items.append(term_str(cur.args[0]))
            cur = cur.args[1]
        inner = ", ".join(items)
        if isinstance(cur, Fn) and cur.name == LIST_NIL and not cur.args:
            return f"[{inner}]"
        return f"[{inner}|{term_str(cur)}]"
    if not t.args:
        return _atom_name(t.name)
    return f"{_atom_name(t.name)}({', '.join(term_str(a) for a in t.args)})"


def goal_str(goal) -> str:
    return ", ".join(term_str(a) for a in goal)


# ---------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<punct>[(),|\[\].])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    end: int = 0


def _tokenize(src: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "quoted":
                text = re.sub(r"\\(.)", r"\1", text[1:-1])
            toks.append(_Tok(kind, text, line, pos - line_start + 1, m.end()))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0
        self.anon = 0
        self.names: set = set()

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.kind not in ("punct", "neck") or t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("punct", "neck") and t.text == text

    def functor_name(self, tok: _Tok, arity: int) -> str:
        name = tok.text
        if name.startswith("$") or (name, arity) in RESERVED_FUNCTORS:
            self.error(f"reserved symbol {name!r}", tok)
        return name

    def term(self):
        t = self.peek()
        if t.kind == "var":
            self.next()
            if t.text == "_":
                self.anon += 1
                return _AnonMark(self.anon)
            if _GENERATED_NAME.match(t.text):
                self.error(f"variable name {t.text!r} is reserved for generated variables", t)
            self.names.add(t.text)
            return user_var(t.text)
        if t.kind == "num":
            self.next()
            return Fn(t.text)
        if t.kind in ("name", "quoted"):
            self.next()
            args = []
            if self.at("(") and self.toks[self.i].end == t.end + 1:
                self.next()
                args.append(self.term())
                while self.at(","):
                    self.next()
                    args.append(self.term())
                self.expect(")")
            return Fn(self.functor_name(t, len(args)), tuple(args))
        if self.at("["):
            self.next()
            if self.at("]"):
                self.next()
                return Fn(LIST_NIL)
            items = [self.term()]
            while self.at(","):
                self.next()
                items.append(self.term())
            tail = Fn(LIST_NIL)
            if self.at("|"):
                self.next()
                tail = self.term()
            self.expect("]")
            for it in reversed(items):
                tail = Fn(LIST_CONS, (it, tail))
            return tail
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def atom(self):
        t = self.peek()
        if t.kind not in ("name", "quoted"):
            self.error(f"expected an atom, found {t.text or 'end of input'!r}")
        a = self.term()
        return a

    def body(self) -> list:
        atoms = [self.atom()]
        while self.at(","):
            self.next()
            atoms.append(self.atom())
        return atoms

    def clause(self):
        head = self.atom()
        body = []
        if self.at(":-"):
            self.next()
            body = self.body()
        self.expect(".")
        return head, body

    def finish_anon(self, items):
        """Replace anonymous markers with user variables not clashing with any name."""
        names = self.names
        mapping = {}
        counter = itertools.count(1)

        def fresh_name():
            while True:
                n = f"_A{next(counter)}"
                if n not in names:
                    names.add(n)
                    return n

        def fix(t):
            if isinstance(t, _AnonMark):
                if t.n not in mapping:
                    mapping[t.n] = user_var(fresh_name())
                return mapping[t.n]
            if isinstance(t, Var) or not t.args:
                return t
            return Fn(t.name, tuple(fix(a) for a in t.args))

        return [fix(x) for x in items]


class _AnonMark:
    __slots__ = ("n",)

    def __init__(self, n):
        self.n = n


def parse_program(src: str) -> Program:
    p = _Parser(src)
    raw = []
    while p.peek().kind != "eof":
        raw.append(p.clause())
    clauses = []
    for head, body in raw:
        fixed = p.finish_anon([head, *body])
        clauses.append(Clause(fixed[0], tuple(fixed[1:])))
    return Program(tuple(clauses))


def parse_goal(src: str) -> tuple:
    """Parse a comma-separated conjunction of atoms. A trailing period is allowed."""
    p = _Parser(src)
    if p.peek().kind == "eof":
        return ()
    atoms = p.body()
    if p.at("."):
        p.next()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r} after goal")
    return tuple(p.finish_anon(atoms))


def parse_term(src: str):
    p = _Parser(src)
    t = p.term()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r} after term")
    return p.finish_anon([t])[0]
