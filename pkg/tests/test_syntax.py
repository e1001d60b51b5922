import random

import pytest
from gen import POOL, rand_term
from helpers import T, V, vs

from setshare.syntax import (
    Fn,
    ParseError,
    Var,
    fresh_var,
    goal_vars,
    is_ground,
    parse_goal,
    parse_program,
    parse_term,
    signature,
    term_depth,
    term_str,
    uvars_of,
    var_occurrences,
    vars_of,
)


def test_single_fact():
    prog = parse_program("p(a).")
    assert len(prog.clauses) == 1
    cl = prog.clauses[0]
    assert cl.head == Fn("p", (Fn("a"),)) and cl.body == ()


def test_clause_with_body():
    cl = parse_program("p(X,Y) :- q(X).").clauses[0]
    assert cl.head == T("p(X,Y)")
    assert cl.body == (T("q(X)"),)


@pytest.mark.parametrize("src", ["p(X", "p(X) :- .", "p(X) q(X).", "p(X) :- q(X)", "X.", "p(_G3).", "p(_7)."])
def test_syntax_errors(src):
    with pytest.raises(ParseError):
        parse_program(src)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_program("p(a).\nq(b :- c.")
    assert err.value.line == 2


def test_reserved_symbols_rejected():
    with pytest.raises(ParseError):
        parse_program("p($a).")


def test_functor_needs_adjacent_paren():
    # a space turns the name into an atom followed by a parenthesised term
    with pytest.raises(ParseError):
        parse_term("f (X)")


def test_goals():
    assert parse_goal("p(X,Y,Z)") == (T("p(X,Y,Z)"),)
    assert parse_goal("") == ()
    assert parse_goal("p(X), q(X)") == (T("p(X)"), T("q(X)"))
    assert parse_goal("p(X).") == (T("p(X)"),)


def test_lists_and_comments():
    prog = parse_program("% comment\napp([], L, L).\napp([H|T], L, [H|R]) :- app(T, L, R).\n")
    assert len(prog.clauses) == 2
    assert term_str(prog.clauses[1].head) == "app([H|T], L, [H|R])"
    assert parse_term("[a, b]") == Fn(".", (Fn("a"), Fn(".", (Fn("b"), Fn("[]")))))


def test_anonymous_variables_are_distinct():
    cl = parse_program("p(_, _, A1) :- q(_).").clauses[0]
    names = [v.name for v in var_occurrences(cl.head)] + [v.name for v in var_occurrences(cl.body[0])]
    assert len(set(names)) == 4


def test_vars_of():
    assert vars_of(T("f(X,g(Y,X))")) == vs("X Y")
    assert vars_of(T("a")) == frozenset()
    assert vars_of(T("p(X,X)")) == vs("X")


def test_uvars_of():
    # variables occurring exactly once
    eq = Fn("=", (T("f(X,Y)"), T("f(Y,Z)")))
    assert uvars_of(eq) == vs("X Z")
    assert uvars_of(V("X")) == vs("X")
    assert uvars_of(T("f(X,X)")) == frozenset()


def test_ground_depth_and_goal_vars():
    assert is_ground(T("f(a,g(b))")) and not is_ground(T("f(X)"))
    assert term_depth(T("X")) == 1 and term_depth(T("f(g(a),b)")) == 3
    assert goal_vars(parse_goal("p(X), q(Y,X)")) == vs("X Y")


def test_signature_includes_witness_symbols():
    sig = signature(parse_program("p(f(a))."))
    assert {("$a", 0), ("$c", 2), ("f", 1), ("a", 0)} <= sig


def test_fresh_variables_are_new_and_unparseable():
    a, b = fresh_var(), fresh_var()
    assert a is not b and a.name.startswith("_G")
    with pytest.raises(ParseError):
        parse_term(a.name)


def test_variables_are_interned():
    assert Var(0, "X") is V("X")


def test_print_parse_round_trip():
    src = "app([], L, L).\napp([H|T], L, [H|R]) :- app(T, L, R).\nq('hello world', 3, f(g(X)), [a|Y])."
    prog = parse_program(src)
    assert parse_program(str(prog)) == prog


def test_round_trip_random_terms():
    rng = random.Random(1)
    for _ in range(300):
        t = rand_term(rng, POOL, 4)
        assert parse_term(term_str(t)) == t


def test_vars_agree_with_naive_count():
    rng = random.Random(2)
    for _ in range(300):
        t = rand_term(rng, POOL, 4)
        occ = list(var_occurrences(t))
        assert vars_of(t) == frozenset(occ)
        assert uvars_of(t) == frozenset(v for v in occ if occ.count(v) == 1)
