"""Acceptance criteria 1 to 9. Each test records one PASS/FAIL line."""

import itertools
import random
import time

from corpus import CORPUS, cases
from gen import (
    EXTRA,
    POOL,
    rand_atom,
    rand_class,
    rand_idem,
    rand_pset,
    rand_sh,
    rand_term,
)
from helpers import E, G, P, Q, S, T, groups, vs

from setshare.cli import RunConfig, load_program, parse_sharing, run_check
from setshare.concrete import (
    BOT,
    ps_backward,
    ps_forward,
    ps_iota,
    ps_match,
    ps_unif,
    pset,
)
from setshare.engine import sharing_domain, solve_abstract, solve_concrete
from setshare.exsubst import canonicalize, ex_leq, ex_mgu, ex_project, ex_rename
from setshare.sharing import (
    GROUND,
    Sh,
    alpha,
    alpha_ex,
    sh_backward,
    sh_forward,
    sh_iota,
    sh_leq,
    sh_match,
    sh_unif_opt,
    sh_unif_std,
    top_sharing,
    u_sh,
)
from setshare.subst import Renaming, mgu_eqs
from setshare.syntax import Fn, goal_vars, user_var, vars_of
from setshare.witness import build_witness, check_witness, connected_decomposition

PRECISION_PROG = "p(X,Y) :- q(X).\nq(X).\n"
HEADS = EXTRA[:3]


# ---------------------------------------------------------------- 1


def golden_checks():
    out = {}
    out["instance order"] = ex_leq(E("X=a, Y=U", "X Y"), E("Y=V", "X Y")) and not ex_leq(
        E("X=a, Y=U", "X Y V"), E("Y=V", "X Y V")
    )
    out["class equivalence"] = E("X=V, Y=U", "X Y") == E("", "X Y") and E("X=V, Y=U", "X Y V") != E("", "X Y V")
    out["class mgu"] = ex_mgu(E("X=a, Y=t(V1,V1,V2)", "X Y"), E("Y=t(a,V2,V1), Z=b", "Y Z")) == E(
        "X=a, Y=t(a,a,V), Z=b", "X Y Z"
    )
    out["matching filter"] = ps_match(
        pset([E("X=Y", "X Y")], vs("X Y")), pset([E("U=X", "U X"), E("X=t(U)", "U X")], vs("U X"))
    ) == pset([E("X=Y, U=Y", "U X Y")], vs("U X Y"))

    call = pset([E("Y=f(X,Z)", "X Y Z")], vs("X Y Z"))
    entry = ps_forward(call, T("p(X,Y,Z)"), T("p(U,V,W)"))
    back = ps_backward(entry, call, T("p(U,V,W)"), T("p(X,Y,Z)"))
    final = solve_concrete(P("p(U,V,W)."), Q("p(X,Y,Z)"), call, 1).answer
    out["concrete forward, backward, answer"] = (
        entry == pset([E("V=f(U,W)", "U V W")], vs("U V W")) and back == call and final == call
    )

    theta = pset([E("X=Y", "X Y"), E("X=a", "X Y")], vs("X Y"))
    res_prec = solve_concrete(P(PRECISION_PROG), Q("p(X,Y)"), theta, 2).answer
    out["collecting precision"] = res_prec == pset([E("X=Y", "X Y"), E("X=a", "X Y"), E("X=a, Y=a", "X Y")], vs("X Y"))

    A = groups("X Y, X Z, Y") | {frozenset()}
    out["u_sh steps"] = (
        u_sh(A, S("X=t(Y,Z)")) == groups("X Y, X Z, X Y Z") | {frozenset()}
        and u_sh(A, S("X=t(Y,Z), W=t(Y)")) == groups("X Z") | {frozenset()}
    )

    chi = G("X Y, Y Z", "X Y Z")
    fw = (T("p(X,Y,Z)"), T("p(U,V,W)"))
    out["forward, variable head"] = sh_forward(chi, *fw, "std") == G("U V, V W, U V W", "U V W") and sh_forward(
        chi, *fw
    ) == G("U V, V W", "U V W")

    chi_lin = G("X Y, X Z", "X Y Z")
    a_lin = (T("p(X,Y,Z)"), T("p(t(U,V),H,K)"))
    hk = vs("H K")
    out["forward, linear head"] = not any(hk <= g for g in sh_forward(chi_lin, *a_lin).groups) and any(
        hk <= g for g in sh_forward(chi_lin, *a_lin, "std").groups
    )

    chi_free = G("X W, X Z, Y W, Y Z", "W X Y Z")
    a_free = (T("p(X,Y,W,Z)"), T("p(f(U,H),f(U,K),S,T)"))
    opt = sh_forward(chi_free, *a_free)
    std = sh_forward(chi_free, *a_free, "std")
    permuted = sh_forward(chi_free, T("p(Y,X,W,Z)"), T("p(f(U,K),f(U,H),S,T)"))
    out["forward, free head variables"] = (
        vs("S T K") not in opt.groups
        and vs("S T K") in std.groups
        and vs("S T H") not in opt.groups
        and vs("S T H") in std.groups
        and permuted == opt
    )

    bw = (T("p(U,V,W)"), T("p(X,Y,Z)"))
    d = {user_var("U"): user_var("X"), user_var("V"): user_var("Y"), user_var("W"): user_var("Z")}
    pre_std = sh_unif_opt(Sh(groups("U V, V W, X Y, Y Z") | {frozenset()}, vs("U V W X Y Z")), d)
    pre_opt = sh_match(G("U V, V W", "U V W"), sh_unif_opt(chi, d))
    out["backward paths"] = (
        vs("U V W X Y Z") in pre_std.groups
        and vs("U V W X Y Z") not in pre_opt.groups
        and sh_backward(G("U V, V W", "U V W"), chi, *bw) == chi
    )

    prog_unit = P("p(U,V,W).")
    want = {("opt", "opt"): chi}
    for v in (("opt", "std"), ("std", "opt"), ("std", "std")):
        want[v] = G("X Y, Y Z, X Y Z", "X Y Z")
    out["unit clause, four variants"] = all(
        solve_abstract(prog_unit, Q("p(X,Y,Z)"), chi, sharing_domain(*v)).answer == r for v, r in want.items()
    ) and sh_backward(G("U V, V W, U V W", "U V W"), chi, *bw, "std") == G("X Y, Y Z, X Y Z", "X Y Z")

    out["head with functor"] = (
        sh_unif_opt(G("U V, V W", "U V W"), S("V=f(S)")) == G("U V S, V W S", "S U V W")
        and solve_abstract(P("p(U,f(S),W)."), Q("p(X,Y,Z)"), chi).answer == chi
    )
    return out


def test_1_golden_examples(criterion):
    t0 = time.perf_counter()
    results = golden_checks()
    elapsed = time.perf_counter() - t0
    failed = [k for k, ok in results.items() if not ok]
    ok = not failed and elapsed < 1.0
    criterion(1, ok, f"{len(results) - len(failed)}/{len(results)} golden examples in {elapsed:.3f} s (limit 1 s)"
              + (f"; failed: {failed}" if failed else ""))
    assert ok, failed


# ---------------------------------------------------------------- 2


def _exit_for(rng, call, atom, head):
    """An exit element for ``head``: an instance of the entry, or unrelated."""
    if rng.random() < 0.6:
        entry = ps_forward(call, atom, head)
        if entry is not BOT:
            local = [user_var("D1")]
            th = rand_idem(rng, sorted(vars_of(head)), sorted(vars_of(head)) + local, 2, 2)
            return ps_unif(entry, th)
    return rand_pset(rng, vars_of(head), 3, 3)


def _unif_case(rng):
    U = frozenset(rng.sample(POOL, rng.randint(1, 3)))
    a = rand_pset(rng, U, 3, 3)
    th = rand_idem(rng, POOL, POOL, 3, 3)
    return ps_unif(a, th), sh_unif_opt(alpha(a), th)


def _match_case(rng):
    U1 = frozenset(rng.sample(POOL, rng.randint(1, 3)))
    U2 = frozenset(rng.sample(POOL, rng.randint(1, 3)))
    a1, a2 = rand_pset(rng, U1, 3, 3), rand_pset(rng, U2, 3, 3)
    return ps_match(a1, a2), sh_match(alpha(a1), alpha(a2))


def _call_case(rng):
    Uc = sorted(rng.sample(POOL[:3], rng.randint(1, 3)))
    k = rng.randint(1, 3)
    return rand_pset(rng, Uc, 3, 3), rand_atom(rng, Uc + POOL[3:4], k, 3), rand_atom(rng, HEADS, k, 3)


def _forward_case(rng):
    call, atom, head = _call_case(rng)
    return ps_forward(call, atom, head), sh_forward(alpha(call), atom, head)


def _backward_case(rng):
    call, atom, head = _call_case(rng)
    ex = _exit_for(rng, call, atom, head)
    return ps_backward(ex, call, head, atom), sh_backward(alpha(ex), alpha(call), head, atom)


def test_2_correctness(criterion):
    """Each property runs until it has 1000 cases whose concrete result is nonempty."""
    rng = random.Random(2)
    n = 1000
    cases_ = {"unif": _unif_case, "match": _match_case, "forward": _forward_case, "backward": _backward_case}
    bad = dict.fromkeys(cases_, 0)
    tried = dict.fromkeys(cases_, 0)
    t0 = time.perf_counter()
    for name, make in cases_.items():
        useful = 0
        while useful < n:
            tried[name] += 1
            conc, abstract = make(rng)
            if not sh_leq(alpha(conc), abstract):
                bad[name] += 1
            useful += conc is not BOT and bool(conc.members)
    elapsed = time.perf_counter() - t0
    ok = not any(bad.values())
    criterion(2, ok, f"{n} nonempty cases each (drawn {tried}), violations {bad}, {elapsed:.1f} s")
    assert ok, bad


# ---------------------------------------------------------------- 3


def test_3_witnesses(criterion):
    rng = random.Random(3)
    instances = groups_checked = failures = 0
    while instances < 400:
        U1 = frozenset(rng.sample(POOL, rng.randint(1, 4)))
        s1 = rand_sh(rng, U1, 6)
        th = rand_idem(rng, POOL, POOL + EXTRA[:2], 3, 2)
        instances += 1
        for X in sh_unif_opt(s1, th).groups:
            groups_checked += 1
            plan = connected_decomposition(s1.groups, U1, th, X)
            if plan is None or not check_witness(build_witness(plan, th), th, s1.groups, U1, X):
                failures += 1
    ok = failures == 0
    criterion(3, ok, f"{instances} instances, {groups_checked} output groups, {failures} witness failures")
    assert ok


# ---------------------------------------------------------------- 4


def _all_elements(U):
    U = sorted(U)
    gs = [frozenset(c) for k in range(1, len(U) + 1) for c in itertools.combinations(U, k)]
    out = [Sh(frozenset(), frozenset(U))]
    for k in range(len(gs) + 1):
        for pick in itertools.combinations(gs, k):
            out.append(Sh(frozenset(pick) | {frozenset()}, frozenset(U)))
    return out


def _grammar_classes(U):
    """Classes binding each variable of ``U`` to a term of depth at most 2."""
    pool = [user_var(n) for n in ("A1", "B1", "C1")]
    leaves = pool + [GROUND]
    terms = leaves + [Fn("$c", (a, b)) for a in leaves for b in leaves]
    U = sorted(U)
    return {canonicalize(dict(zip(U, imgs)), U) for imgs in itertools.product(terms, repeat=len(U))}


def test_4_match_optimal_by_enumeration(criterion):
    t0 = time.perf_counter()
    U1, U2 = vs("X Y"), vs("Y Z")
    by1, by2 = {}, {}
    for e in _grammar_classes(U1):
        by1.setdefault(alpha_ex(e).groups, []).append(e)
    for e in _grammar_classes(U2):
        by2.setdefault(alpha_ex(e).groups, []).append(e)
    # groups realised by matching some pair, keyed by the pair's own sharing
    realised = {}
    for (g1, es1), (g2, es2) in itertools.product(by1.items(), by2.items()):
        r = set()
        for e1, e2 in itertools.product(es1, es2):
            m = ps_match(pset([e1], U1), pset([e2], U2))
            for e in m.members:
                r |= alpha_ex(e).groups
        realised[(g1, g2)] = r
    missing = extra = pairs = 0
    for s1, s2 in itertools.product(_all_elements(U1), _all_elements(U2)):
        pairs += 1
        got = set()
        for (g1, g2), r in realised.items():
            if g1 <= s1.groups and g2 <= s2.groups:
                got |= r
        abstract = sh_match(s1, s2).groups
        missing += len(abstract - got - {frozenset()})
        extra += len(got - abstract)
    elapsed = time.perf_counter() - t0
    ok = missing == 0 and extra == 0 and elapsed < 300
    criterion(
        4,
        ok,
        f"{pairs} element pairs, {sum(map(len, by1.values()))}x{sum(map(len, by2.values()))} classes; "
        f"unrealised abstract groups {missing}, realised groups not covered {extra}, {elapsed:.1f} s",
    )
    assert ok


# ---------------------------------------------------------------- 5


def test_5_precision_ordering(criterion):
    rng = random.Random(5)
    n = 1000
    bad = 0
    for _ in range(n):
        Uc = sorted(rng.sample(POOL[:3], rng.randint(1, 3)))
        s = rand_sh(rng, Uc)
        th = rand_idem(rng, POOL, POOL, 3, 3)
        bad += not sh_leq(sh_unif_opt(s, th), sh_unif_std(sh_iota(s, th.vars()), th))
        k = rng.randint(1, 3)
        atom = rand_atom(rng, Uc, k, 3)
        head = rand_atom(rng, HEADS, k, 3)
        bad += not sh_leq(sh_forward(s, atom, head), sh_forward(s, atom, head, "std"))
        ex = rand_sh(rng, sorted(vars_of(head)) + [user_var("D1")])
        bad += not sh_leq(sh_backward(ex, s, head, atom), sh_backward(ex, s, head, atom, "std"))

    corpus_bad = []
    for name, goal, init in cases():
        program = load_program(name)
        g = Q(goal)
        chi0 = parse_sharing(init, goal_vars(g))
        base = solve_abstract(program, g, chi0).answer
        for v in (("opt", "std"), ("std", "opt"), ("std", "std")):
            if not sh_leq(base, solve_abstract(program, g, chi0, sharing_domain(*v)).answer):
                corpus_bad.append((name, init, v))

    chi = G("X Y, Y Z", "X Y Z")
    fw = (T("p(X,Y,Z)"), T("p(U,V,W)"))
    chi_free = G("X W, X Z, Y W, Y Z", "W X Y Z")
    a_free = (T("p(X,Y,W,Z)"), T("p(f(U,H),f(U,K),S,T)"))
    ex_paths = G("U V, V W", "U V W")
    bw = (T("p(U,V,W)"), T("p(X,Y,Z)"))

    def strict(a, b):
        return sh_leq(a, b) and a != b

    prog_unit = P("p(U,V,W).")
    base_unit = solve_abstract(prog_unit, Q("p(X,Y,Z)"), chi).answer
    strict_cases = {
        "variable head": strict(sh_forward(chi, *fw), sh_forward(chi, *fw, "std")),
        "free head variables": strict(sh_forward(chi_free, *a_free), sh_forward(chi_free, *a_free, "std")),
        "backward paths": strict(sh_backward(ex_paths, chi, *bw), sh_backward(ex_paths, chi, *bw, "std")),
        "unit clause": all(
            strict(base_unit, solve_abstract(prog_unit, Q("p(X,Y,Z)"), chi, sharing_domain(*v)).answer)
            for v in (("opt", "std"), ("std", "opt"), ("std", "std"))
        ),
    }
    not_strict = [k for k, v in strict_cases.items() if not v]
    ok = bad == 0 and not corpus_bad and not not_strict
    criterion(
        5,
        ok,
        f"{n} random instances x3 operators, {bad} violations; corpus {len(list(cases()))} queries x3 variants, "
        f"{len(corpus_bad)} violations; strict on {sorted(k for k, v in strict_cases.items() if v)}",
    )
    assert ok, (bad, corpus_bad, not_strict)


# ---------------------------------------------------------------- 6


def test_6_operational_soundness(criterion):
    t0 = time.perf_counter()
    failures, answers, runs = [], 0, 0
    for name, goal, init in cases():
        rep = run_check(RunConfig(name, goal, init, depth=5, sld_depth=8))
        runs += 1
        answers += rep["sld_answers"]
        if not rep["ok"]:
            failures.append((name, init, rep["violations"][:2]))
    elapsed = time.perf_counter() - t0
    ok = not failures and len(CORPUS) >= 10 and all(len(i) >= 3 for _, _, i in CORPUS)
    criterion(
        6,
        ok,
        f"{len(CORPUS)} programs, {runs} queries, {answers} SLD answers (depth 8, concrete depth 5), "
        f"{len(failures)} violations, {elapsed:.1f} s",
    )
    assert ok, failures


# ---------------------------------------------------------------- 7


def test_7_order_independence(criterion):
    rng = random.Random(7)
    instances = perms = bad = 0
    while instances < 200:
        s = rand_sh(rng, rng.sample(POOL, rng.randint(1, 4)))
        th = rand_idem(rng, POOL, POOL + EXTRA, 4, 2)
        if len(th) < 2:
            continue
        instances += 1
        results = set()
        for order in itertools.permutations(th.items()):
            perms += 1
            results.add(sh_unif_opt(s, list(order)))
        bad += len(results) != 1
    ok = bad == 0
    criterion(7, ok, f"{instances} instances, {perms} binding orders, {bad} order-dependent results")
    assert ok


# ---------------------------------------------------------------- 8

SMALL = [user_var(n) for n in "XYZ"]
ALLV = POOL + EXTRA


def _rand_class(rng, maxU=3):
    return rand_class(rng, rng.sample(SMALL, rng.randint(1, maxU)), 3)


def _rand_perm(rng):
    return Renaming(dict(zip(ALLV, rng.sample(ALLV, len(ALLV)))))


def _generalize(rng, t, fresh):
    """A term of which ``t`` is an instance: some subterms become new variables."""
    if rng.random() < 0.25:
        v = user_var(f"G{len(fresh)}")
        fresh.append(v)
        return v
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(_generalize(rng, a, fresh) for a in t.args))
    return t


def test_8_exsubst_laws(criterion):
    rng = random.Random(8)
    n = 500
    bad = dict.fromkeys(["rename/project", "rename local", "mgu lower bound", "mgu greatest", "rename/mgu eqs", "rename/mgu classes", "project/mgu", "unif/iota", "leq/mgu"], 0)
    for _ in range(n):
        e = _rand_class(rng)
        rho = _rand_perm(rng)
        V = frozenset(rng.sample(SMALL, rng.randint(0, 3)))
        bad["rename/project"] += ex_rename(rho, ex_project(e, V)) != ex_project(ex_rename(rho, e), rho.vars(V))

        # two renamings agreeing on U give the same class
        outside = [v for v in ALLV if v not in e.U]
        a, b = rng.sample(outside, 2)
        rho2 = Renaming({x: rho.var(Renaming({a: b}).var(x)) for x in ALLV})
        ident = Renaming({a: b})
        bad["rename local"] += ex_rename(rho, e) != ex_rename(rho2, e) or ex_rename(ident, e) != e

        e1, e2 = _rand_class(rng), _rand_class(rng)
        m = ex_mgu(e1, e2)
        if m is not None:
            bad["mgu lower bound"] += not (ex_leq(m, e1) and ex_leq(m, e2))
        # eta below generalisations of itself must be below their mgu
        W = sorted(frozenset(rng.sample(SMALL, rng.randint(1, 3))) | frozenset(rng.sample(SMALL, 1)))
        eta = rand_class(rng, W, 3)
        Ua = [u for u in W if rng.random() < 0.7] or W[:1]
        Ub = [u for u in W if u not in Ua or rng.random() < 0.4] or W[-1:]
        fresh = []
        g1 = canonicalize({u: _generalize(rng, eta.image(u), fresh) for u in Ua}, Ua)
        g2 = canonicalize({u: _generalize(rng, eta.image(u), fresh) for u in Ub}, Ub)
        mg = ex_mgu(g1, g2)
        bad["mgu greatest"] += mg is None or not ex_leq(ex_project(eta, mg.U), mg)

        eqs = [(rand_term(rng, ALLV[:6], 3), rand_term(rng, ALLV[:6], 3)) for _ in range(rng.randint(1, 3))]
        EV = frozenset().union(*(vars_of(l) | vars_of(r) for l, r in eqs))
        s = mgu_eqs(eqs)
        rs = mgu_eqs([(rho(l), rho(r)) for l, r in eqs])
        if s is None or rs is None:
            bad["rename/mgu eqs"] += (s is None) != (rs is None)
        else:
            bad["rename/mgu eqs"] += canonicalize(rs, rho.vars(EV)) != ex_rename(rho, canonicalize(s, EV))
        lhs = None if m is None else ex_rename(rho, m)
        bad["rename/mgu classes"] += lhs != ex_mgu(ex_rename(rho, e1), ex_rename(rho, e2))

        V = frozenset(rng.sample(SMALL, rng.randint(0, 3)))
        left = ex_mgu(ex_project(e1, V), e2)
        left = None if left is None else ex_project(left, V)
        bad["project/mgu"] += left != ex_mgu(ex_project(e1, V), ex_project(e2, V))

        U = frozenset(rng.sample(SMALL, rng.randint(1, 3)))
        A = rand_pset(rng, U, 3, 3)
        th = rand_idem(rng, ALLV[:6], ALLV[:6], 3, 2)
        bad["unif/iota"] += ps_unif(A, th) != ps_unif(ps_iota(A, th.vars()), th)

        m12 = ex_mgu(e1, e2)
        via_mgu = m12 is not None and ex_project(m12, e1.U) == e1
        bad["leq/mgu"] += ex_leq(e1, e2, e1.U & e2.U) != via_mgu
    ok = not any(bad.values())
    criterion(8, ok, f"{n} cases per law, violations {bad}")
    assert ok, bad


# ---------------------------------------------------------------- 9


def test_9_termination(criterion):
    times = {}
    ok = True
    for name, goal in [("append", "append(X,Y,Z)"), ("nrev", "nrev(X,Y)"), ("path", "path(X,Y)")]:
        program = load_program(name)
        assert max(len(vars_of(cl)) for cl in program.clauses) <= 10
        g = Q(goal)
        t0 = time.perf_counter()
        res = solve_abstract(program, g, top_sharing(goal_vars(g)))
        times[name] = time.perf_counter() - t0
        ok = ok and res.answer is not BOT and times[name] < 5
    criterion(9, ok, ", ".join(f"{k} {v:.3f} s" for k, v in times.items()) + " (limit 5 s each)")
    assert ok
