"""Command line front end: analyze, compare, concrete, check and witness."""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import concrete as ps
from .concrete import BOT, TOP, AnalysisError, PSet
from .engine import Domain, sharing_domain, solve_abstract, solve_concrete
from .exsubst import canonicalize
from .sharing import (
    EMPTY_GROUP,
    Sh,
    alpha,
    alpha_ex,
    gamma_member,
    gamma_witnesses,
    group_key,
    sh_leq,
    sh_unif_opt,
    top_sharing,
)
from .sld import solve as sld_solve
from .subst import Substitution, is_idempotent
from .syntax import (
    ParseError,
    goal_str,
    goal_vars,
    parse_goal,
    parse_program,
    parse_term,
    term_str,
    user_var,
)
from .witness import build_witness, check_witness, connected_decomposition

VARIANTS = [("opt", "opt"), ("opt", "std"), ("std", "opt"), ("std", "std")]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    program: str
    goal: str
    init: str | None = None
    subst: str | None = None
    fwd: str = "opt"
    bwd: str = "opt"
    depth: int = 5
    sld_depth: int = 6
    fmt: str = "text"

    def __post_init__(self):
        if self.depth < 0 or self.sld_depth < 0:
            raise ConfigError("depths must be non-negative")
        if self.fwd not in ("opt", "std") or self.bwd not in ("opt", "std"):
            raise ConfigError("operator variants are opt or std")


# ---------------------------------------------------------------- inputs


def corpus_names() -> list:
    root = resources.files("setshare") / "corpus"
    return sorted(p.name[:-3] for p in root.iterdir() if p.name.endswith(".pl"))


def corpus_text(name: str) -> str:
    return (resources.files("setshare") / "corpus" / f"{name}.pl").read_text(encoding="utf-8")


def load_program(ref: str):
    """Parse a program file; a bare name not found on disk selects a bundled program."""
    p = Path(ref)
    if p.exists():
        text = p.read_text(encoding="utf-8")
    elif ref in corpus_names():
        text = corpus_text(ref)
    else:
        raise ConfigError(f"no such program file or bundled program: {ref}")
    return parse_program(text)


def parse_sharing(spec: str | None, U) -> Sh:
    """Parse ``{X Y, Y Z}``. ``{}`` is the empty element; ``∅`` names the empty group."""
    U = frozenset(U)
    if spec is None:
        return top_sharing(U)
    s = spec.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ConfigError(f"sharing spec must be enclosed in braces: {spec!r}")
    body = s[1:-1].strip()
    if not body:
        return Sh(frozenset(), U)
    groups = set()
    by_name = {v.name: v for v in U}
    for part in body.split(","):
        names = part.split()
        if names == ["∅"] or not names:
            groups.add(EMPTY_GROUP)
            continue
        g = set()
        for n in names:
            if n not in by_name:
                raise ConfigError(f"variable {n} of the sharing spec does not occur in the goal")
            g.add(by_name[n])
        groups.add(frozenset(g))
    return Sh(frozenset(groups), U)


def parse_bindings(spec: str | None) -> Substitution:
    """Parse ``Y=f(X,Z), W=a`` into a substitution."""
    if not spec or not spec.strip():
        return Substitution()
    pairs = []
    for part in _split_top(spec):
        if "=" not in part:
            raise ConfigError(f"binding without '=': {part!r}")
        lhs, rhs = part.split("=", 1)
        v = parse_term(lhs.strip())
        if not hasattr(v, "kind"):
            raise ConfigError(f"left side of a binding must be a variable: {lhs!r}")
        pairs.append((v, parse_term(rhs.strip())))
    return Substitution(pairs)


def _split_top(s: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return [p for p in parts if p.strip()]


# ---------------------------------------------------------------- rendering


def groups_json(a):
    if a is BOT or a is TOP:
        return None
    return [[v.name for v in sorted(g)] for g in sorted(a.groups, key=group_key)]


def pset_json(a):
    if a is BOT or a is TOP:
        return None
    return sorted(repr(e) for e in a.members)


def _vars_json(vs) -> list:
    return [v.name for v in sorted(vs)]


def table_json(table: dict, describe) -> list:
    rows = [
        {"atom": term_str(atom), "entry": describe(chi), "exit": describe(out)}
        for (atom, chi), out in table.items()
    ]
    rows.sort(key=lambda r: (r["atom"], json.dumps(r["entry"]), json.dumps(r["exit"])))
    return rows


def _text_table(rows: list, fmt) -> list:
    lines = []
    for r in rows:
        lines.append(f"  {r['atom']}: {fmt(r['entry'])} -> {fmt(r['exit'])}")
    return lines


def _fmt_groups_json(g) -> str:
    if g is None:
        return "⊥"
    ne = [x for x in g if x]
    if not g:
        return "{}"
    if not ne:
        return "{∅}"
    return "{" + ", ".join(" ".join(x) for x in ne) + "}"


# ---------------------------------------------------------------- runs


def _query(cfg: RunConfig):
    program = load_program(cfg.program)
    goal = parse_goal(cfg.goal)
    return program, goal, goal_vars(goal)


def run_analyze(cfg: RunConfig, domain: Domain | None = None) -> dict:
    program, goal, gv = _query(cfg)
    chi0 = parse_sharing(cfg.init, gv)
    domain = domain or sharing_domain(cfg.fwd, cfg.bwd)
    t0 = time.perf_counter()
    res = solve_abstract(program, goal, chi0, domain)
    ms = (time.perf_counter() - t0) * 1000
    return {
        "goal": goal_str(goal),
        "vars": _vars_json(gv),
        "success_groups": groups_json(res.answer),
        "table": table_json(res.table, groups_json),
        "timings_ms": {"analysis": round(ms, 3)},
        "variant": {"fwd": cfg.fwd, "bwd": cfg.bwd},
        "init": groups_json(chi0),
        "iterations": res.iterations,
    }


def run_compare(cfg: RunConfig) -> dict:
    program, goal, gv = _query(cfg)
    chi0 = parse_sharing(cfg.init, gv)
    results = {}
    timings = {}
    for fwd, bwd in VARIANTS:
        t0 = time.perf_counter()
        results[(fwd, bwd)] = solve_abstract(program, goal, chi0, sharing_domain(fwd, bwd)).answer
        timings[f"{fwd}/{bwd}"] = round((time.perf_counter() - t0) * 1000, 3)
    base = results[("opt", "opt")]
    variants = []
    for (fwd, bwd), r in results.items():
        extra = []
        if r is not BOT and base is not BOT:
            extra = [[v.name for v in sorted(g)] for g in sorted(r.groups - base.groups, key=group_key)]
        variants.append(
            {
                "fwd": fwd,
                "bwd": bwd,
                "success_groups": groups_json(r),
                "extra_over_opt": extra,
                "opt_below": sh_leq(base, r),
            }
        )
    return {
        "goal": goal_str(goal),
        "vars": _vars_json(gv),
        "success_groups": groups_json(base),
        "table": [],
        "timings_ms": timings,
        "variant": "compare",
        "variants": variants,
    }


def run_concrete(cfg: RunConfig) -> dict:
    program, goal, gv = _query(cfg)
    theta = parse_bindings(cfg.subst)
    if not is_idempotent(theta):
        raise ConfigError("the initial substitution must be idempotent")
    U = gv | theta.dom()
    chi0 = PSet(frozenset([canonicalize(theta, U)]), U)
    t0 = time.perf_counter()
    res = solve_concrete(program, goal, chi0, cfg.depth)
    ms = (time.perf_counter() - t0) * 1000
    return {
        "goal": goal_str(goal),
        "vars": _vars_json(U),
        "success_groups": groups_json(alpha(res.answer)),
        "table": table_json(res.table, pset_json),
        "timings_ms": {"concrete": round(ms, 3)},
        "variant": {"concrete_depth": cfg.depth},
        "answers": pset_json(res.answer),
    }


def check_calls(chi0: Sh) -> list:
    """Concrete calls described by ``chi0``: one per group, plus three covering all groups at once."""
    calls = set(gamma_witnesses(chi0))
    if chi0.groups:
        calls |= {gamma_member(chi0.groups, chi0.U, shape) for shape in ("var", "list", "open")}
    return sorted(calls, key=repr)


def run_check(cfg: RunConfig, domain: Domain | None = None) -> dict:
    """SLD answers, concrete semantics and abstract result must be ordered by inclusion."""
    program, goal, gv = _query(cfg)
    chi0 = parse_sharing(cfg.init, gv)
    domain = domain or sharing_domain(cfg.fwd, cfg.bwd)
    timings = {}
    t0 = time.perf_counter()
    abstract = solve_abstract(program, goal, chi0, domain).answer
    timings["abstract"] = round((time.perf_counter() - t0) * 1000, 3)
    calls = check_calls(chi0)
    t0 = time.perf_counter()
    # one call at a time: the collecting semantics of a union would pair each
    # exit with every call and grow quadratically
    conc = BOT
    for call in calls:
        conc = ps.ps_lub(conc, solve_concrete(program, goal, PSet(frozenset([call]), chi0.U), cfg.depth).answer)
    timings["concrete"] = round((time.perf_counter() - t0) * 1000, 3)
    violations = []
    t0 = time.perf_counter()
    n_answers = 0
    for call in calls:
        for ans in sorted(sld_solve(program, goal, cfg.sld_depth, call.rep)):
            n_answers += 1
            a = alpha_ex(ans.answer)
            if not sh_leq(a, abstract):
                missing = sorted(a.groups - (abstract.groups if isinstance(abstract, Sh) else frozenset()), key=group_key)
                violations.append(
                    {
                        "kind": "sld-not-below-abstract",
                        "call": repr(call),
                        "answer": repr(ans.answer),
                        "length": ans.length,
                        "missing_groups": [[v.name for v in sorted(g)] for g in missing],
                    }
                )
            if ans.length <= cfg.depth and (conc is BOT or ans.answer not in conc.members):
                violations.append(
                    {
                        "kind": "sld-not-in-concrete",
                        "call": repr(call),
                        "answer": repr(ans.answer),
                        "length": ans.length,
                    }
                )
    timings["sld"] = round((time.perf_counter() - t0) * 1000, 3)
    ac = alpha(conc)
    if not sh_leq(ac, abstract):
        violations.append(
            {
                "kind": "concrete-not-below-abstract",
                "concrete_groups": groups_json(ac),
                "abstract_groups": groups_json(abstract),
            }
        )
    return {
        "goal": goal_str(goal),
        "vars": _vars_json(gv),
        "success_groups": groups_json(abstract),
        "table": [],
        "timings_ms": timings,
        "variant": {"fwd": cfg.fwd, "bwd": cfg.bwd, "concrete_depth": cfg.depth, "sld_depth": cfg.sld_depth},
        "sld_answers": n_answers,
        "concrete_groups": groups_json(ac),
        "ok": not violations,
        "violations": violations,
    }


def run_witness(init: str, theta_spec: str, U1_spec: str | None, group: str | None) -> dict:
    theta = parse_bindings(theta_spec)
    if not is_idempotent(theta):
        raise ConfigError("the unifier must be idempotent")
    names = set(re.findall(r"[A-Z_][A-Za-z0-9_]*", init or ""))
    if U1_spec:
        names |= set(U1_spec.split())
    U1 = frozenset(user_var(n) for n in names)
    s1 = parse_sharing(init, U1)
    res = sh_unif_opt(s1, theta)
    targets = sorted(res.groups, key=group_key)
    if group is not None:
        want = frozenset(user_var(n) for n in group.split())
        if want not in res.groups:
            raise ConfigError(f"group {group!r} is not produced by the abstract unification")
        targets = [want]
    rows = []
    for X in targets:
        plan = connected_decomposition(s1.groups, U1, theta, X)
        delta = None if plan is None else build_witness(plan, theta)
        rows.append(
            {
                "group": [v.name for v in sorted(X)],
                "plan": None if plan is None else [[v.name for v in sorted(b)] for b in plan.K1],
                "delta": None if delta is None else repr(delta),
                "ok": delta is not None and check_witness(delta, theta, s1.groups, U1, X),
            }
        )
    return {
        "vars": _vars_json(U1),
        "theta": repr(theta),
        "result_groups": groups_json(res),
        "witnesses": rows,
        "ok": all(r["ok"] for r in rows),
    }


# ---------------------------------------------------------------- text output


def render_text(cmd: str, rep: dict) -> str:
    lines = []
    if "goal" in rep:
        lines.append(f"goal: {rep['goal']}")
    if cmd == "analyze":
        lines.append(f"variant: fwd={rep['variant']['fwd']} bwd={rep['variant']['bwd']}")
        lines.append(f"success: {_fmt_groups_json(rep['success_groups'])}")
        lines.append("call patterns:")
        lines += _text_table(rep["table"], _fmt_groups_json)
    elif cmd == "compare":
        for v in rep["variants"]:
            extra = ", ".join(" ".join(g) for g in v["extra_over_opt"]) or "-"
            lines.append(
                f"fwd={v['fwd']} bwd={v['bwd']}: {_fmt_groups_json(v['success_groups'])}  extra: {extra}"
            )
    elif cmd == "concrete":
        lines.append(f"depth: {rep['variant']['concrete_depth']}")
        ans = rep["answers"]
        if ans is None:
            lines.append("answers: ⊥")
        else:
            lines.append(f"answers ({len(ans)}):")
            lines += [f"  {a}" for a in ans]
        lines.append(f"sharing: {_fmt_groups_json(rep['success_groups'])}")
    elif cmd == "check":
        lines.append(f"abstract: {_fmt_groups_json(rep['success_groups'])}")
        lines.append(f"concrete: {_fmt_groups_json(rep['concrete_groups'])}")
        lines.append(f"sld answers: {rep['sld_answers']}")
        if rep["ok"]:
            lines.append("check: ok")
        else:
            lines.append(f"check: FAILED ({len(rep['violations'])} violations)")
            for v in rep["violations"][:10]:
                lines.append("  " + json.dumps(v, ensure_ascii=False))
    elif cmd == "witness":
        lines.append(f"theta: {rep['theta']}")
        lines.append(f"result: {_fmt_groups_json(rep['result_groups'])}")
        for r in rep["witnesses"]:
            status = "ok" if r["ok"] else "FAILED"
            lines.append(f"  {' '.join(r['group']) or '∅'}: {status}  delta = {r['delta']}")
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="setshare", description="Set-sharing analysis of pure logic programs.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, init=True):
        sp.add_argument("program", help="program file, or the name of a bundled program")
        sp.add_argument("goal", help="query, e.g. 'append(X,Y,Z)'")
        if init:
            sp.add_argument("--init", help="initial sharing, e.g. '{X Y, Y Z}'")
        sp.add_argument("--format", choices=["text", "json"], default="text")

    a = sub.add_parser("analyze", help="abstract sharing analysis")
    common(a)
    a.add_argument("--fwd", choices=["opt", "std"], default="opt")
    a.add_argument("--bwd", choices=["opt", "std"], default="opt")

    c = sub.add_parser("compare", help="all four operator combinations side by side")
    common(c)

    k = sub.add_parser("concrete", help="depth-bounded concrete collecting semantics")
    common(k, init=False)
    k.add_argument("--subst", help="initial substitution, e.g. 'Y=f(X,Z)'")
    k.add_argument("--depth", type=int, default=5)

    h = sub.add_parser("check", help="cross-check SLD, concrete and abstract results")
    common(h)
    h.add_argument("--fwd", choices=["opt", "std"], default="opt")
    h.add_argument("--bwd", choices=["opt", "std"], default="opt")
    h.add_argument("--depth", type=int, default=5)
    h.add_argument("--sld-depth", type=int, default=6)

    w = sub.add_parser("witness", help="optimality witnesses for one abstract unification")
    w.add_argument("--init", required=True, help="sharing over U1, e.g. '{X W, Y Z}'")
    w.add_argument("--theta", required=True, help="unifier, e.g. 'X=f(U), Y=g(U)'")
    w.add_argument("--vars", help="extra variables of U1 not mentioned in --init")
    w.add_argument("--group", help="only this output group, e.g. 'U W X Y Z'")
    w.add_argument("--format", choices=["text", "json"], default="text")

    sub.add_parser("corpus", help="list bundled programs")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "corpus":
            print("\n".join(corpus_names()))
            return 0
        if args.cmd == "witness":
            rep = run_witness(args.init, args.theta, args.vars, args.group)
        else:
            cfg = RunConfig(
                program=args.program,
                goal=args.goal,
                init=getattr(args, "init", None),
                subst=getattr(args, "subst", None),
                fwd=getattr(args, "fwd", "opt"),
                bwd=getattr(args, "bwd", "opt"),
                depth=getattr(args, "depth", 5),
                sld_depth=getattr(args, "sld_depth", 6),
            )
            run = {"analyze": run_analyze, "compare": run_compare, "concrete": run_concrete, "check": run_check}
            rep = run[args.cmd](cfg)
    except (ParseError, ConfigError, AnalysisError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(rep, indent=2, ensure_ascii=False))
    else:
        print(render_text(args.cmd, rep))
    return 0 if rep.get("ok", True) else 1


if __name__ == "__main__":
    sys.exit(main())
