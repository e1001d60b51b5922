"""Goal-dependent set-sharing analysis for pure logic programs."""

from .concrete import BOT, TOP, AnalysisError, PSet
from .engine import concrete_domain, sharing_domain, solve_abstract, solve_concrete
from .exsubst import ExSubst, canonicalize, ex_leq, ex_mgu, ex_project, ex_rename
from .sharing import (
    Sh,
    alpha,
    format_groups,
    sh,
    sh_backward,
    sh_forward,
    sh_match,
    sh_unif_opt,
)
from .syntax import parse_goal, parse_program, parse_term

__all__ = [
    "BOT",
    "TOP",
    "AnalysisError",
    "ExSubst",
    "PSet",
    "Sh",
    "alpha",
    "canonicalize",
    "concrete_domain",
    "ex_leq",
    "ex_mgu",
    "ex_project",
    "ex_rename",
    "format_groups",
    "parse_goal",
    "parse_program",
    "parse_term",
    "sh",
    "sh_backward",
    "sh_forward",
    "sh_match",
    "sh_unif_opt",
    "sharing_domain",
    "solve_abstract",
    "solve_concrete",
]
