"""Counting and querying world views of epistemic logic programs."""

__version__ = "0.1.0"

from .asp import answer_sets, is_answer_set, least_model
from .elp import WorldView, count_world_views, enumerate_world_views, epistemic_reduct, solve_nonneg
from .errors import (BudgetExceeded, ConstraintViolated, ElpqError, ParseError, SemanticError)
from .grounder import GroundProgram, domain_rewrite, ground, herbrand_universe
from .model import Atom, EpiElement, Literal, Program, ProgramClass, Query, Rule, classify
from .parser import parse_program, parse_query, serialize_program
from .quant import plausibility_level, probability
from .reductions import DiffQbf1, DiffQbf3, encode_disj_nonground, encode_tight, eval_diff_count
from .treewidth import bag_ground, decompose, make_nice, primal_graph

__all__ = [
    "Atom", "BudgetExceeded", "ConstraintViolated", "DiffQbf1", "DiffQbf3", "ElpqError", "EpiElement",
    "GroundProgram", "Literal", "ParseError", "Program", "ProgramClass", "Query", "Rule", "SemanticError",
    "WorldView", "answer_sets", "bag_ground", "classify", "count_world_views", "decompose", "domain_rewrite",
    "encode_disj_nonground", "encode_tight", "enumerate_world_views", "epistemic_reduct", "eval_diff_count",
    "ground", "herbrand_universe", "is_answer_set", "least_model", "make_nice", "parse_program", "parse_query",
    "plausibility_level", "primal_graph", "probability", "serialize_program", "solve_nonneg",
]
