"""Exact workbench for the base-pq fraction-multiplication cellular automata
and the column traces they produce."""

from .arith import Params, md, residue_class
from .automaton import (Configuration, DeltaRule, SpaceTimeDiagram, apply, derive_delta, fmul_rule,
                        fmul_table, iterate, mul_rule, mul_table, widen_trace)
from .errors import (BudgetExceeded, ConsistencyViolation, InvalidParams, ParseError,
                     TracelabError)
from .language import (LanguageLevel, check_aperiodicity, construct_w2, enumerate_language,
                       trace_of)
from .mahler import build_constrained_prefix, render_diagram, search_finite_columns
from .numbers import decode, encode, parse_rational, verify_multiplication
from .representations import compfrac_reconstruct, phi_of_trace, phi_window, psi
from .sofic import (LabeledGraph, build_transitive_32, build_Zpq, complexity_closed_form,
                    count_distinct_labels, gf_coefficients)

__version__ = "0.1.0"
