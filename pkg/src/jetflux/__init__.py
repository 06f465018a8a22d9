"""Exact conserved-current constructions for differential-equation systems.

Everything is computed over multivariate rational functions with rational
coefficients: equality of expressions means equality of normal forms, and a
passing report is an algebraic certificate, not a numerical one.
"""

from .documents import SystemDocument, document_from_dict, load_system_document
from .embedding import (adjoint_determining, auxiliary_lagrangian,
                        check_adjoint_symmetry, check_system_symmetry,
                        embedding_current, linearization_current,
                        multiplier_symmetry_check, split_embedding_current,
                        theorem1_certificate)
from .errors import JetfluxError
from .expr import (ConstantSymbol, ExponentVector, Expr, FunctionApp, Jet,
                   MultiIndex, partial_atom, substitute_function)
from .extension import (ExtendedSystem, ExtensionPlan, ParameterizedPair,
                        adjoint_from_current, current_weight, extend_system,
                        homogeneous_decompose, insert_parameter,
                        kill_parameter_jets, lift_parameterized_multiplier,
                        lift_trivial_multiplier, parameterized_pair,
                        project_trivial_multiplier, recover_current_from_theta,
                        restrict_multiplier, scc_check, theorem2_current,
                        trivial_extend)
from .jets import (SystemSignature, euler_lagrange, is_total_divergence,
                   linearize, prolong, scaling_weight, total_derivative,
                   variation)
from .noether import (IBPInput, SymmetryWitness, check_lagrangian_symmetry,
                      gauss_current, ibp_contract, ibp_split,
                      lagrangian_slots, noether_current, transposed_sum,
                      variation_split)
from .parser import parse_expression
from .ratfunc import Coefficient
from .registry import (document, document_path, example_names, run_all,
                       run_example)
from .render import render, render_coefficient, render_current
from .report import Check, Report
from .systems import (Current, DESystem, EquivalenceWitness, Multiplier,
                      current_from_homogeneity, currents_equivalent,
                      divergence, is_conserved_on_shell,
                      multiplier_determining, on_shell_reduce,
                      source_product, verify_multiplier_current_pair)

__version__ = "0.1.0"

__all__ = [
    "Check",
    "Coefficient",
    "ConstantSymbol",
    "Current",
    "DESystem",
    "EquivalenceWitness",
    "ExponentVector",
    "Expr",
    "ExtendedSystem",
    "ExtensionPlan",
    "FunctionApp",
    "IBPInput",
    "Jet",
    "JetfluxError",
    "MultiIndex",
    "Multiplier",
    "ParameterizedPair",
    "Report",
    "SymmetryWitness",
    "SystemDocument",
    "SystemSignature",
    "adjoint_determining",
    "adjoint_from_current",
    "auxiliary_lagrangian",
    "check_adjoint_symmetry",
    "check_lagrangian_symmetry",
    "check_system_symmetry",
    "current_from_homogeneity",
    "current_weight",
    "currents_equivalent",
    "divergence",
    "document",
    "document_from_dict",
    "document_path",
    "embedding_current",
    "euler_lagrange",
    "example_names",
    "extend_system",
    "gauss_current",
    "homogeneous_decompose",
    "ibp_contract",
    "ibp_split",
    "insert_parameter",
    "is_conserved_on_shell",
    "is_total_divergence",
    "kill_parameter_jets",
    "lagrangian_slots",
    "lift_parameterized_multiplier",
    "lift_trivial_multiplier",
    "linearization_current",
    "linearize",
    "load_system_document",
    "multiplier_determining",
    "multiplier_symmetry_check",
    "noether_current",
    "on_shell_reduce",
    "parameterized_pair",
    "parse_expression",
    "partial_atom",
    "project_trivial_multiplier",
    "prolong",
    "recover_current_from_theta",
    "render",
    "render_coefficient",
    "render_current",
    "restrict_multiplier",
    "run_all",
    "run_example",
    "scaling_weight",
    "scc_check",
    "source_product",
    "split_embedding_current",
    "substitute_function",
    "theorem1_certificate",
    "theorem2_current",
    "total_derivative",
    "transposed_sum",
    "trivial_extend",
    "variation",
    "variation_split",
    "verify_multiplier_current_pair",
]
