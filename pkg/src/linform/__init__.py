"""Symbolic verification of linear 2-form calculus on Lie algebroids."""

from .symexpr import (Expr, Equality, ExprSyntaxError, EvalError, DomainError,
                      UnboundVariableError, parse, to_string, diff, simplify,
                      expr_equal, evaluate, substitute, free_vars)
from .cartan import (Chart, ChartMap, KForm, VField, chart, dx, wedge, d, i_x,
                     lie_derivative, pullback, field_bracket, pair, compose,
                     identity_map, forms_equal, parse_form, form_to_string,
                     form_to_records, form_from_records, zero_form,
                     function_form, basis_form)
from .tanlift import (TangentChart, CotangentChart, tangent_chart,
                      cotangent_chart, projection, euler_field, vertical_lift,
                      tau, tangent_lift, tangent_lift_via_sharp, form_sharp,
                      canonical_involution, cotangent_flip, core_flip,
                      tangent_map, theta_can, omega_can)
from .algebroid import (LieAlgebroid, Section, ProlongSection, BundleChart,
                        CaseResult, AxiomReport, bracket, check_axioms,
                        tangent_prolongation, cotangent_prolongation,
                        check_prolongation_axioms, tangent_algebroid_of_chart,
                        bundle_chart)
from .imform import (IM2FormData, IMReport, MorphismReport,
                     LinearFormAnalysis, check_im, check_morphism,
                     build_lambda, build_lambda_analysis, lambda_sharp,
                     lambda_sharp_from_form, analyze_linear, im1_defect,
                     im2_defect, lambda_form)
from .catalog import (IMEntry, AlgebroidEntry, DiracEntry, PairGroupoidEntry,
                      DiracFrame, DiracReport, PairGroupoidModel,
                      PairGroupoidReport, builtin_examples,
                      builtin_algebroids, builtin_dirac_frames,
                      builtin_pair_groupoids, dirac_to_im,
                      pair_groupoid_check, graph_frame, telescope_groupoid,
                      pair_groupoid, courant_bracket, change_frame)

__version__ = "0.1.0"
