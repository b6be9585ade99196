"""Exact and floating-point experiments with elementary operators ``T(F) = W F U``."""

from .criteria import (FAIL, INCONCLUSIVE, PASS, THEOREM_MAP, CriterionReport, SplitWitness,
                       TailPolicy, check_adjoint_conditions, check_cosine_split,
                       check_hypercyclicity_condition, check_necessary_m_condition,
                       check_orthogonality, check_periodic_min_modulus, check_series_condition,
                       check_zero_transitivity, find_cosine_split, orthogonality_horizon)
from .dynamics import (ElementarySystem, adjoint_cosine_apply, adjoint_t_apply, cosine_apply,
                       orbit_profile, s_apply, t_apply)
from .errors import (ConfigParseError, ConfigurationError, DomainError, HyperlabError,
                     PreconditionError)
from .finite_rank import (FiniteRankOperator, exact_operator_norm, exact_trace_norm,
                          operator_norm, projection_operator, section_residual, trace_norm)
from .operators import (WeightedPermutationOperator, WeightPattern, adjoint, apply_power,
                        build_aperiodic_shift, build_block_cycle, build_example_W, build_identity,
                        inverse, min_modulus, norm_power_proj, proj_norm_power, sup_norm)
from .scalars import EXACT, FLOAT, Dyadic, SubspaceSpec, section
from .scenario import load_config, parse_config, run_scenario
from .witnesses import (WitnessRun, adjoint_cosine_witness, cosine_witness, orbit_approach,
                        periodic_witness, transitive_witness)

__version__ = "0.1.0"
