"""lambdalab: a lambda-calculus reduction-strategy laboratory.

Deterministic leftmost-outermost and rightmost-innermost reduction, the
randomized mixture of the two, exact expected-derivation-length analysis
via absorbing chains over rationals, seeded Monte Carlo estimation, and an
executable law suite.
"""

from .montecarlo import Estimate, RunResult, estimate, sample_run
from .pars import (
    ChainAnalysis,
    Configuration,
    EvolutionTrace,
    FosterReport,
    SingularSystem,
    StateCapExceeded,
    TRM,
    analyze,
    chain_derivation_lengths,
    check_foster,
    derivation_length_dist,
    evolve,
    evolve_trace,
    expected_length_truncated,
    explore_states,
    grid_expected_lengths,
    solve_expected_length,
)
from .strategies import (
    Distribution,
    InvalidEpsilon,
    StepCount,
    Strategy,
    anf_successors,
    beta_successors,
    foster_bound,
    n_steps,
    p_eps,
    parse_probability,
    step_lo,
    step_ri,
)
from .terms import (
    Abs,
    App,
    GenerationExhausted,
    InvalidArity,
    InvalidPath,
    ParseError,
    SubCalculus,
    Term,
    Var,
    alpha_eq,
    canonicalize,
    classify,
    ensure_recursion_headroom,
    free_vars,
    is_anf_redex,
    is_lambda_A,
    is_lambda_I,
    is_normal_form,
    mk_Cn,
    mk_I,
    mk_Mn,
    mk_Omega,
    mk_example1,
    mk_example2,
    mk_omega,
    multiplicity,
    parse,
    random_term,
    redexes,
    reduce_at,
    render,
    substitute,
    term_size,
)

__version__ = "0.1.0"
