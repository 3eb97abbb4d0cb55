"""Structured singular values for repeated scalar blocks and the domains
attached to them: generalized tetrablocks, symmetrized polydiscs,
mu_{1,n}-quotients and the pentablock."""

__version__ = "0.1.0"

from .errors import (
    BudgetError,
    InconsistentStateError,
    InvalidArgumentError,
    InvalidSpecError,
    InvalidStateError,
    MudomError,
    NumericFailure,
    SizeError,
    UndeterminedError,
)
from .multiindex import MultiIndexTable, SplitTable, build_table, compare, quasibalanced_act, split_table
from .cpoly import (
    CertStatus,
    certify_nonvanishing,
    eval_R,
    eval_psi,
    eval_split,
    roots_univariate,
    sup_psi_torus,
)
from .clinalg import char_poly, det, det_expansion, minor_families, operator_norm, pi_map, spectral_radius
from .ssv import in_omega, mu, mu_bisection, mu_lower_torus, psh_circle_test
from .domains import (
    DomainHandle,
    Kind,
    MembershipResult,
    Method,
    Status,
    embed_symmetrized,
    generalized_tetrablock,
    handle_for,
    member,
    member_closure,
    minkowski,
    mu_quotient,
    sample_member,
    sample_members,
    separating_hyperplane,
    symmetrized_polydisc,
    tetrablock,
)
from .pentablock import PentaPoint, beta, member_penta, member_penta_batch, member_penta_closure, penta_minkowski
