"""Sums of a prime power and a square-full number, computed and checked
against their asymptotics."""
from .arith import (
    PrimePower,
    ZetaConstants,
    compute_zeta_constants,
    integer_root,
    is_prime,
    is_squarefree,
    mobius,
    von_mangoldt,
)
from .asymptotics import (
    AsymptoticFit,
    MeanValueSample,
    bateman_grosswald,
    filaseta_trifonov_window,
    main_term,
    mean_value_sample,
    sigma_decomposition,
    smoothing_residual,
)
from .campaign import CampaignConfig, VerificationRow, emit_report, run_campaign
from .representation import (
    IntervalSpec,
    ReprValue,
    interval_sum_direct,
    interval_sum_rearranged,
    repr_sq,
    repr_sqfull,
    repr_truncated,
    truncation_gap,
)
from .sieve import (
    LambdaTable,
    SieveSegment,
    build_lambda_table,
    chebyshev_psi,
    chebyshev_theta,
    sieve_segment,
    theta_between,
)
from .squarefull import (
    SquarefullDecomposition,
    TruncationLevel,
    count_squarefull,
    decompose,
    enumerate_squarefull,
    is_squarefull,
    window_count,
)

__version__ = "0.1.0"
