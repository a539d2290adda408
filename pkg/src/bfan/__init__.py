"""Exact harmonic analysis of Boolean functions on the hypercube, with multi-bit influences."""

from .calculus import (
    DerivativeTable,
    HeatTable,
    Restriction,
    compose,
    derivative_fourier,
    derivative_pointwise,
    heat,
    restrict,
)
from .cube import (
    BooleanFunction,
    FourierTable,
    IndexSet,
    and_,
    constant,
    decode,
    degree,
    dictator,
    encode,
    evaluate,
    from_truth_table,
    fwht,
    inverse_fwht,
    majority,
    mean,
    or_,
    parity,
    weight_at_least,
    weight_exact,
)
from .dyadic import Dyadic
from .errors import BfanError
from .families import (
    CoverageStats,
    Packing,
    TribeSpec,
    coverage_stats,
    greedy_packing,
    hypertribe,
    tribes,
)
from .influence import (
    InfluenceReport,
    coalition_influence,
    influence_report,
    is_pivotal,
    joint_influence,
    max_influence,
    nonzero_derivative_prob,
    t_influence,
    total_influence,
)
from .sampler import Estimate, PointwiseFunction, TribeFunction
from .tt_io import read_function, write_function
from .verify import ApproxResult, CheckResult, nearest_low_degree

__version__ = "0.1.0"
