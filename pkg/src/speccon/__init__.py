"""Periodic spectrum-filter consensus protocols: design, rates, simulation."""

from .errors import (
    ConnectivityError,
    GenerationError,
    NumericalError,
    ParameterError,
    SpecconError,
)
from .filters import (
    ControlSequence,
    cheby_on_band,
    cheby_on_band_at_zero,
    cheby_t,
    closed_rate_chebyshev,
    closed_rate_constant,
    closed_rate_lagrange,
    design_chebyshev,
    design_constant,
    design_finite_time,
    design_lagrange,
    design_uniform_unknown,
    eval_filter,
    load_sequence,
    save_sequence,
    sequence_from_dict,
    sequence_to_dict,
)
from .graphs import (
    Graph,
    LaplacianSpectrum,
    SpectralBand,
    analytic_spectrum,
    band_contains,
    build_graph,
    distinct_nonzero_eigenvalues,
    graph_from_dict,
    graph_to_dict,
    laplacian,
    load_graph,
    save_graph,
    spectrum,
)
from .rates import (
    RateReport,
    asymptotic_optimal_limit,
    check_finite_time,
    decaying_gain_residuals,
    exact_rate,
    rate_on_eigenvalues,
    report_to_dict,
    spectral_state,
    worst_case_rate,
)
from .sim import (
    PeriodRatios,
    SimulationTrace,
    consensus_time,
    measured_period_ratios,
    save_trace,
    simulate,
    step,
    trace_csv_lines,
    trace_to_dict,
    uniform_initial_states,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
