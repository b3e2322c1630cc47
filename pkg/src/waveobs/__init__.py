"""Observability analysis for the 1D wave equation on the torus.

Given a spacetime observation region G inside [0, T] x [0, 2*pi), the
library decides whether the wave equation is observable (equivalently,
exactly controllable) and uniquely continued from G, produces explicit
counterexample data when it is not, and estimates the observability
constant when it is.
"""

__version__ = "0.1.0"

from .benchmarks import figure1_region, figure2_region, matching_blocks
from .dsl import (
    DslError,
    DslSemanticError,
    DslSyntaxError,
    parse_region,
    parse_region_file,
    serialize_region,
)
from .estimator import (
    EstimatorResult,
    GramMatrix,
    IndicatorSpectrum,
    gram_matrix,
    high_freq_threshold,
    indicator_fourier,
    min_rayleigh,
    rayleigh_convergence,
    transport_obs_constant,
    verify_high_freq_inequality,
)
from .fibers import FiberData, GccReport, check_gcc, fiber_profiles, synthetic_fibers
from .grid import Resolution
from .regions import (
    CharBand,
    Complement,
    Cylinder,
    Difference,
    Intersection,
    Polygon,
    Product,
    RasterLiteral,
    RasterMask,
    SpacetimeRegion,
    Union,
    from_grid,
    rasterize,
)
from .report import AnalysisReport, build_report
from .symmetry import (
    DecompositionPair,
    FiberGraph,
    SymmetryVerdict,
    WitnessData,
    brute_force_osc,
    build_fiber_graph,
    classify_symmetric_pair,
    detect_osc,
    osc_check_pair,
    witness_from_pair,
    zero_fiber_witness,
)
from .verdict import (
    Verdict,
    classify,
    classify_open_everywhere,
    classify_product,
    gcc_necessity_check,
)
from .wavelab import (
    Forcing,
    Trajectory,
    WaveState,
    conservation_functional,
    green_identity_residual,
    observed_energy,
    solve_forced_wave,
    solve_free_wave,
    solve_free_wave_spectral,
    solve_transport,
    total_energy,
    transport_observed_energy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
