"""Electrostatics-driven global placement on a rectangle.

Blocks are positive charges; their density sources a potential with zero
normal derivative on the region boundary. The potential's cosine-series
coefficients have closed forms in the block rectangles (exact path) or come
from fast cosine transforms of binned densities (fast path), and the
resulting field spreads blocks apart during gradient-based placement.
"""

from ._kernels import HAVE_EXT, IMPL
from .density import (
    DensityGrid,
    ExactDensity,
    build_bin_density,
    exact_density_at,
    exact_density_for,
    exact_density_from_rects,
    overflow_ratio,
)
from .fastsolve import (
    FieldMap,
    ReducedCoefficients,
    fast_field_map,
    interpolate_field,
    naive_field_map,
    naive_reduced_transform,
    reduced_transform,
    scale_coefficients,
    solve_fast,
    spectral_baseline,
)
from .legalize import LegalizeError, count_overlaps, detailed_swap, legalize_rows
from .nesterov import NesterovState, nesterov_init, nesterov_step
from .netlist import (
    Block,
    Circuit,
    Net,
    NetlistError,
    Placement,
    generate_synthetic,
    parse_bookshelf,
    write_placement,
)
from .placer import (
    GradientInfo,
    PlacementEngine,
    PlacerConfig,
    PlacerState,
    TraceRow,
    hpwl,
    initial_lambda,
    insert_fillers,
    lse_wirelength,
    potential_energy,
    run_global_placement,
    update_lambda,
)
from .series import (
    SpectralCoefficients,
    TailBound,
    coefficients_by_quadrature,
    eval_field,
    eval_potential,
    exact_coefficients,
    series_abs_bound,
    tail_bound,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
