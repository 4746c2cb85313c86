"""Fixed points and transient lengths of one-dimensional sandpiles."""
from .model import (
    IPM,
    SPM,
    Configuration,
    Model,
    Move,
    applicable_moves,
    apply_move,
    height_differences,
    phi,
    run_to_fixpoint_naive,
    step_parallel,
)
from .analysis import (
    Decomposition,
    OrbitGraph,
    build_orbit_graph,
    closed_form_fixpoint,
    f_n,
    integer_decomposition,
    is_lattice,
    is_reachable,
    restrict_length,
    t_seq_closed_form,
)
from .fastfix import (
    FixpointReport,
    Interval,
    compute_interval,
    cut,
    merge_pass,
    render_interval_fixpoint,
    run_fast_general,
    run_fast_spm,
)

__version__ = "0.1.0"
