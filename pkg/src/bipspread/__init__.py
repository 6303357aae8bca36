"""Bipolar spreading-matrix design and sparse-vector-code simulation."""

from .bitmatrix import (
    BipolarMatrix,
    GramProfile,
    coherence,
    delete_row,
    inner_product,
    load_matrix,
    save_matrix,
    welch_bound,
)
from .codec import (
    ChannelRealization,
    DecodeError,
    SparseCodeParams,
    apply_channel,
    draw_channel,
    min_length,
    mmp_decode,
    sparse_demap,
    sparse_map,
    spread,
)
from .constructors import METHODS, ConstructionSpec, construct, hadamard
from .sim import SimConfig, SimResult, compare_methods, gram_histogram_export, run_bler
from .solver import (
    FeasibilityProblem,
    FeasibilityResult,
    backend_name,
    count_solver_nodes,
    find_feasible_column,
    solve,
)

__version__ = "0.1.0"
