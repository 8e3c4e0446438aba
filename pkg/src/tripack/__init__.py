"""Triangle packings in randomly perturbed graphs.

Graphs with bitset adjacency, seedable random models, exact small-scale
oracles, regularity testing, the constructive packing pipelines, and a Monte
Carlo experiment harness.
"""

from .graph import Graph, bits, induced, iter_bits, read_edge_list, union, write_edge_list
from .generators import (
    complete_bipartite,
    complete_multipartite,
    gnp,
    k4_counterexample,
    random_bipartite,
    stable_model,
)
from .oracle import (
    Matching,
    OracleResult,
    TrianglePacking,
    count_triangles,
    greedy_triangle_packing,
    hall_violator,
    max_bipartite_matching,
    max_triangle_packing_exact,
)
from .regularity import (
    PairStats,
    density,
    is_super_regular,
    mdl_count,
    pair_stats,
    regularity_refute,
    trim_super_regular,
)
from .stability import StabilityReport, find_stable_partition, verify_stability
from .packing import (
    Cherry,
    PackResult,
    StarFamily,
    balance_cherry,
    build_F,
    build_H,
    cherry_factor,
    extremal_pack,
    find_star_family,
    good_for_x,
    greedy_cover,
    max_cut_bipartition,
    pair_factor,
    perturbed_pack,
    random_greedy_matching,
    round_greedy_triangles,
    stars_to_triangles,
    sublinear_pack,
)
from .experiments import (
    ExperimentConfig,
    FailureWitness,
    TrialRecord,
    failure_certificate,
    k4_deficit_experiment,
    matching_threshold_experiment,
    run_trial,
    sweep,
)

__version__ = "0.1.0"
