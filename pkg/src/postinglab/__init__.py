"""postinglab: posting-table string matching over random binary sources.

Build posting tables with complete prefix-free codes, parse queries into
their unique codeword tilings, retrieve match positions by joining posting
lists, and study the retrieval cost both in closed form and by Monte Carlo
experiment.
"""

from .bits import (
    array_to_bits,
    bits_to_array,
    circular_window,
    hamming_weight,
    is_prefix,
    validate_bits,
)
from .codes import (
    CodeTree,
    PostingCode,
    from_codewords,
    kgram_code,
    load_code,
    parse_code_spec,
    random_complete_code,
    rle_code,
    save_code,
    tail_expansion,
)
from .sources import SourceSequence, SourceSpec, sample_source
from .tables import (
    PostingTable,
    build_posting_table,
    list_size,
    naive_scan,
    retrieve_matches,
)
from .queries import (
    CoveringSearch,
    FixedLaw,
    KgramParseSummary,
    Parsing,
    QueryModel,
    RleParseSummary,
    TruncatedGeometricLaw,
    brute_force_min_covering,
    covering_cost,
    parse_law_spec,
    parse_query,
    parse_summary,
    sample_query,
)
from .analytics import (
    EfficiencyFormula,
    MarkovChain,
    analytic_list_size,
    binomial_mgf,
    codeword_frequency,
    expected_kgram_list_size,
    kgram_efficiency,
    kgram_stationary_closed_form,
    kgram_transition_matrix,
    mean_log2_kgram_list_size,
    rle_efficiency,
    stationary_distribution,
)
from .experiments import (
    EfficiencyEstimate,
    SweepConfig,
    best_random_code,
    build_query_model,
    derive_rng,
    derive_seed,
    efficiency_curve,
    estimate_efficiency,
    load_sweep_config,
    sweep,
    sweep_rows,
)

__version__ = "0.1.0"
