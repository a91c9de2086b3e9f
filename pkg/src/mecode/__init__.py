"""Minimum-energy source coding for channels with asymmetric per-bit costs.

Builds fixed-length and variable-length (prefix) codebooks that minimize
expected transmission energy rather than expected length, encodes and
decodes bitstreams with them, evaluates the resulting energy/bandwidth
trade-offs, and maps RFID backscatter link physics onto the abstract cost
model.
"""

from .codebook import (
    Codebook,
    Codeword,
    codebook_from_json,
    codebook_to_json,
    is_prefix_free,
    kraft_sum,
    prefix_free,
)
from .codec import BitStream, decode, encode, stream_cost
from .costmodel import (
    CostModel,
    SymbolSource,
    codeword_cost,
    codeword_duration,
    cost_model_from_json,
    cost_model_to_json,
    model_from_gamma,
    source_from_json,
    source_to_json,
    symbol_source,
    uniform_source,
)
from .errors import (
    DecodeError,
    InfeasibleError,
    MecodeError,
    SearchBudgetError,
    ValidationError,
)
from .fixedopt import FixedScan, cheapest_words, fixed_cost, l_min, min_weight_sum, optimize_fixed
from .metrics import (
    CodebookMetrics,
    SweepSpec,
    average_cost,
    average_duration,
    average_length,
    energy_saving,
    epsilon_max_asymptote,
    epsilon_max_fixed,
    epsilon_max_variable,
    evaluate,
    rate_reduction,
    source_entropy,
    sweep,
    sweep_to_csv,
    uncoded_cost,
)
from .rfid import (
    RfidLink,
    cost_model_from_link,
    cost_ratio,
    halfwave_baseline,
    harvested_dc_power,
    input_power,
    link_summary,
    tag_costs,
)
from .varopt import (
    ParentChildMatrix,
    PrefixTree,
    SelectionVector,
    build_tree,
    node_index,
    oracle_prefix,
    optimize_prefix,
    parent_child_pairs,
)

__version__ = "0.1.0"
