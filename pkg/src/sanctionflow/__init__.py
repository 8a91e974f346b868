"""Sanctions-impact analytics over Bitcoin-style address-transaction graphs."""

from .behaviour import BehaviourReport, behavioural_report, category_share
from .flow import (
    BalanceBucket,
    FlowMetrics,
    TimeWindow,
    WindowLabel,
    activity_counts,
    address_flow_metrics,
    balance_at,
    balance_histogram,
    entity_flow_metrics,
    violation_aggregate,
    window_bounds,
)
from .graph import (
    AddressTxGraph,
    Direction,
    ExpansionSpec,
    Subgraph,
    build_graph,
    expand_n_step,
    reached_addresses,
)
from .ingest import (
    BehaviourCategory,
    IngestError,
    LabelSet,
    PriceTable,
    SanctionedEntity,
    TxIndex,
    TxRecord,
    ViolationCode,
    build_index,
    parse_labels,
    parse_price_table,
    parse_sdn_list,
    parse_transactions,
)
from .report import dataset_stats, emit_all

__version__ = "0.1.0"
