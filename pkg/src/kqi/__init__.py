"""Quantitative Index of Knowledge (KQI) for citation networks.

Typical use::

    from kqi import load_graph, augment_super_root, compute_volumes, kqi_all

    g = augment_super_root(load_graph("edges.tsv", "nodes.tsv"))
    kt = kqi_all(g, compute_volumes(g))
"""

from .analysis import (
    BoomReport,
    GrowthSeries,
    LinearFit,
    ParetoReport,
    citation_counts,
    detect_boom,
    fit_linear,
    growth_series,
    h_index,
    pagerank,
    pareto_split,
    quadratic_coefficient,
    rank_correlation,
    threshold_statistic,
)
from .engine import (
    GroupAggregate,
    KqiTable,
    VolumeTable,
    aggregate_kqi,
    compute_volumes,
    fragment_oracle_kqi,
    fragment_oracle_table,
    kqi_all,
    kqi_of,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    GROUP_KINDS,
    ROOT_ID,
    CitationGraph,
    DecaySpec,
    SnapshotSpec,
    apply_decay,
    augment_super_root,
    from_edge_list,
    load_graph,
    snapshot_at,
    write_graph,
)
from .simulate import (
    ActivationConfig,
    ArrivalSchedule,
    BaConfig,
    analytic_predictions,
    bootstrap_percolation,
    generate_ba,
    total_kqi_growth_check,
    total_kqi_series,
)
from .vein import VeinConfig, VeinGraph, export_dot, extract_vein

__version__ = "0.1.0"
