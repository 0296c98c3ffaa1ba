"""Likelihood-derived tree costs and minimum-spanning-tree phylogeny inference."""

from ._core import (
    CostMatrix,
    CostModel,
    EdgeCost,
    EdgeMode,
    Error,
    GeoBounds,
    GeoGraph,
    GeoPrecision,
    Geography,
    PhyloTree,
    RandomWalk,
    RunResult,
    Sample,
    Simulation,
    SiteModel,
    SpectralInfo,
    __version__,
    brute_force_sup_rw,
    build_cost_matrix,
    cutoff_time,
    derive_bounds,
    edge_cost,
    infer_tree,
    make_geography,
    mixing_lambda,
    neg_log_sup_rw,
    neg_log_sup_rw_scan,
    node_cost,
    run_pipeline,
    rw_stationary,
    simulate,
    sup_rw_additive,
    sup_rw_multiplicative,
    sup_seq_loglik,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
