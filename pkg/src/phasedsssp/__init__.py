"""Phased single-source shortest paths: criteria simulator, parallel solvers and experiment tools."""

from .criteria import (
    FULL_OR,
    SIMPLE_OR,
    STATIC_OR,
    AnyOf,
    Crit,
    PhaseTrace,
    eval_criterion,
    oracle_phase_bound,
    parse_criterion,
    run_phased,
)
from .delta import delta_stepping
from .fitting import fit_curves
from .graph import GenSpec, Graph, compute_minima, gen_kronecker, gen_uniform, load_edge_list
from .parallel import RunConfig, parallel_sssp
from .sssp import bellman_ford_oracle, dijkstra

__all__ = [
    "AnyOf", "Crit", "FULL_OR", "GenSpec", "Graph", "PhaseTrace", "RunConfig", "SIMPLE_OR", "STATIC_OR",
    "bellman_ford_oracle", "compute_minima", "delta_stepping", "dijkstra", "eval_criterion", "fit_curves",
    "gen_kronecker", "gen_uniform", "load_edge_list", "oracle_phase_bound", "parallel_sssp", "parse_criterion",
    "run_phased",
]
