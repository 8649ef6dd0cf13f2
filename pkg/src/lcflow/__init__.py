"""Length-constrained multi-commodity flows with exact rational arithmetic."""
from .boosting import (BoostResult, MincostProblem, MincostResult, boost, concurrent_flow,
                       nonconcurrent_flow, solve_mincost)
from .covers import NeighborhoodCover, build_cover, verify_cover
from .cuts import (CutSequenceWitness, DemandMatchingGraph, MovingCut, apply_cut,
                   build_demand_matching_graph, check_spg, cut_sparsity, forest_cover,
                   matching_dispersed_demand, separated_demand, tree_matching_demand,
                   verify_union_witness)
from .errors import (InvalidInstance, LCFlowError, OracleBoundExceeded, OracleContractViolation,
                     ParseError, PathFormRequired, PremiseViolated)
from .graph import (EDGE, VERTEX, Demand, EdgeFlow, FlowStats, Graph, PathFlow, flow_stats,
                    split_vertices, to_edge_representation)
from .lowstep import approx_mtl_flow, lowstep_directed, lowstep_undirected
from .maxflow import (MaxflowConfig, MaxflowResult, blocking_flow, build_expanded_dag, lc_mc_maxflow,
                      lc_st_maxflow, path_blocker, path_count_flow)
from .rounding import decompose_dag_flow, round_flow

__version__ = "0.1.0"

__all__ = [
    "BoostResult", "MincostProblem", "MincostResult", "boost", "concurrent_flow",
    "nonconcurrent_flow", "solve_mincost", "NeighborhoodCover", "build_cover", "verify_cover",
    "CutSequenceWitness", "DemandMatchingGraph", "MovingCut", "apply_cut",
    "build_demand_matching_graph", "check_spg", "cut_sparsity", "forest_cover",
    "matching_dispersed_demand", "separated_demand", "tree_matching_demand", "verify_union_witness",
    "InvalidInstance", "LCFlowError", "OracleBoundExceeded", "OracleContractViolation",
    "ParseError", "PathFormRequired", "PremiseViolated", "EDGE", "VERTEX", "Demand", "EdgeFlow",
    "FlowStats", "Graph", "PathFlow", "flow_stats", "split_vertices", "to_edge_representation",
    "approx_mtl_flow", "lowstep_directed", "lowstep_undirected", "MaxflowConfig", "MaxflowResult",
    "blocking_flow", "build_expanded_dag", "lc_mc_maxflow", "lc_st_maxflow", "path_blocker",
    "path_count_flow", "decompose_dag_flow", "round_flow",
]
