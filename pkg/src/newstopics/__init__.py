"""Multimodal news topic detection and tracking.

Stories are clustered into topics by maximizing a posterior over partitions
with Swendsen-Wang Cuts, and topics in consecutive windows are linked into
trajectories.
"""
from .estimation import ClusterScorer, Partition, fit_topic, log_posterior
from .graph import AdjacencyGraph, build_graph, edge_distance
from .metrics import PairAnnotation, clustering_accuracy, nmi, pairwise_f1, pairwise_pr
from .model import (
    COMPONENTS,
    HyperParams,
    InvalidInputError,
    InvalidParameterError,
    Story,
    TopicParams,
    score_root,
    score_topic,
)
from .oracle import exact_map
from .swc import CoolingSchedule, run_swc
from .synth import SynthConfig, generate
from .tracking import TopicNode, Trajectory, build_trajectories, topic_similarity

__version__ = "0.1.0"

__all__ = [
    "COMPONENTS", "AdjacencyGraph", "ClusterScorer", "CoolingSchedule", "HyperParams",
    "InvalidInputError", "InvalidParameterError", "PairAnnotation", "Partition", "Story",
    "SynthConfig", "TopicNode", "TopicParams", "Trajectory", "build_graph", "build_trajectories",
    "clustering_accuracy", "edge_distance", "exact_map", "fit_topic", "generate", "log_posterior",
    "nmi", "pairwise_f1", "pairwise_pr", "run_swc", "score_root", "score_topic", "topic_similarity",
]
