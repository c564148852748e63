"""Expanded cross neighborhood (ECN) re-ranking for person re-identification."""

from ._ecn import (
    EcnError,
    ecn_distance,
    evaluate,
    expand_neighbors,
    generate_clusters,
    num_threads,
    oracle_ecn,
    pairwise_cosine,
    pairwise_sq_euclidean,
    rank_dist,
    rank_list_similarity,
    rank_lists,
    read_distance,
    read_features,
    read_metadata,
    rerank,
    set_num_threads,
    write_distance,
    write_features,
    write_metadata,
)

__all__ = [
    "EcnError",
    "ecn_distance",
    "evaluate",
    "expand_neighbors",
    "generate_clusters",
    "num_threads",
    "oracle_ecn",
    "pairwise_cosine",
    "pairwise_sq_euclidean",
    "rank_dist",
    "rank_list_similarity",
    "rank_lists",
    "read_distance",
    "read_features",
    "read_metadata",
    "rerank",
    "set_num_threads",
    "write_distance",
    "write_features",
    "write_metadata",
]
