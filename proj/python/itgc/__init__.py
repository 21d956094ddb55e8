"""Iterative text-guided clustering: concept generation, encoding, clustering
and silhouette-guided search over a language concept space."""

from itgc._itgc import (
    ItgcError,
    SynthWorld,
    accuracy,
    dbscan,
    generate_world,
    hdbscan_lite,
    initial_prompt,
    kmeans,
    parse_concept_list,
    project,
    render_concept_list,
    run_oracle_search,
    silhouette,
    standardize_columns,
    top_activations,
)

__all__ = [
    "ItgcError",
    "SynthWorld",
    "accuracy",
    "dbscan",
    "generate_world",
    "hdbscan_lite",
    "initial_prompt",
    "kmeans",
    "parse_concept_list",
    "project",
    "render_concept_list",
    "run_oracle_search",
    "silhouette",
    "standardize_columns",
    "top_activations",
]
