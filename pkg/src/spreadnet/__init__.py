"""Diffusion-network analysis of scholarly papers on social media.

The package turns raw mention/interaction logs into a directed
collector-to-spreader diffusion graph, scores users with HITS, links
spreaders whose audiences overlap, and profiles the resulting
communities. ``spreadnet.pipeline`` chains the steps into persisted
stages; the ``spreadnet`` console script drives them.
"""

from spreadnet.ingest import (
    ArxivRecord,
    IngestError,
    IngestStats,
    InteractionEvent,
    MentionEvent,
    UserRecord,
    normalize_arxiv_id,
    parse_arxiv_metadata,
    parse_interaction_stream,
    parse_mention_stream,
    parse_user_records,
    split_native_retweets,
)
from spreadnet.diffusion import DiffusionGraph, UserIndex, build_diffusion_graph, dataset_summary
from spreadnet.hits import HitsScores, RoleBreakdown, classify_roles, compute_hits, score_ranks
from spreadnet.graphs import UndirectedGraph
from spreadnet.spreaders import (
    SpreaderNetwork,
    build_spreader_network,
    collector_sets,
    overlap_coefficient,
)
from spreadnet.communities import (
    ComponentReport,
    Partition,
    connected_components,
    louvain,
    modularity,
)
from spreadnet.centrality import CentralityScores, betweenness, rank_key_people
from spreadnet.profiles import (
    CommunityProfile,
    UserProfile,
    build_user_profiles,
    communication_language,
    community_profiles,
    main_category,
    mention_period,
    mention_time_series,
    profile_language,
    rollup_category,
    script_language,
    user_category,
)
from spreadnet.export import export_graphml
from spreadnet.pipeline import PipelineConfig, StageError, run_stage

__version__ = "0.1.0"

__all__ = [
    "ArxivRecord",
    "CentralityScores",
    "CommunityProfile",
    "ComponentReport",
    "DiffusionGraph",
    "HitsScores",
    "IngestError",
    "IngestStats",
    "InteractionEvent",
    "MentionEvent",
    "Partition",
    "PipelineConfig",
    "RoleBreakdown",
    "SpreaderNetwork",
    "StageError",
    "UndirectedGraph",
    "UserIndex",
    "UserProfile",
    "UserRecord",
    "betweenness",
    "build_diffusion_graph",
    "build_spreader_network",
    "build_user_profiles",
    "classify_roles",
    "collector_sets",
    "communication_language",
    "community_profiles",
    "compute_hits",
    "connected_components",
    "dataset_summary",
    "export_graphml",
    "louvain",
    "main_category",
    "mention_period",
    "mention_time_series",
    "modularity",
    "normalize_arxiv_id",
    "overlap_coefficient",
    "parse_arxiv_metadata",
    "parse_interaction_stream",
    "parse_mention_stream",
    "parse_user_records",
    "profile_language",
    "rank_key_people",
    "rollup_category",
    "run_stage",
    "score_ranks",
    "script_language",
    "split_native_retweets",
    "user_category",
]
