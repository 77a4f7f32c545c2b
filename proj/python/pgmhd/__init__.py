"""Leveled frequency graphs for massive hierarchical data."""

from ._pgmhd import (
    AmbiguityReport,
    ArgumentError,
    CorruptionError,
    Error,
    FormatError,
    IoError,
    LeveledGraph,
    LookupError,
    MutationError,
    StructuralError,
    UndefinedDistribution,
    ambiguity_report,
    classification_score,
    classify_instance,
    classify_path,
    co_score,
    dense_cpt_entries,
    edge_prob,
    from_model_string,
    load_file,
    m_estimate_score,
    merge,
    npmi,
    parse_paths,
    parse_search_log,
    related_terms,
    save_file,
    to_model_string,
    train_search_log,
    train_sharded,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
