"""topicforge: curation toolkit for a multilingual, multi-parent topic ontology."""

from .model import (
    DisplayNameRecord,
    Ontology,
    TopicEdge,
    TopicNode,
    ancestors,
    descendants,
    paths_to_roots,
    resolve_display,
    would_create_cycle,
)

__all__ = [
    "DisplayNameRecord",
    "Ontology",
    "TopicEdge",
    "TopicNode",
    "ancestors",
    "descendants",
    "paths_to_roots",
    "resolve_display",
    "would_create_cycle",
]

__version__ = "0.1.0"
