"""idrecon: identity-focused OSINT investigation framework.

A provenance-tracking entity graph plus a registry of typed transform
modules that collect, analyze, and extract knowledge about digital
identities, ending in actionable outputs such as personalized password
wordlists.
"""

from .graph import (
    DerivationEdge,
    EntityGraph,
    EntityKind,
    EntityNode,
    Provenance,
    SourceCategory,
)
from .engine import Job, JobState, ModuleDescriptor, ModuleEngine, ModulePhase, ParamSpec
from .store import Project

__version__ = "0.1.0"

__all__ = [
    "DerivationEdge",
    "EntityGraph",
    "EntityKind",
    "EntityNode",
    "Job",
    "JobState",
    "ModuleDescriptor",
    "ModuleEngine",
    "ModulePhase",
    "ParamSpec",
    "Project",
    "Provenance",
    "SourceCategory",
    "__version__",
]
