"""Dependency grammar with order domains.

A sentence is analyzed on two linked levels: an unordered typed dependency
tree, and a hierarchy of contiguous word groups (order domains) that carry
the word order.  Each word's lexical entry contributes a domain sequence;
words are placed into a domain of a transitive head, the positional head,
which may differ from the head in the tree.  Validation, parsing,
generation, and an exhaustive oracle for short inputs live in the
submodules; this package re-exports the working surface.
"""

from .constraints import (
    FOLLOWS,
    LABELED_PAIR,
    PRECEDES,
    SELF_VS_ALL,
    UNBOUNDED,
    CardinalityConstraint,
    DomainFeatureRequirement,
    PrecedencePredicate,
    check_cardinality,
    check_domain_features,
    check_extraction,
    check_precedence,
    check_valency,
)
from .core import (
    TOP_DOMAIN_ID,
    DependencyEdge,
    DependencyStructure,
    DependencyTree,
    OrderDomain,
    OrderDomainStructure,
    OrderInconsistencyError,
    ResourceLimitError,
    StructureError,
    StructureIndex,
    TokenLimitError,
    UnknownTokenError,
    ValidationReport,
    Violation,
    WordToken,
    domain_id,
    realize_structure,
    surface_order,
    validate_domain_structure,
    validate_tree,
)
from .engine import (
    DEFAULT_MAX_CANDIDATES,
    GenerationResult,
    ParseResult,
    generate,
    parse,
)
from .lexicon import (
    DomainTemplate,
    LexicalEntry,
    Lexicon,
    LexiconError,
    ValencySlot,
    entries_for,
    load_lexicon,
    reference_lexicon,
    reference_lexicon_text,
    render_lexicon,
)
from .oracle import OracleConfig, oracle_orders, oracle_parse
from .serialize import (
    SerializationError,
    canonical_structure,
    parse_structure_json,
    parse_structure_text,
    parse_tree_json,
    parse_tree_text,
    render_structure_json,
    render_structure_text,
    render_tree_json,
    render_tree_text,
)
from .validate import structure_is_valid, validate_structure

__version__ = "0.1.0"

__all__ = [
    "CardinalityConstraint",
    "DEFAULT_MAX_CANDIDATES",
    "DependencyEdge",
    "DependencyStructure",
    "DependencyTree",
    "DomainFeatureRequirement",
    "DomainTemplate",
    "FOLLOWS",
    "GenerationResult",
    "LABELED_PAIR",
    "LexicalEntry",
    "Lexicon",
    "LexiconError",
    "OracleConfig",
    "OrderDomain",
    "OrderDomainStructure",
    "OrderInconsistencyError",
    "PRECEDES",
    "ParseResult",
    "PrecedencePredicate",
    "ResourceLimitError",
    "SELF_VS_ALL",
    "SerializationError",
    "StructureError",
    "StructureIndex",
    "TOP_DOMAIN_ID",
    "TokenLimitError",
    "UNBOUNDED",
    "UnknownTokenError",
    "ValencySlot",
    "ValidationReport",
    "Violation",
    "WordToken",
    "canonical_structure",
    "check_cardinality",
    "check_domain_features",
    "check_extraction",
    "check_precedence",
    "check_valency",
    "domain_id",
    "entries_for",
    "generate",
    "load_lexicon",
    "oracle_orders",
    "oracle_parse",
    "parse",
    "parse_structure_json",
    "parse_structure_text",
    "parse_tree_json",
    "parse_tree_text",
    "realize_structure",
    "reference_lexicon",
    "reference_lexicon_text",
    "render_lexicon",
    "render_structure_json",
    "render_structure_text",
    "render_tree_json",
    "render_tree_text",
    "structure_is_valid",
    "surface_order",
    "validate_domain_structure",
    "validate_structure",
    "validate_tree",
]
