"""Relationship maintenance for repositories of language-typed artifacts.

Declarations in ``.ueber`` files type artifacts by language and relate
them through named functions and relations.  The library collects the
declarations, checks their well-formedness, verifies them against the
files on disk, and can derive missing or outdated artifacts.
"""

from .config import MODE_CHECK, MODE_CREATE, MODE_OVERRIDE, VerifyConfig
from .content import Content, read_content
from .checker import Overload, check_model, overloads_for
from .model import (
    ILL_FORMED,
    UNVERIFIED,
    WARNING,
    CollectedModel,
    Decl,
    ElementOf,
    Equivalence,
    Function,
    Language,
    Macro,
    MapsTo,
    Membership,
    Normalization,
    NotElementOf,
    Problem,
    Relation,
    RelatesTo,
    SourcedDecl,
    collect,
    decl_from_term,
    decl_to_term,
    expand_macro,
    parse_ueber_file,
    register_macro,
    towards_base,
)
from .plugin_host import (
    Failure,
    Foreign,
    HostError,
    InvocationRequest,
    Native,
    PredicateSpec,
    ensure_built,
    invoke,
    is_enabled,
    parse_predicate,
    register_native,
)
from .terms import (
    Atom,
    Compound,
    Float,
    Int,
    Term,
    TermList,
    TermSyntaxError,
    read_term,
    read_term_file,
    write_term,
    write_unit,
)
from .verifier import (
    apply_overload,
    equivalent,
    normalize,
    verify_element_of,
    verify_maps_to,
    verify_model,
)
from . import langkit  # noqa: F401  (registers the native predicates)

__all__ = [name for name in dir() if not name.startswith("_")]
