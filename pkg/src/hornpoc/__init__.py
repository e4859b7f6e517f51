"""Horn clause attack search and PoC generation for security API models."""

from .codegen import LiteralAllocator, PocProgram, render, translate_node, translate_term, translate_tree
from .engine import (
    DerivationNode,
    DerivationTree,
    DeriveResult,
    DeriveStatus,
    SearchBudget,
    check_tree,
    derive,
    dump_tree,
    oracle_derivable,
)
from .model import (
    Clause,
    ClauseAnnotation,
    Diagnostic,
    Disequality,
    Fact,
    FunctionSymbolAnnotation,
    Model,
    NameSignature,
    Predicate,
    PredicateSymbol,
    Query,
    Severity,
    SourceSpan,
    subsumes,
    validate,
)
from .parser import ParseResult, parse_model, print_model
from .terms import (
    ANY_TYPE,
    FunApp,
    FunctionSymbol,
    Name,
    Substitution,
    Term,
    UnifyError,
    Variable,
    apply,
    is_closed,
    match,
    unify,
)

__version__ = "0.1.0"
