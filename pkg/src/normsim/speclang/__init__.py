"""A small IOA-like specification language: parsing, elaboration and VC generation."""
from .elaborate import Bounds, ElaborationError, elaborate_explicit, explicit_forward, explicit_refinement
from .semantics import AssumptionViolated, evaluate, prime, substitute
from .smtlib import SExprError, validate_smtlib
from .symcert import (
    CertificateShapeError, SymbolicCertificate, load_symbolic_certificate,
    parse_symbolic_certificate, refinement_shape,
)
from .syntax import (
    SpecAst, SpecSyntaxError, SpecTypeError, format_expr, format_spec, parse_expr, parse_spec,
)
from .vcgen import AlphabetError, vcgen_forward, vcgen_refinement
from .fixtures import fixture_path, load_fixture_spec

__all__ = [
    "Bounds", "ElaborationError", "elaborate_explicit", "explicit_forward", "explicit_refinement",
    "AssumptionViolated", "evaluate", "prime", "substitute", "SExprError", "validate_smtlib",
    "CertificateShapeError", "SymbolicCertificate", "load_symbolic_certificate",
    "parse_symbolic_certificate", "refinement_shape", "SpecAst", "SpecSyntaxError",
    "SpecTypeError", "format_expr", "format_spec", "parse_expr", "parse_spec",
    "AlphabetError", "vcgen_forward", "vcgen_refinement", "fixture_path", "load_fixture_spec",
]
