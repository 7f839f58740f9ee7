"""Safety verification of constrained Horn clause programs by
polyhedral abstract interpretation with trace-automaton refinement."""

from hornsafe.chc_core import (
    CHCError,
    Clause,
    LinConstraint,
    ParseError,
    Program,
    parse_constraint,
    parse_program,
)
from hornsafe.driver import Verdict, verify

__version__ = "0.1.0"

__all__ = [
    "CHCError",
    "Clause",
    "LinConstraint",
    "ParseError",
    "Program",
    "Verdict",
    "parse_constraint",
    "parse_program",
    "verify",
    "__version__",
]
