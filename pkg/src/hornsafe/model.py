"""Predicate interpretations: one polyhedron per predicate, over a
canonical argument tuple X1..Xn.

A missing or empty entry means the predicate has no constrained fact,
i.e. it is interpreted as unsatisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from hornsafe.chc_core import (
    FALSE,
    FALSE_PRED,
    Atom,
    Clause,
    LinConstraint,
    Program,
    Variable,
    parse_program,
)
from hornsafe.lra import Polyhedron, entails, is_sat, project


def canonical_args(n: int) -> tuple[Variable, ...]:
    return tuple(Variable(f"X{i}") for i in range(1, n + 1))


@dataclass(frozen=True)
class InterpretationModel:
    entries: Mapping[str, Polyhedron] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self,
            "entries",
            {p: poly for p, poly in self.entries.items() if not poly.empty},
        )

    def predicates(self) -> set[str]:
        return set(self.entries)

    def polyhedron(self, pred: str) -> Polyhedron:
        return self.entries.get(pred, Polyhedron.bottom())

    def fact(self, pred: str, args: tuple[Variable, ...]) -> LinConstraint:
        """The predicate's constraint instantiated on the given tuple."""
        poly = self.entries.get(pred)
        if poly is None:
            return FALSE
        mapping = dict(zip(canonical_args(len(args)), args))
        return poly.constraint.rename(mapping)

    @property
    def has_false(self) -> bool:
        return FALSE_PRED in self.entries

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def pretty(self, arities: Mapping[str, int]) -> str:
        lines = []
        for pred in sorted(self.entries):
            n = 0 if pred == FALSE_PRED else arities[pred]
            clause = Clause(
                "m", Atom(pred, canonical_args(n)), self.entries[pred].constraint, ()
            )
            lines.append(clause.pretty())
        return "\n".join(lines) + ("\n" if lines else "")


def is_model(program: Program, model: InterpretationModel) -> bool:
    """Does every clause hold under the interpretation?

    The reserved head is treated like any 0-ary predicate, so a clause
    `false :- body` holds exactly when the interpreted body is
    unsatisfiable or the model makes false true.  Safety additionally
    needs `not model.has_false`.
    """
    for clause in program:
        body = clause.constraint.conjoin(
            *(model.fact(a.pred, a.args) for a in clause.body)
        )
        if is_sat(body) is None:
            continue
        if not entails(body, model.fact(clause.head.pred, clause.head.args)):
            return False
    return True


def load_model(text: str) -> InterpretationModel:
    """Parse a dump produced by InterpretationModel.pretty."""
    prog = parse_program(text)
    entries: dict[str, Polyhedron] = {}
    for clause in prog:
        if clause.body:
            raise ValueError("model entries cannot contain body atoms")
        if clause.head.pred in entries:
            raise ValueError(f"duplicate entry for {clause.head.pred}")
        args = clause.head.args
        canon = canonical_args(len(args))
        constraint = clause.constraint
        # auxiliary variables that collide with the canonical names would
        # be captured by the renaming; move them out of the way first
        clashes = (constraint.vars() & set(canon)) - set(args)
        if clashes:
            fresh = {v: Variable(v.name + "__aux") for v in clashes}
            constraint = constraint.rename(fresh)
        constraint = constraint.rename(dict(zip(args, canon)))
        if not constraint.vars() <= set(canon):
            constraint = project(constraint, canon)
        entries[clause.head.pred] = Polyhedron.of(constraint)
    return InterpretationModel(entries)
