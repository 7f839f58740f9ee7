"""Abstract interpretation of clause programs over convex polyhedra.

Computes, per predicate, a polyhedron over the canonical argument
tuple that over-approximates the predicate's least model: a chaotic
iteration joins clause-wise abstract posts with convex hulls, widens
each predicate after a configurable number of joins so ascending
chains stop, then runs one descending pass to claw back some of the
precision widening threw away.  The result is always a pre-fixpoint:
every clause's abstract post is contained in its head's entry.
"""

from __future__ import annotations

from hornsafe.chc_core import Clause, Program
from hornsafe.lra import Polyhedron, hull, project, widen
from hornsafe.model import InterpretationModel, canonical_args


def clause_post(clause: Clause, state: InterpretationModel) -> Polyhedron:
    """Abstract consequence of one clause: conjoin the interpreted body
    atoms with the clause constraint, project onto the head tuple, and
    rename onto canonical arguments."""
    conj = clause.constraint.conjoin(
        *(state.fact(a.pred, a.args) for a in clause.body)
    )
    head_args = clause.head.args
    poly = Polyhedron.of(project(conj, head_args))
    if poly.empty:
        return poly
    return poly.rename(dict(zip(head_args, canonical_args(len(head_args)))))


def analyze(program: Program, widen_delay: int = 3) -> InterpretationModel:
    """Over-approximate the least model.

    Worklist iteration over clauses in source order; an entry that
    keeps growing is widened once its join count passes widen_delay,
    which bounds every chain because widening can only keep rows the
    previous entry already had.
    """
    clauses = list(program)
    dependents: dict[str, list[int]] = {}
    for i, clause in enumerate(clauses):
        for atom in clause.body:
            dependents.setdefault(atom.pred, []).append(i)

    state: dict[str, Polyhedron] = {}
    joins: dict[str, int] = {}
    pending = set(range(len(clauses)))
    while pending:
        i = min(pending)
        pending.discard(i)
        clause = clauses[i]
        pred = clause.head.pred
        post = clause_post(clause, InterpretationModel(state))
        if post.empty:
            continue
        old = state.get(pred, Polyhedron.bottom())
        if post.entails_poly(old):
            continue
        grown = hull(old, post)
        joins[pred] = joins.get(pred, 0) + 1
        if joins[pred] > widen_delay:
            grown = widen(old, grown)
        state[pred] = grown
        pending.update(dependents.get(pred, ()))

    # one descending pass: posts under a pre-fixpoint stay inside it,
    # and their join is itself a pre-fixpoint again
    model = InterpretationModel(state)
    narrowed: dict[str, Polyhedron] = {}
    for clause in clauses:
        post = clause_post(clause, model)
        if post.empty:
            continue
        pred = clause.head.pred
        narrowed[pred] = hull(narrowed.get(pred, Polyhedron.bottom()), post)
    return InterpretationModel(narrowed)


def has_false(model: InterpretationModel) -> bool:
    return model.has_false
