"""Tree interpolants for infeasible derivation trees, and the automata
they induce.

A tree interpolant labels every node with a formula over that node's
atom tuple such that the root is false and each node's label follows
from its clause constraint plus its children's labels.  Such a
labelling proves every derivation sharing the tree's shape infeasible,
and lifting the labels to automaton states yields a tree automaton that
accepts only infeasible traces: exactly the language the refinement
loop wants to remove.

Labels are found one binary interpolation per node, bottom-up in
reverse preorder.  The second argument handed to the interpolator is
not the plain context formula but the current rewritten tree: clause
constraints for not-yet-processed nodes, computed labels for the
maximal already-processed subtrees outside the node.  Substituting
labels as they are found keeps every binary interpolation's
precondition (joint unsatisfiability) true and is what makes the
per-node conditions compose; interpolating every node against its raw
context independently can produce labels that are only pairwise
justified and fail the root condition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from hornsafe.chc_core import (
    FALSE,
    FALSE_PRED,
    TRUE,
    Atom,
    LinConstraint,
    Program,
    Variable,
)
from hornsafe.derivations import AndTree, formula
from hornsafe.fta import TreeAutomaton, enumerate_terms, trace_fta
from hornsafe.lra import Polyhedron, entails, interpolate, is_sat, project
from hornsafe.model import InterpretationModel, canonical_args
from hornsafe.derivations import feasible as trace_feasible


class FeasibleTreeError(ValueError):
    """Tree interpolation needs an infeasible tree."""


@dataclass(frozen=True)
class TreeInterpolant:
    """Node labels, positionally indexed like the source tree."""

    atoms: tuple[Atom, ...]
    labels: tuple[LinConstraint, ...]

    def atom(self, i: int) -> Atom:
        return self.atoms[i - 1]

    def label(self, i: int) -> LinConstraint:
        return self.labels[i - 1]

    def __len__(self) -> int:
        return len(self.labels)

    def instantiated(self, i: int, args: tuple[Variable, ...]) -> LinConstraint:
        """The node's label renamed from its atom tuple onto args."""
        return self.label(i).rename(dict(zip(self.atom(i).args, args)))


def tree_interpolant(tree: AndTree) -> TreeInterpolant:
    if is_sat(formula(tree)) is not None:
        raise FeasibleTreeError("derivation tree is feasible")
    n = len(tree)
    labels: dict[int, LinConstraint] = {1: FALSE}
    for i in range(n, 1, -1):
        node = tree.node(i)
        first = node.constraint.conjoin(*(labels[c] for c in node.children))
        after = node.index + node.size
        second = TRUE.conjoin(
            *(tree.node(j).constraint for j in range(1, i)),
            *(
                labels[j]
                for j in range(after, n + 1)
                if tree.node(j).parent < i
            ),
        )
        # the halves only talk through the node's interface variables,
        # so the context can be projected onto them first; that keeps
        # the multiplier system small on deep trees and changes neither
        # joint infeasibility nor the admissible labels
        shared = first.vars() & second.vars()
        if not second.vars() <= shared:
            second = project(second, shared)
        labels[i] = interpolate(first, second)
    return TreeInterpolant(
        atoms=tuple(node.atom for node in tree),
        labels=tuple(labels[i] for i in range(1, n + 1)),
    )


def check_tree_interpolant(tree: AndTree, ti: TreeInterpolant) -> bool:
    """The three defining conditions, checked with the solver: false at
    the root, children's labels plus the clause constraint entail each
    node's label, and labels only use their node's atom variables."""
    if len(tree) != len(ti):
        raise ValueError("tree and labelling differ in shape")
    if is_sat(ti.label(1)) is not None:
        return False
    for node in tree:
        premise = node.constraint.conjoin(*(ti.label(c) for c in node.children))
        if not entails(premise, ti.label(node.index)):
            return False
        if not ti.label(node.index).vars() <= set(node.atom.args):
            return False
    return True


@dataclass(frozen=True)
class InterpolantMapping:
    """Per-node labels keyed by (predicate, node index)."""

    entries: tuple[tuple[Atom, int, LinConstraint], ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def interpolant_mapping(ti: TreeInterpolant) -> InterpolantMapping:
    return InterpolantMapping(
        tuple(
            (ti.atom(i), i, ti.label(i)) for i in range(1, len(ti) + 1)
        )
    )


def conjunctive_mapping(ti: TreeInterpolant) -> InterpretationModel:
    """One entry per predicate: the conjunction of all its node labels,
    renamed onto the canonical tuple.  Unsatisfiable conjunctions
    (the root's in particular) yield no entry."""
    conj: dict[str, LinConstraint] = {}
    for atom, i, label in interpolant_mapping(ti):
        canon = canonical_args(len(atom.args))
        renamed = label.rename(dict(zip(atom.args, canon)))
        conj[atom.pred] = conj.get(atom.pred, TRUE) & renamed
    return InterpretationModel(
        {pred: Polyhedron.of(c) for pred, c in conj.items()}
    )


ERROR_STATE = "error"


def _state_name(pred: str, index: int) -> str:
    return ERROR_STATE if pred == FALSE_PRED else f"{pred}^{index}"


def interpolant_automaton(
    program: Program, tree: AndTree, ti: TreeInterpolant
) -> TreeAutomaton:
    """States are the labelled tree nodes; a clause moves some nodes to
    a node exactly when the labels justify the step, so every accepted
    trace carries an inductive proof of infeasibility down to the
    final (root) state."""
    if not check_tree_interpolant(tree, ti):
        raise ValueError("labelling is not a tree interpolant")
    # nodes whose labels coincide after renaming onto the canonical
    # tuple are interchangeable; keeping one representative per class
    # keeps the state count at the number of distinct proofs, not the
    # tree size
    rep: dict[int, int] = {}
    classes: dict[tuple[str, LinConstraint], int] = {}
    for i in range(1, len(ti) + 1):
        atom = ti.atom(i)
        canon = ti.label(i).rename(
            dict(zip(atom.args, canonical_args(len(atom.args))))
        )
        rep[i] = classes.setdefault((atom.pred, canon), i)

    by_pred: dict[str, list[int]] = {}
    for i in sorted(set(rep.values())):
        by_pred.setdefault(ti.atom(i).pred, []).append(i)

    states = {_state_name(ti.atom(i).pred, i) for i in rep.values()}
    finals = {_state_name(ti.atom(1).pred, rep[1])}
    base = trace_fta(program)
    transitions = set()
    cache: dict[tuple[int, tuple[Variable, ...]], LinConstraint] = {}

    def inst(i: int, args: tuple[Variable, ...]) -> LinConstraint:
        key = (i, args)
        if key not in cache:
            cache[key] = ti.instantiated(i, args)
        return cache[key]

    for clause in program:
        head_nodes = by_pred.get(clause.head.pred, ())
        body_nodes = [by_pred.get(a.pred, ()) for a in clause.body]
        for j in head_nodes:
            target_label = inst(j, clause.head.args)
            for combo in itertools.product(*body_nodes):
                premise = clause.constraint.conjoin(
                    *(inst(jm, a.args) for jm, a in zip(combo, clause.body))
                )
                if entails(premise, target_label):
                    transitions.add(
                        (
                            clause.cid,
                            tuple(
                                _state_name(a.pred, jm)
                                for jm, a in zip(combo, clause.body)
                            ),
                            _state_name(clause.head.pred, j),
                        )
                    )
    return TreeAutomaton(
        frozenset(states), frozenset(finals), dict(base.alphabet), frozenset(transitions)
    )


def check_soundness(program: Program, automaton: TreeAutomaton, depth: int) -> bool:
    """Does the automaton accept only infeasible traces, up to the
    given enumeration depth?"""
    return all(
        trace_feasible(program, t) is None
        for t in enumerate_terms(automaton, depth)
    )
