"""Derivation trees for trace terms.

A trace term picks one clause per node; the derivation tree (AND-tree)
instantiates each clause with fresh variables, identifies every head
tuple with the body-atom occurrence above it, and labels each node with
the instantiated constraint.  A trace is feasible exactly when the
conjunction of all node labels is satisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from hornsafe.chc_core import TRUE, Atom, LinConstraint, Program, Variable
from hornsafe.fta import TraceTerm
from hornsafe.lra import Witness, is_sat


class DerivationError(Exception):
    pass


@dataclass(frozen=True)
class Node:
    """One clause instance.  Indices are preorder positions starting at
    1; a subtree occupies the contiguous range [index, index + size)."""

    index: int
    atom: Atom
    cid: str
    constraint: LinConstraint
    children: tuple[int, ...]
    parent: int
    size: int


@dataclass(frozen=True)
class AndTree:
    nodes: tuple[Node, ...]

    def node(self, i: int) -> Node:
        if not 1 <= i <= len(self.nodes):
            raise DerivationError(f"no node {i}")
        return self.nodes[i - 1]

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self.nodes)

    def subtree_indices(self, i: int) -> range:
        n = self.node(i)
        return range(n.index, n.index + n.size)

    def pretty(self) -> str:
        depths = {0: -1}
        lines = []
        for node in self.nodes:
            depths[node.index] = depths[node.parent] + 1
            indent = "  " * depths[node.index]
            body = node.constraint.pretty() or "true"
            lines.append(f"{indent}{node.index}. {node.atom} [{node.cid}] {body}")
        return "\n".join(lines) + "\n"


def and_tree(program: Program, trace: TraceTerm, *, integrity_root: bool = True) -> AndTree:
    """Build the derivation tree for a trace.

    Clause variables get a per-node suffix _n<i>, then the head tuple is
    identified with the atom inherited from the parent, so each node's
    local variables stay inside its subtree.
    """
    nodes: list[Node | None] = []

    def build(term: TraceTerm, inherited: Atom | None, parent: int) -> int:
        index = len(nodes) + 1
        try:
            clause = program.clause_by_id(term.sym)
        except KeyError:
            raise DerivationError(f"{term.sym!r} is not a clause of the program")
        if len(clause.body) != len(term.children):
            raise DerivationError(
                f"{term.sym} has {len(term.children)} subterms, clause body has {len(clause.body)} atoms"
            )
        if inherited is None:
            if integrity_root and not clause.head.is_false:
                raise DerivationError("trace root must be an integrity clause")
            inherited = clause.head
        elif clause.head.pred != inherited.pred:
            raise DerivationError(
                f"clause {term.sym} concludes {clause.head.pred}, expected {inherited.pred}"
            )
        rename = {v: Variable(f"{v.name}_n{index}") for v in clause.vars()}
        if inherited is not clause.head:
            rename.update(zip(clause.head.args, inherited.args))
            atom = inherited
        else:
            atom = clause.head.rename(rename)
        nodes.append(None)
        child_atoms = [b.rename(rename) for b in clause.body]
        children = tuple(
            build(sub, child_atom, index)
            for sub, child_atom in zip(term.children, child_atoms)
        )
        nodes[index - 1] = Node(
            index=index,
            atom=atom,
            cid=term.sym,
            constraint=clause.constraint.rename(rename),
            children=children,
            parent=parent,
            size=len(nodes) - index + 1,
        )
        return index

    build(trace, None, 0)
    return AndTree(tuple(nodes))


def formula(tree: AndTree) -> LinConstraint:
    return TRUE.conjoin(*(n.constraint for n in tree))


def subtree_formula(tree: AndTree, i: int) -> LinConstraint:
    return TRUE.conjoin(*(tree.node(j).constraint for j in tree.subtree_indices(i)))


def context_formula(tree: AndTree, i: int) -> LinConstraint:
    inside = set(tree.subtree_indices(i))
    return TRUE.conjoin(
        *(n.constraint for n in tree if n.index not in inside)
    )


def feasible(program: Program, trace: TraceTerm) -> Witness | None:
    """A witness for the trace's derivation, or None when infeasible."""
    return is_sat(formula(and_tree(program, trace)))
