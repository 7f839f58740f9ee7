"""Refined clause generation from a trace automaton.

A deterministic automaton over a program's clause ids carves out a
subset of its traces.  Pairing every predicate with the automaton
states its derivations can reach turns that trace-level restriction
back into an ordinary clause program: the new program's false-rooted
traces are exactly the kept ones, and each generated clause remembers
which source clause it instantiates, so counterexamples translate
back.  Constraints are copied untouched; only control is restructured.
"""

from __future__ import annotations

from hornsafe.chc_core import FALSE_PRED, Atom, Clause, Program
from hornsafe.fta import TraceTerm, TreeAutomaton


class RefinementError(Exception):
    pass


def _state_tokens(automaton: TreeAutomaton) -> dict[str, str]:
    return {state: f"q{i}" for i, state in enumerate(sorted(automaton.states))}


def generate_clauses(program: Program, automaton: TreeAutomaton) -> Program:
    """Product of the program with a deterministic trace automaton.

    Each transition c(q1,...,qk) -> q of the automaton instantiates the
    source clause c with every predicate indexed by its state; the head
    keeps the reserved name only where the automaton accepts.  Clauses
    whose head can never feed a derivation of false are dropped.
    """
    if not automaton.is_deterministic():
        raise RefinementError("clause generation needs a deterministic automaton")

    tokens = _state_tokens(automaton)

    def indexed(pred: str, state: str, final: bool) -> str:
        if pred == FALSE_PRED and final:
            return FALSE_PRED
        return f"{pred}__{tokens[state]}"

    generated: list[Clause] = []
    order = {cid: i for i, cid in enumerate(program.clause_ids())}
    transitions = sorted(
        automaton.transitions, key=lambda tr: (order.get(tr[0], -1), tr[1], tr[2])
    )
    for cid, args, target in transitions:
        try:
            clause = program.clause_by_id(cid)
        except KeyError:
            raise RefinementError(f"automaton symbol {cid!r} is not a clause id")
        head = Atom(
            indexed(clause.head.pred, target, target in automaton.finals),
            clause.head.args,
        )
        body = tuple(
            Atom(indexed(a.pred, q, False), a.args)
            for a, q in zip(clause.body, args)
        )
        generated.append(
            Clause(
                cid="",
                head=head,
                constraint=clause.constraint,
                body=body,
                origin=cid,
            )
        )

    # keep only predicates that some derivation of false can use
    useful = {FALSE_PRED}
    changed = True
    while changed:
        changed = False
        for clause in generated:
            if clause.head.pred in useful:
                for atom in clause.body:
                    if atom.pred not in useful:
                        useful.add(atom.pred)
                        changed = True
    kept = [c for c in generated if c.head.pred in useful]
    return Program(
        tuple(
            Clause(f"c{i}", c.head, c.constraint, c.body, origin=c.origin)
            for i, c in enumerate(kept, start=1)
        )
    )


def origin_map(program: Program) -> dict[str, str]:
    """Generated clause id -> source clause id, for programs produced
    by generate_clauses."""
    return {c.cid: c.origin for c in program if c.origin is not None}


def origin_lines(program: Program) -> str:
    return "".join(f"{c.cid}={c.origin}\n" for c in program if c.origin is not None)


def erase_trace(program: Program, trace: TraceTerm) -> TraceTerm:
    """Map a trace over a generated program's ids back to the ids of
    the program it was generated from."""
    mapping = origin_map(program)
    def walk(t: TraceTerm) -> TraceTerm:
        return TraceTerm(mapping.get(t.sym, t.sym), tuple(walk(c) for c in t.children))
    return walk(trace)
