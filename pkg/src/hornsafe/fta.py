"""Finite tree automata over clause-identifier alphabets.

Traces of a program are ranked trees: each node is a clause id whose
arity is the clause's body length, and a trace rooted at an integrity
clause describes one candidate derivation of false.  The automata here
recognise trace sets and support the operations the refinement loop
needs: construction from a program, a single trace, or an
interpretation; determinisation; language difference; emptiness with a
witness; and bounded enumeration for the tests.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from hornsafe.chc_core import FALSE_PRED, Program
from hornsafe.lra import is_sat
from hornsafe.model import InterpretationModel

ENUM_DEPTH_BOUND = 6


class AutomatonError(Exception):
    pass


@dataclass(frozen=True)
class TraceTerm:
    """Ranked tree of clause identifiers."""

    sym: str
    children: tuple["TraceTerm", ...] = ()

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    def pretty(self) -> str:
        if not self.children:
            return self.sym
        return f"{self.sym}({','.join(c.pretty() for c in self.children)})"

    def __str__(self) -> str:
        return self.pretty()

    @staticmethod
    def parse(text: str) -> "TraceTerm":
        pos = 0

        def node() -> TraceTerm:
            nonlocal pos
            m = re.match(r"\s*([A-Za-z0-9_]+)\s*", text[pos:])
            if not m:
                raise AutomatonError(f"bad trace term at offset {pos}")
            sym = m.group(1)
            pos += m.end()
            kids = []
            if pos < len(text) and text[pos] == "(":
                pos += 1
                kids.append(node())
                while pos < len(text) and text[pos] == ",":
                    pos += 1
                    kids.append(node())
                if pos >= len(text) or text[pos] != ")":
                    raise AutomatonError("unbalanced parentheses in trace term")
                pos += 1
            return TraceTerm(sym, tuple(kids))

        t = node()
        if text[pos:].strip():
            raise AutomatonError("trailing input after trace term")
        return t


Transition = tuple[str, tuple[str, ...], str]


@dataclass(frozen=True)
class TreeAutomaton:
    states: frozenset[str]
    finals: frozenset[str]
    alphabet: Mapping[str, int]
    transitions: frozenset[Transition]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "alphabet", dict(self.alphabet))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        if not self.finals <= self.states:
            raise AutomatonError("final states must be states")
        for sym, args, target in self.transitions:
            if sym not in self.alphabet:
                raise AutomatonError(f"unknown symbol {sym!r}")
            if len(args) != self.alphabet[sym]:
                raise AutomatonError(f"arity mismatch for {sym!r}")
            if not (set(args) <= self.states and target in self.states):
                raise AutomatonError("transition uses unknown state")

    def is_deterministic(self) -> bool:
        seen = set()
        for sym, args, _ in self.transitions:
            if (sym, args) in seen:
                return False
            seen.add((sym, args))
        return True

    def dump(self) -> str:
        lines = [f"finals: {' '.join(sorted(self.finals))}"]
        for sym, args, target in sorted(self.transitions):
            lhs = f"{sym}({','.join(args)})" if args else sym
            lines.append(f"{lhs} -> {target}")
        return "\n".join(lines) + "\n"


def trace_fta(program: Program) -> TreeAutomaton:
    """Recognises every trace of the program rooted at false."""
    states = set(program.predicates) | {FALSE_PRED}
    alphabet = {c.cid: len(c.body) for c in program}
    transitions = {
        (c.cid, tuple(a.pred for a in c.body), c.head.pred) for c in program
    }
    return TreeAutomaton(frozenset(states), frozenset({FALSE_PRED}), alphabet, transitions)


def singleton_fta(term: TraceTerm) -> TreeAutomaton:
    """Recognises exactly the given term.  One state per node, numbered
    e1, e2, ... in preorder with the root first."""
    names: dict[int, str] = {}
    nodes: list[tuple[TraceTerm, str]] = []

    def number(t: TraceTerm) -> str:
        name = f"e{len(names) + 1}"
        names[id(t)] = name
        nodes.append((t, name))
        for child in t.children:
            number(child)
        return name

    root = number(term)
    alphabet: dict[str, int] = {}
    transitions = set()
    for t, name in nodes:
        arity = len(t.children)
        if alphabet.setdefault(t.sym, arity) != arity:
            raise AutomatonError(f"symbol {t.sym!r} used at two arities")
        transitions.add((t.sym, tuple(names[id(c)] for c in t.children), name))
    return TreeAutomaton(
        frozenset(n for _, n in nodes), frozenset({root}), alphabet, transitions
    )


def model_fta(program: Program, model: InterpretationModel) -> TreeAutomaton:
    """The trace automaton filtered by an interpretation: a clause's
    transition survives only if its constraint is satisfiable together
    with the interpreted facts for its body atoms."""
    base = trace_fta(program)
    kept = set()
    for cid, args, target in base.transitions:
        clause = program.clause_by_id(cid)
        body = clause.constraint.conjoin(
            *(model.fact(a.pred, a.args) for a in clause.body)
        )
        if is_sat(body) is not None:
            kept.add((cid, args, target))
    return TreeAutomaton(base.states, base.finals, base.alphabet, frozenset(kept))


def _set_state(members: Iterable[str]) -> str:
    return "{" + ",".join(sorted(set(members))) + "}"


_EMPTY_SET_STATE = "{}"


def determinise(a: TreeAutomaton) -> TreeAutomaton:
    """Reachable subset construction.  The result is bottom-up
    deterministic and language-equal; only nonempty, reachable member
    sets become states, so completion is left to the caller."""
    by_sym: dict[str, list[tuple[tuple[str, ...], str]]] = {s: [] for s in a.alphabet}
    for sym, args, target in a.transitions:
        by_sym[sym].append((args, target))

    discovered: dict[frozenset[str], str] = {}
    transitions: set[Transition] = set()
    changed = True
    while changed:
        changed = False
        for sym, arity in a.alphabet.items():
            for combo in itertools.product(list(discovered), repeat=arity):
                members = frozenset(
                    target
                    for args, target in by_sym[sym]
                    if all(q in s for q, s in zip(args, combo))
                )
                if not members:
                    continue
                if members not in discovered:
                    discovered[members] = _set_state(members)
                    changed = True
                tr = (sym, tuple(discovered[s] for s in combo), discovered[members])
                if tr not in transitions:
                    transitions.add(tr)
                    changed = True
    states = frozenset(discovered.values())
    finals = frozenset(
        name for members, name in discovered.items() if members & a.finals
    )
    return TreeAutomaton(states, finals, dict(a.alphabet), transitions)


def difference(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Recognises L(a) minus L(b): the product of a with the completed
    determinisation of b, accepting where a accepts and b does not."""
    for sym, arity in b.alphabet.items():
        if sym in a.alphabet and a.alphabet[sym] != arity:
            raise AutomatonError(f"alphabets disagree on {sym!r}")
    db = determinise(b)
    db_target: dict[tuple[str, tuple[str, ...]], str] = {}
    for sym, args, target in db.transitions:
        db_target[(sym, args)] = target

    by_sym: dict[str, list[tuple[tuple[str, ...], str]]] = {s: [] for s in a.alphabet}
    for sym, args, target in a.transitions:
        by_sym[sym].append((args, target))

    def pname(qa: str, qb: str) -> str:
        return f"({qa},{qb})"

    discovered: set[tuple[str, str]] = set()
    transitions: set[Transition] = set()
    changed = True
    while changed:
        changed = False
        for sym, arity in a.alphabet.items():
            for args, target in by_sym[sym]:
                bsides = [
                    [qb for (qa, qb) in discovered if qa == q] for q in args
                ]
                for combo in itertools.product(*bsides):
                    # the sink absorbs every tuple with no b-side move
                    bt = db_target.get((sym, combo), _EMPTY_SET_STATE)
                    pair = (target, bt)
                    tr = (
                        sym,
                        tuple(pname(q, qb) for q, qb in zip(args, combo)),
                        pname(*pair),
                    )
                    if pair not in discovered:
                        discovered.add(pair)
                        changed = True
                    if tr not in transitions:
                        transitions.add(tr)
                        changed = True
    states = frozenset(pname(*p) for p in discovered)
    finals = frozenset(
        pname(qa, qb) for qa, qb in discovered if qa in a.finals and qb not in db.finals
    )
    return TreeAutomaton(states, finals, dict(a.alphabet), transitions)


def _id_index(sym: str) -> tuple[int, str]:
    m = re.search(r"(\d+)$", sym)
    return (int(m.group(1)) if m else -1, sym)


def find_accepted(a: TreeAutomaton) -> TraceTerm | None:
    """A minimal-depth accepted term, or None when the language is
    empty.  Ties fall to the smallest clause-id index, then to the
    leftmost smaller subterm, so the choice is reproducible."""
    depth: dict[str, int] = {}
    changed = True
    while changed:
        changed = False
        for sym, args, target in a.transitions:
            if all(q in depth for q in args):
                d = 1 + max((depth[q] for q in args), default=0)
                if d < depth.get(target, d + 1):
                    depth[target] = d
                    changed = True

    best: dict[str, TraceTerm] = {}

    def key(t: TraceTerm):
        return (_id_index(t.sym), tuple(key(c) for c in t.children))

    def build(state: str) -> TraceTerm:
        if state in best:
            return best[state]
        candidates = []
        for sym, args, target in a.transitions:
            if target != state or not all(q in depth for q in args):
                continue
            if 1 + max((depth[q] for q in args), default=0) == depth[state]:
                candidates.append((sym, args))
        # children sit strictly below, so recursion terminates
        terms = [
            TraceTerm(sym, tuple(build(q) for q in args)) for sym, args in candidates
        ]
        best[state] = min(terms, key=key)
        return best[state]

    reachable_finals = [q for q in a.finals if q in depth]
    if not reachable_finals:
        return None
    target_depth = min(depth[q] for q in reachable_finals)
    roots = [build(q) for q in reachable_finals if depth[q] == target_depth]
    return min(roots, key=key)


def enumerate_terms(
    a: TreeAutomaton, maxdepth: int, *, bound: int = ENUM_DEPTH_BOUND
) -> set[TraceTerm]:
    """Exactly the accepted terms of depth at most maxdepth.  Purely a
    test oracle; refuses depths beyond the bound to keep runtimes sane."""
    if maxdepth > bound:
        raise AutomatonError(f"enumeration depth {maxdepth} exceeds bound {bound}")
    reach: dict[str, set[TraceTerm]] = {q: set() for q in a.states}
    for _ in range(max(maxdepth, 0)):
        nxt = {q: set(ts) for q, ts in reach.items()}
        for sym, args, target in a.transitions:
            for combo in itertools.product(*(reach[q] for q in args)):
                nxt[target].add(TraceTerm(sym, combo))
        reach = nxt
    out: set[TraceTerm] = set()
    for q in a.finals:
        out |= reach[q]
    return out
