"""The abstraction-refinement loop.

Each round abstracts the current program with polyhedral analysis; a
model that excludes false proves safety.  Otherwise the model's trace
automaton yields a smallest suspicious trace.  A feasible trace is a
genuine counterexample and is translated back to the original clause
ids and replayed there.  An infeasible one is generalised to an
automaton of infeasible traces, which is subtracted from the program's
trace language; regenerating clauses for the remainder gives the next,
strictly smaller, verification problem.

Two remover constructions are supported: "rahft" subtracts just the
spurious trace, "rahit" subtracts the whole language of its
interpolant automaton, which can only be larger.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from hornsafe.absint import analyze, has_false
from hornsafe.chc_core import Program, Variable
from hornsafe.derivations import and_tree, feasible, formula
from hornsafe.fta import (
    TraceTerm,
    determinise,
    difference,
    find_accepted,
    model_fta,
    singleton_fta,
)
from hornsafe.refinement import erase_trace, generate_clauses, origin_lines
from hornsafe.tree_interpolation import interpolant_automaton, tree_interpolant

ENGINES = ("rahit", "rahft")

DumpSink = Callable[[str, str], None]


class _Timeout(Exception):
    pass


@dataclass
class Stats:
    engine: str
    iterations: int = 0
    times_ms: dict[str, float] = field(default_factory=dict)
    automata: list[dict[str, int]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "engine": self.engine,
            "iterations": self.iterations,
            "times_ms": {k: round(v, 3) for k, v in self.times_ms.items()},
            "automata": self.automata,
        }


@dataclass(frozen=True)
class Verdict:
    status: str  # safe | unsafe | unknown
    stats: Stats
    trace: TraceTerm | None = None
    witness: dict[Variable, Fraction] | None = None
    reason: str | None = None

    @property
    def exit_code(self) -> int:
        return {"safe": 0, "unsafe": 1, "unknown": 2}[self.status]


def verify(
    program: Program,
    engine: str = "rahit",
    max_iter: int = 20,
    widen_delay: int = 3,
    timeout: float | None = None,
    dump_sink: DumpSink | None = None,
) -> Verdict:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if max_iter < 0:
        raise ValueError("max_iter must be nonnegative")

    stats = Stats(engine=engine)
    deadline = None if timeout is None else time.monotonic() + timeout

    def check_time():
        if deadline is not None and time.monotonic() > deadline:
            raise _Timeout

    def timed(phase: str, fn, *args):
        check_time()
        start = time.perf_counter()
        result = fn(*args)
        stats.times_ms[phase] = stats.times_ms.get(phase, 0.0) + (
            time.perf_counter() - start
        ) * 1000.0
        return result

    def dump(name: str, text: str):
        if dump_sink is not None:
            dump_sink(name, text)

    programs = [program]
    current = program
    dump("iter0.program.chc", current.pretty())
    try:
        for iteration in range(max_iter + 1):
            stats.iterations = iteration
            model = timed("analyze", analyze, current, widen_delay)
            dump(f"iter{iteration}.model.txt", model.pretty(current.arities))
            if not has_false(model):
                return Verdict("safe", stats)

            mfta = timed("model_fta", model_fta, current, model)
            dump(f"iter{iteration}.model_fta.txt", mfta.dump())
            sizes = {
                "model_states": len(mfta.states),
                "model_transitions": len(mfta.transitions),
            }
            stats.automata.append(sizes)
            trace = timed("counterexample", find_accepted, mfta)
            if trace is None:
                # abstraction kept false reachable only through pruned
                # transitions; no candidate trace remains
                return Verdict("safe", stats)

            witness = timed("feasibility", feasible, current, trace)
            if witness is not None:
                original = trace
                for generated in reversed(programs[1:]):
                    original = erase_trace(generated, original)
                replay = feasible(program, original)
                if replay is None:
                    return Verdict(
                        "unknown", stats, reason="internal", trace=original
                    )
                tree = and_tree(program, original)
                point = replay.concretise(formula(tree))
                return Verdict("unsafe", stats, trace=original, witness=point)

            if iteration == max_iter:
                return Verdict("unknown", stats, reason="iteration-limit")

            if engine == "rahft":
                remover = timed("remover", singleton_fta, trace)
            else:
                def build_remover():
                    tree = and_tree(current, trace)
                    return interpolant_automaton(
                        current, tree, tree_interpolant(tree)
                    )

                remover = timed("remover", build_remover)
            dump(f"iter{iteration}.remover.txt", remover.dump())
            sizes["remover_states"] = len(remover.states)
            sizes["remover_transitions"] = len(remover.transitions)

            def subtract():
                return determinise(difference(mfta, remover))

            kept = timed("difference", subtract)
            sizes["difference_states"] = len(kept.states)
            sizes["difference_transitions"] = len(kept.transitions)
            current = timed("clausegen", generate_clauses, current, kept)
            programs.append(current)
            dump(f"iter{iteration + 1}.program.chc", current.pretty())
            dump(f"iter{iteration + 1}.idmap.txt", origin_lines(current))
        raise AssertionError("unreachable")
    except _Timeout:
        return Verdict("unknown", stats, reason="timeout")
