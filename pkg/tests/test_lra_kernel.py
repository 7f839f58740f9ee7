"""The simplex kernel against an independent Fourier-Motzkin oracle.

Both backends (pure Python and, when built, the compiled twin) must
agree with the oracle on satisfiability and must return genuine
witnesses: every row is checked against the delta-rational assignment.
"""

import importlib
import random
from fractions import Fraction

import pytest

import oracles
from gen import random_constraint
from hornsafe.chc_core import REL_EQ, REL_LT
from hornsafe.lra import kernel
from hornsafe.lra import _simplex_py


def _backends():
    mods = [pytest.param(_simplex_py, id="pure")]
    try:
        cy = importlib.import_module("hornsafe.lra._simplex_cy")
        mods.append(pytest.param(cy, id="compiled"))
    except ImportError:
        mods.append(
            pytest.param(None, id="compiled", marks=pytest.mark.skip("not built"))
        )
    return mods


def _to_rows(constraint):
    xs = sorted(constraint.vars(), key=lambda v: v.name)
    idx = {v: i for i, v in enumerate(xs)}
    rows = []
    for row in constraint.rows:
        dense = [Fraction(0)] * len(xs)
        for v, c in row.terms:
            dense[idx[v]] = c
        code = {"=<": kernel.REL_LE, "<": kernel.REL_LT, "=": kernel.REL_EQ}[row.rel]
        rows.append((dense, code, row.rhs))
    return len(xs), rows


def _satisfies(rows, assignment) -> bool:
    for dense, code, rhs in rows:
        main = sum((c * assignment[i][0] for i, c in enumerate(dense)), Fraction(0))
        delta = sum((c * assignment[i][1] for i, c in enumerate(dense)), Fraction(0))
        if code == kernel.REL_EQ:
            ok = (main, delta) == (rhs, Fraction(0))
        elif code == kernel.REL_LT:
            ok = (main, delta) < (rhs, Fraction(0))
        else:
            ok = (main, delta) <= (rhs, Fraction(0))
        if not ok:
            return False
    return True


@pytest.mark.parametrize("backend", _backends())
def test_agrees_with_oracle_on_random_systems(backend):
    rng = random.Random(20260822)
    for _ in range(400):
        c = random_constraint(rng)
        ncols, rows = _to_rows(c)
        result = backend.simplex_feasible(ncols, rows)
        expected = oracles.fm_satisfiable(c)
        assert (result is not None) == expected, c.pretty()
        if result is not None:
            assert _satisfies(rows, result), c.pretty()


@pytest.mark.parametrize("backend", _backends())
class TestGoldens:
    def test_empty_system(self, backend):
        assert backend.simplex_feasible(0, []) == []

    def test_strict_cycle_infeasible(self, backend):
        # X < Y together with Y < X
        rows = [
            ([Fraction(1), Fraction(-1)], kernel.REL_LT, Fraction(0)),
            ([Fraction(-1), Fraction(1)], kernel.REL_LT, Fraction(0)),
        ]
        assert backend.simplex_feasible(2, rows) is None

    def test_strict_bound_needs_delta(self, backend):
        # 0 < X and X < 1 has no integer-style corner witness
        rows = [
            ([Fraction(-1)], kernel.REL_LT, Fraction(0)),
            ([Fraction(1)], kernel.REL_LT, Fraction(1)),
        ]
        result = backend.simplex_feasible(1, rows)
        assert result is not None
        assert _satisfies(rows, result)

    def test_tight_sandwich_forces_value(self, backend):
        rows = [
            ([Fraction(2)], kernel.REL_EQ, Fraction(5)),
        ]
        (value,) = backend.simplex_feasible(1, rows)
        assert value[0] == Fraction(5, 2)
        assert value[1] == 0

    def test_contradictory_equalities(self, backend):
        rows = [
            ([Fraction(1), Fraction(1)], kernel.REL_EQ, Fraction(3)),
            ([Fraction(1), Fraction(1)], kernel.REL_EQ, Fraction(4)),
        ]
        assert backend.simplex_feasible(2, rows) is None

    def test_unconstrained_column(self, backend):
        rows = [([Fraction(0), Fraction(1)], kernel.REL_LT, Fraction(2))]
        result = backend.simplex_feasible(2, rows)
        assert result is not None and _satisfies(rows, result)


class TestBackendSelection:
    def test_env_forces_pure(self, monkeypatch):
        monkeypatch.setenv("HORNSAFE_KERNEL", "pure")
        mod = importlib.reload(kernel)
        try:
            assert mod.backend_name() == "pure"
        finally:
            monkeypatch.delenv("HORNSAFE_KERNEL")
            importlib.reload(kernel)

    def test_env_rejects_unknown_backend(self, monkeypatch):
        monkeypatch.setenv("HORNSAFE_KERNEL", "gpu")
        with pytest.raises(ValueError):
            importlib.reload(kernel)
        monkeypatch.delenv("HORNSAFE_KERNEL")
        importlib.reload(kernel)
