"""Decision procedures over conjunctions of linear rational constraints.

Everything is exact.  Satisfiability goes through the simplex kernel
(see kernel.py for backend selection); strict inequalities are handled
with delta-rationals, so witnesses assign each variable a pair
(main, delta coefficient) meaning main + delta * d for an arbitrarily
small positive d.

Projection is variable elimination: Gaussian substitution consumes
equalities whose pivot is being eliminated, Fourier-Motzkin combines
the remaining inequalities, eliminating the cheapest column first and
keeping only the dominant row per coefficient direction.

The convex hull of two polyhedra is computed on a lifted system: a
scaled copy of each argument (rows a.x rel b become a.xi rel b*si),
si >= 0, s1 + s2 = 1, x = x1 + x2, projected back onto the original
variables.  Strict rows are relaxed first; the result is the closed
convex hull, a sound over-approximation of the union.

Interpolation is certificate-based.  For jointly unsatisfiable phi1,
phi2 a refutation is a nonnegative multiplier vector y over the split
inequality rows with all variable coefficients cancelling and either a
negative combined right-hand side or a zero one that uses a strict row
(Motzkin transposition guarantees one of the two exists).  The
interpolant is the y-combination of phi1's rows alone: implied by phi1,
inconsistent with phi2, and over shared variables only because the
phi1-part of the cancellation equals minus the phi2-part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from hornsafe.chc_core import (
    REL_EQ,
    REL_LE,
    REL_LT,
    FALSE,
    TRUE,
    LinConstraint,
    Row,
    Variable,
)
from hornsafe.lra import kernel

_ZERO = Fraction(0)
_ONE = Fraction(1)

_KREL = {REL_LE: kernel.REL_LE, REL_LT: kernel.REL_LT, REL_EQ: kernel.REL_EQ}


class JointlySatisfiableError(ValueError):
    """interpolate() was handed a satisfiable conjunction."""


# Witnesses ------------------------------------------------------------------


class DeltaRational(NamedTuple):
    """main + delta * d for an arbitrarily small positive d."""

    main: Fraction
    delta: Fraction

    def __str__(self) -> str:
        if self.delta == 0:
            return str(self.main)
        sign = "+" if self.delta > 0 else "-"
        return f"{self.main} {sign} {abs(self.delta)}*d"


@dataclass(frozen=True)
class Witness:
    """A delta-rational assignment satisfying some constraint."""

    assignment: Mapping[Variable, DeltaRational]

    def value_of(self, row: Row) -> tuple[Fraction, Fraction]:
        m = _ZERO
        d = _ZERO
        for v, c in row.terms:
            val = self.assignment.get(v)
            if val is not None:
                m += c * val.main
                d += c * val.delta
        return m, d

    def satisfies_row(self, row: Row) -> bool:
        m, d = self.value_of(row)
        if row.rel == REL_LE:
            return (m, d) <= (row.rhs, 0)
        if row.rel == REL_LT:
            return (m, d) < (row.rhs, 0)
        return m == row.rhs and d == 0

    def satisfies(self, constraint: LinConstraint) -> bool:
        return all(self.satisfies_row(row) for row in constraint.rows)

    def concretise(self, constraint: LinConstraint) -> dict[Variable, Fraction]:
        """Pick a small positive rational for delta that keeps every row
        of the given constraint satisfied, and evaluate."""
        delta = _ONE
        for row in constraint.rows:
            m, d = self.value_of(row)
            margin = row.rhs - m
            if d > 0 and margin > 0:
                # need d * delta < margin (<= suffices for non-strict rows;
                # half the bound is safe for both)
                delta = min(delta, margin / (2 * d))
        return {v: val.main + val.delta * delta for v, val in self.assignment.items()}


# Core satisfiability --------------------------------------------------------


def _to_kernel(constraint: LinConstraint) -> tuple[list[Variable], list]:
    variables = sorted(constraint.vars(), key=lambda v: v.name)
    index = {v: i for i, v in enumerate(variables)}
    rows = []
    for row in constraint.rows:
        dense = [_ZERO] * len(variables)
        for v, c in row.terms:
            dense[index[v]] = c
        rows.append((dense, _KREL[row.rel], row.rhs))
    return variables, rows


def is_sat(constraint: LinConstraint) -> Witness | None:
    """Satisfiability over the rationals; a witness on success, else None."""
    variables, rows = _to_kernel(constraint)
    result = kernel.simplex_feasible(len(variables), rows)
    if result is None:
        return None
    return Witness({v: DeltaRational(m, d) for v, (m, d) in zip(variables, result)})


def _negated_rows(row: Row) -> list[Row]:
    """Rows whose disjunction is the negation of the given row."""
    neg = {v: -c for v, c in row.terms}
    if row.rel == REL_LE:
        return [Row.make(neg, REL_LT, -row.rhs)]
    if row.rel == REL_LT:
        return [Row.make(neg, REL_LE, -row.rhs)]
    return [
        Row.make(dict(row.terms), REL_LT, row.rhs),
        Row.make(neg, REL_LT, -row.rhs),
    ]


def entails(c1: LinConstraint, c2: LinConstraint) -> bool:
    """Does every model of c1 satisfy c2?  Row by row refutation."""
    for row in c2.rows:
        for neg in _negated_rows(row):
            if is_sat(c1.conjoin(LinConstraint((neg,)))) is not None:
                return False
    return True


def equivalent(c1: LinConstraint, c2: LinConstraint) -> bool:
    return entails(c1, c2) and entails(c2, c1)


# Projection -----------------------------------------------------------------


def _dominance_insert(table: dict, coeffs: dict[Variable, Fraction], strict: bool, rhs: Fraction) -> bool:
    """Keep the tightest row per coefficient direction.

    Directions are canonicalised by scaling so the first coefficient in
    variable-name order is +1 or -1.  Returns False when a ground row
    is violated (the system is unsatisfiable).
    """
    items = sorted(((v, c) for v, c in coeffs.items() if c != 0), key=lambda t: t[0].name)
    if not items:
        return rhs > 0 if strict else rhs >= 0
    scale = abs(items[0][1])
    key = tuple((v, c / scale) for v, c in items)
    b = rhs / scale
    old = table.get(key)
    if old is None or (b, not strict) < (old[1], not old[0]):
        table[key] = (strict, b)
    return True


def project(constraint: LinConstraint, keep: Iterable[Variable]) -> LinConstraint:
    """Existentially eliminate all variables outside keep.

    The result mentions only keep variables and is satisfiable exactly
    when the input is.
    """
    keep_set = set(keep)
    drop = {v for v in constraint.vars() if v not in keep_set}
    eqs: list[tuple[dict[Variable, Fraction], Fraction]] = []
    ineqs: list[tuple[dict[Variable, Fraction], bool, Fraction]] = []
    for row in constraint.rows:
        if row.rel == REL_EQ:
            eqs.append((row.coeffs(), row.rhs))
        else:
            ineqs.append((row.coeffs(), row.rel == REL_LT, row.rhs))

    # Substitute equalities that can eliminate a dropped variable.
    kept_eqs: list[tuple[dict[Variable, Fraction], Fraction]] = []
    while eqs:
        ecoeffs, erhs = eqs.pop(0)
        pivot = None
        for v in sorted(ecoeffs, key=lambda v: v.name):
            if v in drop and ecoeffs[v] != 0:
                pivot = v
                break
        if pivot is None:
            kept_eqs.append((ecoeffs, erhs))
            continue
        k = ecoeffs[pivot]

        def subst(coeffs: dict[Variable, Fraction], rhs: Fraction):
            c = coeffs.get(pivot, _ZERO)
            if c == 0:
                return coeffs, rhs
            out = dict(coeffs)
            del out[pivot]
            factor = c / k
            for v, e in ecoeffs.items():
                if v != pivot:
                    out[v] = out.get(v, _ZERO) - factor * e
            return out, rhs - factor * erhs

        eqs = [subst(c, r) for c, r in eqs]
        new_ineqs = []
        for c, s, r in ineqs:
            cc, rr = subst(c, r)
            new_ineqs.append((cc, s, rr))
        ineqs = new_ineqs
        drop.discard(pivot)

    table: dict = {}
    for coeffs, strict, rhs in ineqs:
        if not _dominance_insert(table, coeffs, strict, rhs):
            return FALSE

    def occurring_drops() -> list[Variable]:
        out = set()
        for key in table:
            for v, _ in key:
                if v in drop:
                    out.add(v)
        return sorted(out, key=lambda v: v.name)

    remaining = occurring_drops()
    while remaining:
        rows = [(dict(key), val[0], val[1]) for key, val in table.items()]

        def cost(var: Variable) -> int:
            p = sum(1 for cs, _, _ in rows if cs.get(var, _ZERO) > 0)
            m = sum(1 for cs, _, _ in rows if cs.get(var, _ZERO) < 0)
            return p * m

        var = min(remaining, key=cost)
        pos = [r for r in rows if r[0].get(var, _ZERO) > 0]
        neg = [r for r in rows if r[0].get(var, _ZERO) < 0]
        rest = [r for r in rows if r[0].get(var, _ZERO) == 0]
        table = {}
        ok = True
        for cs, s, b in rest:
            ok = ok and _dominance_insert(table, cs, s, b)
        for pcs, ps, pb in pos:
            kp = pcs[var]
            for ncs, ns, nb in neg:
                kn = -ncs[var]
                combined = {v: c / kp for v, c in pcs.items()}
                for v, c in ncs.items():
                    combined[v] = combined.get(v, _ZERO) + c / kn
                combined[var] = _ZERO
                ok = ok and _dominance_insert(table, combined, ps or ns, pb / kp + nb / kn)
        if not ok:
            return FALSE
        remaining = occurring_drops()

    out_rows: list[Row] = []
    for ecoeffs, erhs in kept_eqs:
        row = Row.make(ecoeffs, REL_EQ, erhs)
        if not row.terms:
            if row.rhs != 0:
                return FALSE
            continue
        out_rows.append(row)
    for key, (strict, b) in table.items():
        out_rows.append(Row.make(dict(key), REL_LT if strict else REL_LE, b))
    out_rows.sort(key=lambda r: r.pretty())
    return LinConstraint(tuple(out_rows))


# Polyhedra ------------------------------------------------------------------


@dataclass(frozen=True)
class Polyhedron:
    """A satisfiable constraint in minimised form, or the empty set.

    The zero-row constraint is the whole space (top).  Use the
    factories; the raw constructor skips minimisation.
    """

    constraint: LinConstraint
    empty: bool = False

    @staticmethod
    def bottom() -> "Polyhedron":
        return Polyhedron(FALSE, empty=True)

    @staticmethod
    def top() -> "Polyhedron":
        return Polyhedron(TRUE)

    @staticmethod
    def of(constraint: LinConstraint) -> "Polyhedron":
        if is_sat(constraint) is None:
            return Polyhedron.bottom()
        return Polyhedron(minimise(constraint))

    def is_top(self) -> bool:
        return not self.empty and not self.constraint.rows

    def vars(self) -> set[Variable]:
        return set() if self.empty else self.constraint.vars()

    def rename(self, mapping: Mapping[Variable, Variable]) -> "Polyhedron":
        if self.empty:
            return self
        return Polyhedron(self.constraint.rename(mapping), empty=False)

    def entails_poly(self, other: "Polyhedron") -> bool:
        if self.empty:
            return True
        if other.empty:
            return False
        return entails(self.constraint, other.constraint)

    def pretty(self) -> str:
        if self.empty:
            return "false"
        return self.constraint.pretty()


def minimise(constraint: LinConstraint) -> LinConstraint:
    """Drop rows entailed by the remaining ones.  Caller ensures sat."""
    rows = list(dict.fromkeys(constraint.rows))
    kept = list(rows)
    for row in rows:
        rest = [r for r in kept if r is not row]
        if entails(LinConstraint(tuple(rest)), LinConstraint((row,))):
            kept = rest
    return LinConstraint(tuple(kept))


def _fresh_named(base: str, used: set[str]) -> Variable:
    name = base
    while name in used:
        name += "_"
    used.add(name)
    return Variable(name)


def hull(p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    """Closed convex hull of the union (strict faces are relaxed)."""
    if p1.empty:
        return p2
    if p2.empty:
        return p1
    if p1.is_top() or p2.is_top():
        return Polyhedron.top()
    xs = sorted(p1.vars() | p2.vars(), key=lambda v: v.name)
    used = {v.name for v in xs}
    copies = []
    for tag in ("1", "2"):
        cmap = {x: _fresh_named(f"{x.name}__h{tag}", used) for x in xs}
        scale = _fresh_named(f"S__h{tag}", used)
        copies.append((cmap, scale))
    rows: list[Row] = []
    for poly, (cmap, scale) in zip((p1, p2), copies):
        for row in poly.constraint.rows:
            coeffs = {cmap[v]: c for v, c in row.terms}
            coeffs[scale] = -row.rhs
            rel = REL_LE if row.rel == REL_LT else row.rel
            rows.append(Row.make(coeffs, rel, 0))
        rows.append(Row.make({scale: -1}, REL_LE, 0))
    rows.append(Row.make({copies[0][1]: 1, copies[1][1]: 1}, REL_EQ, 1))
    for x in xs:
        rows.append(Row.make({x: 1, copies[0][0][x]: -1, copies[1][0][x]: -1}, REL_EQ, 0))
    shadow = project(LinConstraint(tuple(rows)), xs)
    return Polyhedron.of(shadow)


def widen(p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    """Standard row-selection widening: keep the rows of p1 that p2
    still entails.  Ascending chains stabilise because surviving rows
    are a subset of p1's."""
    if p1.empty:
        return p2
    if p2.empty:
        return p1
    kept = tuple(
        row
        for row in p1.constraint.rows
        if entails(p2.constraint, LinConstraint((row,)))
    )
    return Polyhedron(LinConstraint(kept))


# Interpolation --------------------------------------------------------------


def _split_rows(constraint: LinConstraint) -> list[tuple[dict[Variable, Fraction], bool, Fraction]]:
    """Equalities become two opposed non-strict rows, so every split row
    takes a nonnegative Farkas multiplier."""
    out = []
    for row in constraint.rows:
        coeffs = row.coeffs()
        if row.rel == REL_EQ:
            out.append((coeffs, False, row.rhs))
            out.append(({v: -c for v, c in coeffs.items()}, False, -row.rhs))
        else:
            out.append((coeffs, row.rel == REL_LT, row.rhs))
    return out


def _solve_farkas(split, pinned: set[int], want_strict_budget: bool):
    """Feasibility of the multiplier system.

    Columns are one multiplier per split row.  Constraints: multipliers
    nonnegative, pinned ones zero, per-variable coefficients cancel,
    and either combined rhs <= -1 (want_strict_budget False) or
    combined rhs <= 0 with the strict-row multipliers summing to >= 1.
    """
    m = len(split)
    variables: set[Variable] = set()
    for coeffs, _, _ in split:
        variables |= set(coeffs)
    rows = []
    for v in sorted(variables, key=lambda v: v.name):
        dense = [split[i][0].get(v, _ZERO) for i in range(m)]
        rows.append((dense, kernel.REL_EQ, _ZERO))
    for i in range(m):
        dense = [_ZERO] * m
        dense[i] = Fraction(-1)
        rows.append((dense, kernel.REL_LE, _ZERO))
    for i in pinned:
        dense = [_ZERO] * m
        dense[i] = _ONE
        rows.append((dense, kernel.REL_EQ, _ZERO))
    rhs_dense = [split[i][2] for i in range(m)]
    if not want_strict_budget:
        rows.append((rhs_dense, kernel.REL_LE, Fraction(-1)))
    else:
        rows.append((rhs_dense, kernel.REL_LE, _ZERO))
        strict_dense = [Fraction(-1) if split[i][1] else _ZERO for i in range(m)]
        if all(c == 0 for c in strict_dense):
            return None
        rows.append((strict_dense, kernel.REL_LE, Fraction(-1)))
    result = kernel.simplex_feasible(m, rows)
    if result is None:
        return None
    return [main for main, _ in result]


def _refute(split, pinned: set[int]):
    y = _solve_farkas(split, pinned, want_strict_budget=False)
    if y is None:
        y = _solve_farkas(split, pinned, want_strict_budget=True)
    return y


def interpolate(phi1: LinConstraint, phi2: LinConstraint) -> LinConstraint:
    """Craig interpolant for an unsatisfiable conjunction phi1 and phi2.

    The result I satisfies: phi1 entails I; I with phi2 is
    unsatisfiable; I mentions only variables shared by phi1 and phi2.
    Raises JointlySatisfiableError when phi1 and phi2 are satisfiable
    together.  Among refutations, multipliers on phi2's rows are
    greedily zeroed in row order, biasing I towards phi1's content.
    """
    split1 = _split_rows(phi1)
    split2 = _split_rows(phi2)
    split = split1 + split2
    y = _refute(split, set())
    if y is None:
        raise JointlySatisfiableError("constraints are jointly satisfiable")

    n1 = len(split1)
    pinned: set[int] = set()
    for j in range(n1, len(split)):
        if y[j] == 0:
            continue
        trial = _refute(split, pinned | {j})
        if trial is not None:
            pinned.add(j)
            y = trial

    coeffs: dict[Variable, Fraction] = {}
    rhs = _ZERO
    strict = False
    for i in range(n1):
        if y[i] == 0:
            continue
        cs, is_strict, b = split1[i]
        for v, c in cs.items():
            coeffs[v] = coeffs.get(v, _ZERO) + y[i] * c
        rhs += y[i] * b
        strict = strict or is_strict
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    if not coeffs and (rhs >= 0 if not strict else rhs > 0):
        return TRUE
    if coeffs:
        scale = _ONE / gcd_fractions(coeffs.values())
        coeffs = {v: c * scale for v, c in coeffs.items()}
        rhs = rhs * scale
    return LinConstraint((Row.make(coeffs, REL_LT if strict else REL_LE, rhs),))


def gcd_fractions(values: Iterable[Fraction]) -> Fraction:
    """Positive rational g with every value an integer multiple of g,
    the multiples collectively coprime."""
    from math import gcd, lcm

    vals = list(values)
    denom = lcm(*(v.denominator for v in vals))
    numer = gcd(*(abs(v.numerator) * (denom // v.denominator) for v in vals))
    return Fraction(numer, denom)
