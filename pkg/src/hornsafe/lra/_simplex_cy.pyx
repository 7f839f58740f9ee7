# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled feasibility kernel; mirrors _simplex_py statement for statement.

Same bound-form general simplex over delta-rationals with Bland's rule,
so both backends pivot identically and return identical witnesses.  The
differences are mechanical: rational arithmetic runs on gmpy2.mpq
(C-implemented) instead of fractions.Fraction, and the scan loops use
typed indices.  Inputs and outputs are Fraction either way, so callers
cannot tell the backends apart except by speed.

If gmpy2 is missing this module fails to import and the kernel selector
falls back to the pure implementation.
"""

from fractions import Fraction

from gmpy2 import mpq

REL_LE = 0
REL_LT = 1
REL_EQ = 2

_ZERO = mpq(0)
_ONE = mpq(1)
_MINUS_ONE = mpq(-1)


def simplex_feasible(Py_ssize_t ncols, rows):
    """Decide satisfiability of dense rows over ncols columns.

    rows: sequence of (coeffs, rel, rhs) with coeffs a length-ncols
    sequence of Fraction, rel one of REL_LE / REL_LT / REL_EQ, and rhs
    a Fraction.
    """
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t total = ncols + nrows
    cdef Py_ssize_t i, j, k, v, s, r, r2, xi, xj, rel
    cdef bint below

    # Tableau: mat[r] expresses basic[r] over the nonbasic variables.
    mat = []
    basic = []
    rowof = [-1] * total
    has_lo = [False] * total
    has_up = [False] * total
    lo_m = [_ZERO] * total
    lo_d = [_ZERO] * total
    up_m = [_ZERO] * total
    up_d = [_ZERO] * total
    # Current assignment, all zeros initially.
    vm = [_ZERO] * total
    vd = [_ZERO] * total

    for i in range(nrows):
        coeffs, rel_obj, rhs = rows[i]
        rel = rel_obj
        s = ncols + i
        row = [_ZERO] * total
        for j in range(ncols):
            row[j] = mpq(coeffs[j])
        mat.append(row)
        basic.append(s)
        rowof[s] = i
        if rel == REL_LE:
            has_up[s] = True
            up_m[s] = mpq(rhs)
            up_d[s] = _ZERO
        elif rel == REL_LT:
            has_up[s] = True
            up_m[s] = mpq(rhs)
            up_d[s] = _MINUS_ONE
        else:
            has_lo[s] = True
            has_up[s] = True
            lo_m[s] = mpq(rhs)
            lo_d[s] = _ZERO
            up_m[s] = mpq(rhs)
            up_d[s] = _ZERO

    while True:
        # Smallest basic variable out of bounds (Bland).
        xi = -1
        below = False
        for v in range(total):
            if rowof[v] < 0:
                continue
            if has_lo[v] and (vm[v] < lo_m[v] or (vm[v] == lo_m[v] and vd[v] < lo_d[v])):
                xi = v
                below = True
                break
            if has_up[v] and (vm[v] > up_m[v] or (vm[v] == up_m[v] and vd[v] > up_d[v])):
                xi = v
                below = False
                break
        if xi < 0:
            return [
                (
                    Fraction(int(vm[j].numerator), int(vm[j].denominator)),
                    Fraction(int(vd[j].numerator), int(vd[j].denominator)),
                )
                for j in range(ncols)
            ]

        r = rowof[xi]
        row = mat[r]
        xj = -1
        if below:
            for v in range(total):
                if rowof[v] >= 0:
                    continue
                a = row[v]
                if a == 0:
                    continue
                if a > 0:
                    if not has_up[v] or vm[v] < up_m[v] or (vm[v] == up_m[v] and vd[v] < up_d[v]):
                        xj = v
                        break
                else:
                    if not has_lo[v] or vm[v] > lo_m[v] or (vm[v] == lo_m[v] and vd[v] > lo_d[v]):
                        xj = v
                        break
            if xj < 0:
                return None
            tm = lo_m[xi]
            td = lo_d[xi]
        else:
            for v in range(total):
                if rowof[v] >= 0:
                    continue
                a = row[v]
                if a == 0:
                    continue
                if a < 0:
                    if not has_up[v] or vm[v] < up_m[v] or (vm[v] == up_m[v] and vd[v] < up_d[v]):
                        xj = v
                        break
                else:
                    if not has_lo[v] or vm[v] > lo_m[v] or (vm[v] == lo_m[v] and vd[v] > lo_d[v]):
                        xj = v
                        break
            if xj < 0:
                return None
            tm = up_m[xi]
            td = up_d[xi]

        # pivotAndUpdate(xi, xj, target): move xi to its bound, shift xj
        # by theta, propagate through the other basic values, then swap
        # xi out of the basis in favour of xj.
        a = row[xj]
        thm = (tm - vm[xi]) / a
        thd = (td - vd[xi]) / a
        vm[xi] = tm
        vd[xi] = td
        vm[xj] = vm[xj] + thm
        vd[xj] = vd[xj] + thd
        for r2 in range(nrows):
            if r2 == r:
                continue
            c = mat[r2][xj]
            if c != 0:
                b = basic[r2]
                vm[b] = vm[b] + c * thm
                vd[b] = vd[b] + c * thd

        inv = _ONE / a
        newrow = [_ZERO] * total
        for k in range(total):
            if k == xj:
                continue
            ck = row[k]
            if ck != 0:
                newrow[k] = -ck * inv
        newrow[xi] = inv
        mat[r] = newrow
        basic[r] = xj
        rowof[xj] = r
        rowof[xi] = -1
        for r2 in range(nrows):
            if r2 == r:
                continue
            row2 = mat[r2]
            c = row2[xj]
            if c != 0:
                row2[xj] = _ZERO
                for k in range(total):
                    nk = newrow[k]
                    if nk != 0:
                        row2[k] = row2[k] + c * nk
