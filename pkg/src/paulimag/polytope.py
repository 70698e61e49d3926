"""Exact rational polyhedral computations.

All arithmetic is exact.  Rows are ``coeffs . x <= bound`` or ``coeffs . x == bound``
over a named variable list.  The LP kernel is a two-phase simplex with Bland's
rule run on the dual of the equality-reduced problem, using ``gmpy2.mpq`` for
speed; everything crossing the public surface is a ``fractions.Fraction``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq
from scipy.optimize import linprog

from .errors import (
    DegeneratePolytope,
    DimensionMismatch,
    Infeasible,
    Unbounded,
    UnboundedPolytope,
)

LE = "<="
EQ = "="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def frac(value) -> Fraction:
    """Exact conversion; floats are rejected to keep exactness honest."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted in exact mode; pass a Fraction or a string")
    if type(value).__name__ == "mpq":
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(value)


def _fq(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    bound: Fraction
    sense: str = LE
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(frac(c) for c in self.coeffs))
        object.__setattr__(self, "bound", frac(self.bound))
        if self.sense not in (LE, EQ):
            raise ValueError(f"unknown sense {self.sense!r}")

    def lhs(self, point: Sequence[Fraction]) -> Fraction:
        return sum((c * x for c, x in zip(self.coeffs, point) if c), Fraction(0))

    def holds(self, point: Sequence[Fraction]) -> bool:
        value = self.lhs(point)
        return value == self.bound if self.sense == EQ else value <= self.bound

    def is_tight(self, point: Sequence[Fraction]) -> bool:
        return self.lhs(point) == self.bound

    def normalized(self) -> "Row":
        """Positive rescaling to a primitive integer row."""
        return replace(self, **dict(zip(("coeffs", "bound"), _primitive(self.coeffs, self.bound))))


def _primitive(coeffs: Sequence[Fraction], bound: Fraction):
    values = [frac(c) for c in coeffs] + [frac(bound)]
    denom = reduce(math.lcm, (v.denominator for v in values), 1)
    ints = [int(v * denom) for v in values]
    g = reduce(math.gcd, (abs(v) for v in ints), 0)
    if g == 0:
        return tuple(Fraction(0) for _ in coeffs), Fraction(0)
    return tuple(Fraction(v // g) for v in ints[:-1]), Fraction(ints[-1] // g)


def primitive_vector(values: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a rational vector by a positive factor to coprime integers."""
    return _primitive(values, 0)[0]


@dataclass(frozen=True)
class Polytope:
    """H-representation over named variables; vertices are computed on demand."""

    variables: tuple[str, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(self.rows))
        n = len(self.variables)
        for row in self.rows:
            if len(row.coeffs) != n:
                raise DimensionMismatch(
                    f"row {row.label or row} has {len(row.coeffs)} coefficients, expected {n}")

    @property
    def ambient_dimension(self) -> int:
        return len(self.variables)

    @property
    def inequalities(self) -> tuple[Row, ...]:
        return tuple(r for r in self.rows if r.sense == LE)

    @property
    def equalities(self) -> tuple[Row, ...]:
        return tuple(r for r in self.rows if r.sense == EQ)

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def vector(self, mapping: dict[str, object]) -> tuple[Fraction, ...]:
        """Dense coefficient vector from ``{variable: coefficient}``."""
        out = [Fraction(0)] * len(self.variables)
        for name, value in mapping.items():
            out[self.index(name)] += frac(value)
        return tuple(out)

    def violated(self, point: Sequence) -> list[Row]:
        point = tuple(frac(x) for x in point)
        if len(point) != len(self.variables):
            raise DimensionMismatch(f"point has {len(point)} entries, expected {len(self.variables)}")
        return [r for r in self.rows if not r.holds(point)]

    def contains(self, point: Sequence) -> bool:
        return not self.violated(point)

    def with_rows(self, rows: Iterable[Row]) -> "Polytope":
        return Polytope(self.variables, self.rows + tuple(rows))

    def fix(self, assignment: dict[str, object]) -> "Polytope":
        """Substitute fixed values and drop those variables."""
        keep = [i for i, v in enumerate(self.variables) if v not in assignment]
        fixed = {self.index(k): frac(v) for k, v in assignment.items()}
        rows = []
        for r in self.rows:
            shift = sum((r.coeffs[i] * x for i, x in fixed.items()), Fraction(0))
            rows.append(Row(tuple(r.coeffs[i] for i in keep), r.bound - shift, r.sense, r.label))
        return Polytope(tuple(self.variables[i] for i in keep), tuple(rows))

    def to_json(self) -> dict:
        def q(x: Fraction):
            return [x.numerator, x.denominator]

        return {
            "variables": list(self.variables),
            "rows": [
                {"coeffs": [q(c) for c in r.coeffs], "bound": q(r.bound), "sense": r.sense, "label": r.label}
                for r in self.rows
            ],
        }

    @classmethod
    def from_json(cls, data) -> "Polytope":
        if isinstance(data, str):
            data = json.loads(data)
        rows = [
            Row(tuple(Fraction(*c) for c in r["coeffs"]), Fraction(*r["bound"]), r["sense"], r.get("label", ""))
            for r in data["rows"]
        ]
        return cls(tuple(data["variables"]), tuple(rows))


@dataclass(frozen=True)
class LPResult:
    """Outcome of an exact LP.

    ``dual_ineq``/``dual_eq`` certify optimality for the maximization of the
    effective objective (the objective itself for ``max``, its negation for
    ``min``): ``c_eff = A^T y + E^T w`` with ``y >= 0`` and
    ``b.y + d.w = value_eff``.
    """

    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None
    direction: str = "max"
    dual_ineq: tuple[Fraction, ...] = field(default=(), repr=False)
    dual_eq: tuple[Fraction, ...] = field(default=(), repr=False)
    objective: tuple[Fraction, ...] = field(default=(), repr=False)
    # inequality rows (indices into Polytope.inequalities) with positive multiplier
    support: tuple[int, ...] = ()


# ---------------------------------------------------------------------------
# exact linear algebra on Fractions


def rref(matrix: list[list[Fraction]], ncols: int | None = None):
    """Reduced row echelon form; pivots are searched only in the first ``ncols`` columns."""
    m = [list(r) for r in matrix]
    if not m:
        return m, []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [v / pv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(matrix: list[list[Fraction]]) -> int:
    return len(rref(matrix)[1]) if matrix and matrix[0] else 0


def solve_square(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    n = len(a)
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, piv = rref(aug, n)
    if len(piv) < n:
        return None
    return [red[i][-1] for i in range(n)]


def solve_consistent(a: list[list[Fraction]], b: list[Fraction], nvars: int) -> list[Fraction] | None:
    """A particular solution of ``a x = b`` (free variables zero), or None."""
    if not a:
        return [Fraction(0)] * nvars
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, piv = rref(aug, nvars)
    for i in range(len(piv), len(red)):
        if red[i][-1] != 0:
            return None
    x = [Fraction(0)] * nvars
    for i, c in enumerate(piv):
        x[c] = red[i][-1]
    return x


def determinant(a: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in a]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


@dataclass(frozen=True)
class _Chart:
    """Affine parametrization ``x = origin + basis @ z`` of the equality set."""

    origin: tuple[Fraction, ...]
    basis: tuple[tuple[Fraction, ...], ...]  # n rows x d columns
    free: tuple[int, ...]  # which x coordinates are the chart coordinates

    @property
    def dim(self) -> int:
        return len(self.free)

    def lift(self, z: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(o + sum((b * zz for b, zz in zip(row, z) if b), Fraction(0))
                     for o, row in zip(self.origin, self.basis))

    def reduce_row(self, row: Row) -> tuple[tuple[Fraction, ...], Fraction]:
        coeffs = tuple(
            sum((row.coeffs[i] * self.basis[i][j] for i in range(len(self.origin)) if row.coeffs[i]), Fraction(0))
            for j in range(self.dim)
        )
        shift = sum((c * o for c, o in zip(row.coeffs, self.origin) if c), Fraction(0))
        return coeffs, row.bound - shift


def _chart(equalities: Sequence[Row], n: int, prefer_last: bool = False) -> _Chart | None:
    order = list(range(n))[::-1] if prefer_last else list(range(n))
    mat = [[r.coeffs[j] for j in order] + [r.bound] for r in equalities]
    red, piv = rref(mat, n) if mat else ([], [])
    for i in range(len(piv), len(red)):
        if red[i][-1] != 0:
            return None
    pivot_vars = [order[p] for p in piv]
    free = [order[j] for j in range(n) if j not in piv]
    origin = [Fraction(0)] * n
    basis = [[Fraction(0)] * len(free) for _ in range(n)]
    for t, f in enumerate(free):
        basis[f][t] = Fraction(1)
    col_of = {order[j]: j for j in range(n)}
    for i, pv in enumerate(pivot_vars):
        origin[pv] = red[i][-1]
        for t, f in enumerate(free):
            basis[pv][t] = -red[i][col_of[f]]
    return _Chart(tuple(origin), tuple(tuple(r) for r in basis), tuple(free))


# ---------------------------------------------------------------------------
# simplex kernel


def _pivot(tab, r, j):
    row = tab[r]
    p = row[j]
    if p != 1:
        row = [v / p for v in row]
        tab[r] = row
    nz = [k for k, v in enumerate(row) if v]
    for i in range(len(tab)):
        if i != r:
            f = tab[i][j]
            if f:
                other = tab[i]
                for k in nz:
                    other[k] -= f * row[k]


def _simplex_standard(a, b, c):
    """Minimize ``c.y`` s.t. ``a y = b``, ``y >= 0`` (all mpq); Bland's rule.

    Returns ``(status, y, basis)``.
    """
    k = len(a)
    m = len(c)
    zero = mpq(0)
    one = mpq(1)
    tab = []
    for i in range(k):
        sign = -1 if b[i] < 0 else 1
        tab.append([sign * v for v in a[i]] + [one if t == i else zero for t in range(k)] + [sign * b[i]])
    basis = [m + i for i in range(k)]
    width = m + k
    obj = [zero] * (width + 1)
    for row in tab:
        for j in range(m):
            obj[j] -= row[j]
        obj[width] -= row[width]
    tab.append(obj)

    def run(allowed):
        while True:
            objrow = tab[-1]
            enter = next((j for j in range(allowed) if objrow[j] < 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i in range(len(tab) - 1):
                v = tab[i][enter]
                if v > 0:
                    ratio = tab[i][width] / v
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            r = best[1]
            _pivot(tab, r, enter)
            basis[r] = enter

    run(width)
    if tab[-1][width] != 0:
        return INFEASIBLE, None, None
    # drive artificials out of the basis
    i = 0
    while i < len(tab) - 1:
        if basis[i] >= m:
            j = next((j for j in range(m) if tab[i][j] != 0), None)
            if j is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, i, j)
            basis[i] = j
        i += 1
    obj = [zero] * (width + 1)
    for j in range(m):
        obj[j] = c[j]
    for i, bv in enumerate(basis):
        cb = c[bv]
        if cb:
            row = tab[i]
            for j in range(width + 1):
                if row[j]:
                    obj[j] -= cb * row[j]
    tab[-1] = obj
    status = run(m)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    y = [zero] * m
    for i, bv in enumerate(basis):
        y[bv] = tab[i][width]
    return OPTIMAL, y, list(basis)


def _nullspace_from_rref(red, piv, ncols):
    vecs = []
    for f in range(ncols):
        if f in piv:
            continue
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for i, p in enumerate(piv):
            v[p] = -red[i][f]
        vecs.append(v)
    return vecs


def _solve_reduced(amat, bvec, cz):
    """Maximize ``cz . z`` subject to ``amat z <= bvec`` (chart coordinates, mpq).

    Returns ``(status, z, y)`` with ``y`` the optimal multipliers of the rows.
    """
    d = len(cz)
    if amat:
        red, piv = rref(amat, d)
    else:
        red, piv = [], []
    null = _nullspace_from_rref(red, piv, d)
    if any(sum(a * b for a, b in zip(v, cz)) != 0 for v in null):
        feasible = _dual_status(amat, bvec, piv, [mpq(0)] * d) != UNBOUNDED
        return (UNBOUNDED if feasible else INFEASIBLE), None, None
    status, y, basis = _dual_solve(amat, bvec, piv, cz)
    if status == UNBOUNDED:
        return INFEASIBLE, None, None
    if status == INFEASIBLE:
        feasible = _dual_status(amat, bvec, piv, [mpq(0)] * d) != UNBOUNDED
        return (UNBOUNDED if feasible else INFEASIBLE), None, None
    z = [mpq(0)] * d
    if piv:
        sub = [[amat[i][p] for p in piv] for i in basis]
        zp = solve_square(sub, [bvec[i] for i in basis])
        for p, v in zip(piv, zp):
            z[p] = v
    return OPTIMAL, z, y


def _reduce_all(chart: "_Chart", rows: Sequence[Row]):
    """Chart coordinates of every row as mpq lists (one pass, reused across LPs)."""
    n, d = len(chart.origin), chart.dim
    basis = [[mpq(v) for v in row] for row in chart.basis]
    origin = [mpq(v) for v in chart.origin]
    out = []
    for r in rows:
        nz = [(i, mpq(c)) for i, c in enumerate(r.coeffs) if c]
        coeffs = [sum((c * basis[i][j] for i, c in nz), mpq(0)) for j in range(d)]
        shift = sum((c * origin[i] for i, c in nz), mpq(0))
        out.append((coeffs, mpq(r.bound) - shift))
    return out


def solve_lp(poly: Polytope, objective: Sequence, direction: str = "max") -> LPResult:
    """Exact LP over ``poly``; never raises on infeasible/unbounded (see ``lp_optimize``)."""
    n = poly.ambient_dimension
    c = tuple(frac(v) for v in objective)
    if len(c) != n:
        raise DimensionMismatch(f"objective has {len(c)} entries, expected {n}")
    if direction not in ("max", "min"):
        raise ValueError("direction must be 'max' or 'min'")
    c_eff = c if direction == "max" else tuple(-v for v in c)
    eqs = poly.equalities
    ineqs = poly.inequalities
    chart = _chart(eqs, n)
    if chart is None:
        return LPResult(INFEASIBLE, direction=direction, objective=c)
    d = chart.dim
    reduced = _reduce_all(chart, ineqs)
    cz = [mpq(sum((c_eff[i] * chart.basis[i][j] for i in range(n) if c_eff[i]), Fraction(0))) for j in range(d)]
    live = []
    for idx, (coeffs, rhs) in enumerate(reduced):
        if any(coeffs):
            live.append(idx)
        elif rhs < 0:
            return LPResult(INFEASIBLE, direction=direction, objective=c)
    amat = [reduced[i][0] for i in live]
    bvec = [reduced[i][1] for i in live]
    status, z, y = _solve_reduced(amat, bvec, cz)
    if status != OPTIMAL:
        return LPResult(status, direction=direction, objective=c)
    x = chart.lift([_fq(v) for v in z])
    y_full = [Fraction(0)] * len(ineqs)
    for pos, idx in enumerate(live):
        y_full[idx] = _fq(y[pos]) if y is not None and pos < len(y) else Fraction(0)
    resid = [c_eff[i] - sum((ineqs[k].coeffs[i] * y_full[k] for k in range(len(ineqs)) if y_full[k]), Fraction(0))
             for i in range(n)]
    w = solve_consistent([[e.coeffs[i] for e in eqs] for i in range(n)], resid, len(eqs)) if eqs else []
    if w is None:  # pragma: no cover - would indicate a kernel bug
        raise AssertionError("dual certificate reconstruction failed")
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    support = tuple(i for i, v in enumerate(y_full) if v > 0)
    return LPResult(OPTIMAL, value, x, direction, tuple(y_full), tuple(w), c, support)


def _dual_solve(amat, bvec, piv, cz):
    """Solve min b.y s.t. A_P^T y = c_P, y >= 0."""
    m = len(amat)
    a = [[mpq(amat[i][p]) for i in range(m)] for p in piv]
    rhs = [mpq(cz[p]) for p in piv]
    cost = [mpq(v) for v in bvec]
    if not piv:
        # no constraints on y: optimum y = 0 unless some cost is negative
        if any(v < 0 for v in cost):
            return UNBOUNDED, None, None
        return OPTIMAL, [mpq(0)] * m, []
    return _simplex_standard(a, rhs, cost)


def _dual_status(amat, bvec, piv, cz):
    return _dual_solve(amat, bvec, piv, cz)[0]


def lp_optimize(poly: Polytope, objective: Sequence, direction: str = "max") -> LPResult:
    """Exact optimum; raises ``Infeasible``/``Unbounded``."""
    res = solve_lp(poly, objective, direction)
    if res.status == INFEASIBLE:
        raise Infeasible("constraint system is infeasible")
    if res.status == UNBOUNDED:
        raise Unbounded("objective is unbounded over the polytope")
    return res


def verify_certificate(poly: Polytope, res: LPResult) -> bool:
    """Exact check of primal feasibility, dual feasibility and zero duality gap."""
    if res.status != OPTIMAL:
        return False
    c_eff = res.objective if res.direction == "max" else tuple(-v for v in res.objective)
    ineqs, eqs = poly.inequalities, poly.equalities
    if any(v < 0 for v in res.dual_ineq) or not poly.contains(res.point):
        return False
    for i in range(poly.ambient_dimension):
        s = sum((r.coeffs[i] * y for r, y in zip(ineqs, res.dual_ineq)), Fraction(0))
        s += sum((r.coeffs[i] * w for r, w in zip(eqs, res.dual_eq)), Fraction(0))
        if s != c_eff[i]:
            return False
    dual_value = sum((r.bound * y for r, y in zip(ineqs, res.dual_ineq)), Fraction(0))
    dual_value += sum((r.bound * w for r, w in zip(eqs, res.dual_eq)), Fraction(0))
    primal_eff = sum((a * b for a, b in zip(c_eff, res.point)), Fraction(0))
    value_eff = res.value if res.direction == "max" else -res.value
    return dual_value == value_eff == primal_eff


def find_point(poly: Polytope) -> tuple[Fraction, ...] | None:
    res = solve_lp(poly, [0] * poly.ambient_dimension)
    return res.point if res.status == OPTIMAL else None


def is_feasible(poly: Polytope) -> bool:
    return find_point(poly) is not None


def feasible(system, nu, mu) -> tuple[bool, list]:
    """Evaluate every row of a constraint system at (nu, mu).

    Returns ``(ok, violated rows)``; spectra are sorted first when the system
    is stated for ordered spectra.
    """
    return system.check(nu, mu)


# ---------------------------------------------------------------------------
# redundancy


def dedupe_rows(rows: Iterable[Row]) -> list[Row]:
    """Normalize rows; among parallel inequalities keep the tightest (first wins ties)."""
    out: list[Row] = []
    seen: dict[tuple, int] = {}
    for r in rows:
        nr = r.normalized()
        if nr.sense == EQ:
            key = ("=", nr.coeffs, nr.bound)
            neg = ("=", tuple(-c for c in nr.coeffs), -nr.bound)
            if key in seen or neg in seen:
                continue
            seen[key] = len(out)
            out.append(nr)
            continue
        key = ("<=", nr.coeffs)
        if key in seen:
            j = seen[key]
            if nr.bound < out[j].bound:
                out[j] = nr
            continue
        seen[key] = len(out)
        out.append(nr)
    return out


def _float_max(a_np, b_np, rows, objective):
    """Float LP pre-filter: (status, value, multipliers over ``rows``)."""
    if not rows:
        return "unbounded", None, None
    res = linprog(-objective, A_ub=a_np[rows], b_ub=b_np[rows], bounds=(None, None), method="highs")
    if res.status == 3:
        return "unbounded", None, None
    if res.status != 0:
        return "unknown", None, None
    return "optimal", -res.fun, -res.ineqlin.marginals


def _farkas_redundant(amat, bvec, rows, target, weights) -> bool:
    """Exact check that ``target`` is a nonnegative combination of ``rows`` with a weaker bound."""
    support = [k for k, w in zip(rows, weights) if w > 1e-10]
    d = len(amat[target])
    if not support:
        return not any(amat[target]) and bvec[target] >= 0
    system = [[amat[k][j] for k in support] for j in range(d)]
    y = solve_consistent(system, list(amat[target]), len(support))
    if y is None or any(v < 0 for v in y):
        return False
    return sum((v * bvec[k] for v, k in zip(y, support)), mpq(0)) <= bvec[target]


def _exact_redundant(amat, bvec, rows, target) -> bool:
    status, z, _ = _solve_reduced([amat[k] for k in rows], [bvec[k] for k in rows], list(amat[target]))
    if status == OPTIMAL:
        return sum((a * v for a, v in zip(amat[target], z)), mpq(0)) <= bvec[target]
    return False


def redundant_rows(poly: Polytope, protected: Iterable[int] = (), exact: bool = True) -> list[int]:
    """Indices (into ``poly.rows``) removed by sequential exact redundancy elimination.

    A float LP screens each row first.  A drop is only made after an exact
    certificate (rational Farkas multipliers, or the exact simplex when those
    cannot be rebuilt).  With ``exact=False`` rows the screen reports as
    clearly binding are kept without exact confirmation; this can only leave
    extra rows behind, never lose one.
    """
    protected = set(protected)
    chart = _chart(poly.equalities, poly.ambient_dimension)
    if chart is None:
        raise Infeasible("equalities are inconsistent")
    ineq_idx = [i for i, r in enumerate(poly.rows) if r.sense != EQ]
    reduced = dict(zip(ineq_idx, _reduce_all(chart, [poly.rows[i] for i in ineq_idx])))
    amat = {i: c for i, (c, _) in reduced.items()}
    bvec = {i: b for i, (_, b) in reduced.items()}
    removed = []
    kept = []
    for i in ineq_idx:
        if any(amat[i]):
            kept.append(i)
        elif bvec[i] < 0:
            raise Infeasible("cannot remove redundancy from an empty polytope")
        elif i not in protected:
            removed.append(i)
        else:
            kept.append(i)
    status, _, _ = _solve_reduced([amat[k] for k in kept], [bvec[k] for k in kept], [mpq(0)] * chart.dim)
    if status == INFEASIBLE:
        raise Infeasible("cannot remove redundancy from an empty polytope")
    if chart.dim == 0:
        return sorted(removed + [i for i in kept if i not in protected])
    pos = {i: t for t, i in enumerate(ineq_idx)}
    a_np = np.array([[float(v) for v in amat[i]] for i in ineq_idx])
    b_np = np.array([float(bvec[i]) for i in ineq_idx])
    for i in ineq_idx:
        if i in protected or i not in kept:
            continue
        others = [k for k in kept if k != i]
        fstatus, fvalue, weights = _float_max(a_np, b_np, [pos[k] for k in others], a_np[pos[i]])
        bound = float(bvec[i])
        tol = 1e-7 * (1 + abs(bound))
        if fstatus == "optimal" and fvalue <= bound + tol:
            if _farkas_redundant(amat, bvec, others, i, weights) or _exact_redundant(amat, bvec, others, i):
                kept.remove(i)
                removed.append(i)
            continue
        if fstatus in ("optimal", "unbounded") and not exact:
            continue
        if _exact_redundant(amat, bvec, others, i):
            kept.remove(i)
            removed.append(i)
    return sorted(removed)


def remove_redundant(poly: Polytope, protected: Iterable[int] = ()) -> Polytope:
    """Drop every inequality implied by the remaining ones (order-deterministic).

    Row ``r`` survives iff maximizing its left side subject to the rows kept so
    far (minus ``r``) exceeds its bound.  Rows listed in ``protected`` are kept
    unconditionally.
    """
    drop = set(redundant_rows(poly, protected))
    return Polytope(poly.variables, tuple(r for i, r in enumerate(poly.rows) if i not in drop))


# ---------------------------------------------------------------------------
# vertices


def _reduced_system(poly: Polytope, prefer_last: bool = False):
    chart = _chart(poly.equalities, poly.ambient_dimension, prefer_last)
    if chart is None:
        raise Infeasible("equalities are inconsistent")
    rows = []
    for r in poly.inequalities:
        coeffs, rhs = chart.reduce_row(r)
        if any(coeffs):
            rows.append(Row(coeffs, rhs))
        elif rhs < 0:
            raise Infeasible(f"row {r.label or r} cannot hold")
    return chart, rows


def _check_bounded(zpoly: Polytope):
    d = zpoly.ambient_dimension
    for j in range(d):
        for direction in ("max", "min"):
            e = [0] * d
            e[j] = 1
            res = solve_lp(zpoly, e, direction)
            if res.status == INFEASIBLE:
                raise Infeasible("polytope is empty")
            if res.status == UNBOUNDED:
                raise UnboundedPolytope("polytope is unbounded")


def _vertices_in_chart(rows: list[Row], d: int) -> list[tuple[Fraction, ...]]:
    if d == 0:
        return [()]
    found = set()
    for combo in itertools.combinations(range(len(rows)), d):
        a = [list(rows[i].coeffs) for i in combo]
        z = solve_square(a, [rows[i].bound for i in combo])
        if z is None:
            continue
        z = tuple(z)
        if z in found:
            continue
        if all(r.lhs(z) <= r.bound for r in rows):
            found.add(z)
    return sorted(found)


def enumerate_vertices(poly: Polytope) -> list[tuple[Fraction, ...]]:
    """All vertices (lexicographically sorted) of a bounded polytope.

    Works in the chart of the equality set; rows are first made irredundant so
    the brute-force active-set search stays small.
    """
    chart, rows = _reduced_system(poly)
    zpoly = Polytope(tuple(f"z{j}" for j in range(chart.dim)), tuple(rows))
    _check_bounded(zpoly)
    zpoly = remove_redundant(Polytope(zpoly.variables, tuple(dedupe_rows(zpoly.rows))))
    return sorted(chart.lift(z) for z in _vertices_in_chart(list(zpoly.rows), chart.dim))


def affine_dimension(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    return rank(diffs) if diffs else 0


def certify_vertex(poly: Polytope, point: Sequence[Fraction]) -> bool:
    """A feasible point whose tight rows have rank equal to the ambient dimension."""
    point = tuple(frac(x) for x in point)
    if not poly.contains(point):
        return False
    tight = [list(r.coeffs) for r in poly.rows if r.is_tight(point)]
    return bool(tight) and rank(tight) == poly.ambient_dimension


# ---------------------------------------------------------------------------
# projection


def _combine(pos: Row, neg: Row, j: int) -> Row:
    a, b = pos.coeffs[j], -neg.coeffs[j]
    coeffs = tuple(b * p + a * q for p, q in zip(pos.coeffs, neg.coeffs))
    return Row(coeffs, b * pos.bound + a * neg.bound).normalized()


def project_out(poly: Polytope, eliminate: Sequence[str],
                introduce: tuple[str, dict[str, object]] | None = None) -> Polytope:
    """Fourier-Motzkin projection onto the variables not in ``eliminate``.

    ``introduce=(name, {var: coeff})`` first appends a derived variable defined
    by ``name = sum coeff * var``.  Equalities are used for substitution before
    any pairwise combination; after every elimination step rows are
    deduplicated, filtered by Chernikov's history rule, and made irredundant
    exactly.  The returned H-representation is irredundant.
    """
    if introduce is not None:
        name, definition = introduce
        variables = poly.variables + (name,)
        rows = [Row(r.coeffs + (Fraction(0),), r.bound, r.sense, r.label) for r in poly.rows]
        defrow = [Fraction(0)] * len(variables)
        for var, coeff in definition.items():
            defrow[variables.index(var)] += frac(coeff)
        defrow[-1] = Fraction(-1)
        rows.append(Row(tuple(defrow), 0, EQ, f"def {name}"))
        poly = Polytope(variables, tuple(rows))
    targets = [poly.index(v) for v in eliminate]
    eqs = list(poly.equalities)
    ineqs = [(r, frozenset([i])) for i, r in enumerate(poly.inequalities)]

    fm_order = list(targets)
    progress = True
    while progress:
        progress = False
        for j in fm_order:
            pick = next((e for e in eqs if e.coeffs[j] != 0), None)
            if pick is None:
                continue
            eqs.remove(pick)
            eqs = [_substitute(e, pick, j) for e in eqs]
            ineqs = [(_substitute(r, pick, j), h) for r, h in ineqs]
            fm_order.remove(j)
            progress = True
            break

    for step, j in enumerate(fm_order, start=1):
        pos = [(r, h) for r, h in ineqs if r.coeffs[j] > 0]
        neg = [(r, h) for r, h in ineqs if r.coeffs[j] < 0]
        new = [(r, h) for r, h in ineqs if r.coeffs[j] == 0]
        for (p, hp), (q, hq) in itertools.product(pos, neg):
            hist = hp | hq
            if len(hist) > step + 1:
                continue
            new.append((_combine(p, q, j), hist))
        ineqs = _prune(poly.variables, eqs, new)

    keep = [i for i in range(poly.ambient_dimension) if i not in targets]
    out_rows = [Row(tuple(r.coeffs[i] for i in keep), r.bound, r.sense, r.label) for r in eqs]
    out_rows = [r for r in dedupe_rows(out_rows) if any(r.coeffs) or r.bound != 0]
    for r, _ in ineqs:
        coeffs = tuple(r.coeffs[i] for i in keep)
        out_rows.append(Row(coeffs, r.bound, LE, r.label))
    vars_out = tuple(poly.variables[i] for i in keep)
    out = Polytope(vars_out, tuple(dedupe_rows(out_rows)))
    out = Polytope(vars_out, tuple(r for r in out.rows if any(r.coeffs) or r.sense == EQ))
    return remove_redundant(out)


def _substitute(r: Row, pick: Row, j: int) -> Row:
    if r.coeffs[j] == 0:
        return r
    f = r.coeffs[j] / pick.coeffs[j]
    return Row(tuple(a - f * b for a, b in zip(r.coeffs, pick.coeffs)), r.bound - f * pick.bound, r.sense, r.label)


def _prune(variables, eqs, rows_hist):
    best: dict[tuple, tuple[Row, frozenset]] = {}
    order = []
    for r, h in rows_hist:
        nr = r.normalized()
        if not any(nr.coeffs):
            if nr.bound < 0:
                raise Infeasible("projection of an empty set")
            continue
        key = nr.coeffs
        if key not in best:
            order.append(key)
            best[key] = (nr, h)
        elif nr.bound < best[key][0].bound or (nr.bound == best[key][0].bound and len(h) < len(best[key][1])):
            best[key] = (nr, h)
    rows = [best[k] for k in order]
    poly = Polytope(variables, tuple(eqs) + tuple(r for r, _ in rows))
    drop = set(redundant_rows(poly, exact=False))
    offset = len(eqs)
    return [rh for i, rh in enumerate(rows) if i + offset not in drop]


# ---------------------------------------------------------------------------
# volume


def volume(poly: Polytope) -> Fraction:
    """Exact volume in the chart that drops the last variables of the equality set.

    The polytope is triangulated by pulling: pick the lexicographically first
    vertex, recurse over the facets not containing it, and sum simplex
    determinants.  Lower-dimensional polytopes have measure zero in the chart.
    """
    chart, rows = _reduced_system(poly, prefer_last=True)
    d = chart.dim
    zpoly = Polytope(tuple(f"z{j}" for j in range(d)), tuple(rows))
    _check_bounded(zpoly)
    zpoly = remove_redundant(Polytope(zpoly.variables, tuple(dedupe_rows(zpoly.rows))))
    verts = _vertices_in_chart(list(zpoly.rows), d)
    if d == 0:
        return Fraction(1) if verts else Fraction(0)
    if affine_dimension(verts) < d:
        return Fraction(0)
    incidence = [frozenset(i for i, v in enumerate(verts) if r.is_tight(v)) for r in zpoly.rows]
    total = Fraction(0)
    for simplex in _triangulate(frozenset(range(len(verts))), d, verts, incidence, {}):
        base = verts[simplex[0]]
        mat = [[a - b for a, b in zip(verts[i], base)] for i in simplex[1:]]
        total += abs(determinant(mat))
    return total / math.factorial(d)


def _triangulate(face, k, verts, incidence, memo):
    key = (face, k)
    if key in memo:
        return memo[key]
    if k == 0:
        out = [(min(face),)]
        memo[key] = out
        return out
    apex = min(face)
    facets = set()
    for inc in incidence:
        sub = face & inc
        if sub == face or len(sub) < k or sub in facets:
            continue
        if affine_dimension([verts[i] for i in sorted(sub)]) == k - 1:
            facets.add(sub)
    out = []
    for f in sorted(facets, key=sorted):
        if apex in f:
            continue
        for s in _triangulate(f, k - 1, verts, incidence, memo):
            out.append((apex,) + s)
    memo[key] = out
    return out


def chart_volume_strict(poly: Polytope) -> Fraction:
    """Like ``volume`` but raises ``DegeneratePolytope`` for zero measure."""
    v = volume(poly)
    if v == 0:
        raise DegeneratePolytope("polytope is not full-dimensional in its affine chart")
    return v
