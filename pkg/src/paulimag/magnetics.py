"""Spin moment bounds derived from the constraint catalog.

The moment of a spin distribution mu is ``M = m . mu`` with quantized levels
``m = (2S, 2S-2, ..., -2S)`` in Bohr magnetons.  Bounds are exact LP optima
over the moment polytope; the closed-form projected rows are kept alongside
for reporting and cross-checks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .catalog import (
    ConstraintSystem,
    ShellConfig,
    SymmetrySpec,
    load_catalog,
    specialize,
)
from .errors import (
    CollapseToSingletState,
    HighSpinInfeasible,
    InvalidPopulations,
    RangeError,
    UnsupportedShell,
)
from .polytope import (
    EQ,
    LE,
    OPTIMAL,
    Polytope,
    Row,
    enumerate_vertices,
    lp_optimize,
    project_out,
    remove_redundant,
    solve_lp,
    volume,
)
from .rational import exact

IRON_A = Fraction(35, 24)


@dataclass(frozen=True)
class MomentObjective:
    spin_coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        m = tuple(exact(v) for v in self.spin_coeffs)
        object.__setattr__(self, "spin_coeffs", m)
        if any(x < y for x, y in zip(m, m[1:])) or any(x != -y for x, y in zip(m, reversed(m))):
            raise ValueError("moment levels must be decreasing and antisymmetric")

    @classmethod
    def for_shell(cls, shell: ShellConfig) -> "MomentObjective":
        k = shell.multiplicity
        if k == 0:
            raise UnsupportedShell("spinless systems carry no spin moment")
        return cls(tuple(Fraction(k - 1 - 2 * j) for j in range(k)))

    def __call__(self, mu: Sequence) -> Fraction:
        return sum((a * exact(v) for a, v in zip(self.spin_coeffs, mu)), Fraction(0))

    def definition(self, system: ConstraintSystem) -> dict[str, Fraction]:
        return dict(zip(system.mu_names, self.spin_coeffs))


@dataclass(frozen=True)
class ExperimentalMoments:
    element: str
    total: float
    spin: float
    orbital: float

    def __post_init__(self):
        if abs(self.total - self.spin - self.orbital) > 1e-3:
            raise ValueError(f"{self.element}: total moment is not spin + orbital")


@dataclass(frozen=True)
class CobaltAdjustment:
    """Occupancy split ``(a, b, b, c, c) -> (a, b+eps, b-eps, c+delta, c-delta)``."""

    epsilon: float
    delta: float
    orbital_moment: float


@dataclass(frozen=True)
class DiagramVertex:
    label: str
    a: Fraction
    M: Fraction


@dataclass(frozen=True)
class ClosedForm:
    """``M <= orbital . nu + constant`` (or ``>=`` for a floor)."""

    label: str
    orbital: tuple[Fraction, ...]
    constant: Fraction
    kind: str = "upper"

    def __call__(self, nu: Sequence) -> Fraction:
        return sum((a * exact(v) for a, v in zip(self.orbital, nu)), Fraction(0)) + self.constant

    def as_row(self, n: int) -> Row:
        """The same bound as a row over ``(nu_1..nu_n, M)``."""
        F = Fraction
        if self.kind == "upper":
            return Row(tuple(-a for a in self.orbital) + (F(1),), self.constant).normalized()
        return Row(tuple(self.orbital) + (F(-1),), -self.constant).normalized()


def _cf(label, orbital, constant, kind="upper"):
    return ClosedForm(label, tuple(Fraction(v) for v in orbital), Fraction(constant), kind)


# Closed-form projections of the tables onto (nu, M).
PROJECTED_BOUNDS: dict[str, tuple[ClosedForm, ...]] = {
    "d7-high": (
        _cf("M <= 2(nu2+nu4)-3", (0, 2, 0, 2, 0), -3),
        _cf("M <= 2(nu1+nu3-nu5)-1 [Fe]", (2, 0, 2, 0, -2), -1),
        _cf("M <= 9-2(2nu1-nu2+nu4)", (-4, 2, 0, -2, 0), 9),
        _cf("M <= 9-2(nu2+2nu3-nu4)", (0, -2, -4, 2, 0), 9),
        _cf("M <= 3nu3+(nu4-nu5)-5(nu1-nu2) [Co]", (-5, 5, 3, 1, -1), 0),
    ),
    "d8-high": (
        _cf("M <= nu1-nu2+nu3-nu4+nu5", (1, -1, 1, -1, 1), 0),
        _cf("M <= 2nu1-2nu3-2nu5+4", (2, 0, -2, 0, -2), 4),
        _cf("M <= 2nu2-2nu4+4nu5-4", (0, 2, 0, -2, 4), -4),
        _cf("M <= 4nu3+2nu4-2nu2-4", (0, -2, 4, 2, 0), -4),
    ),
}
PROJECTED_FLOORS: dict[str, tuple[ClosedForm, ...]] = {
    "d7-high": (_cf("M >= 2(nu2+2nu3-nu4)-7", (0, 2, 4, -2, 0), -7, "lower"),),
}
ZERO_MOMENT_ROWS: tuple[Row, ...] = tuple(
    Row(tuple(Fraction(v) for v in coeffs), Fraction(bound), LE, label)
    for coeffs, bound, label in (
        ((1, 0, 1, -1, 0), 2, "nu1+nu3-nu4 <= 2"),
        ((1, 0, 0, 1, -1), 2, "nu1+nu4-nu5 <= 2"),
        ((0, 1, 1, 0, -1), 2, "nu2+nu3-nu5 <= 2"),
        ((0, 0, 1, -1, -1), Fraction(-3, 4), "nu3-nu4-nu5 <= -3/4"),
        ((1, 1, 0, 0, 0), Fraction(13, 4), "nu1+nu2 <= 13/4"),
        ((0, 1, 2, -1, 0), Fraction(7, 2), "nu2+2nu3-nu4 <= 7/2"),
    )
)


def load_presets() -> dict:
    return json.loads(resources.files("paulimag.data").joinpath("presets.json").read_text())


def experimental_moments(element: str) -> ExperimentalMoments:
    m = load_presets()[element.lower()]["moments"]
    return ExperimentalMoments(element.lower(), m["total"], m["spin"], m["orbital"])


def preset_nu(element: str) -> tuple[Fraction, ...]:
    """Orbital spectrum of an element preset, exact from the quoted decimals."""
    element = element.lower()
    occ = load_presets()[element]["occupancies"]
    if element == "fe":
        a = exact(occ["a"])
        return SymmetrySpec.bcc(a).nu(7)
    if element == "co":
        a, b, c = (exact(occ[k]) for k in "abc")
        return (a, b, b, c, c)
    if element == "ni":
        a, b = exact(occ["n_e"]) / 2, exact(occ["n_t"]) / 3
        return (a, a, b, b, b)
    raise KeyError(element)


# ---------------------------------------------------------------------------
# bounds for a fixed orbital spectrum


@dataclass(frozen=True)
class MomentResult:
    value: Fraction
    argmax: tuple[Fraction, ...]
    tight_bounds: tuple[str, ...]
    active_rows: tuple[str, ...]
    nu: tuple[Fraction, ...]


def _system(shell_or_system) -> ConstraintSystem:
    if isinstance(shell_or_system, ConstraintSystem):
        return shell_or_system
    if isinstance(shell_or_system, str):
        shell_or_system = ShellConfig.parse(shell_or_system)
    return load_catalog(shell_or_system)


def moment_polytope(system: ConstraintSystem, nu: Sequence) -> Polytope:
    """Spin polytope for fixed nu; raises HighSpinInfeasible outside the orbital shadow."""
    nu = tuple(exact(v) for v in nu)
    poly = system.restrict(nu)
    if solve_lp(poly, [0] * poly.ambient_dimension).status != OPTIMAL:
        snu, _ = system.canonical_point(nu, system.witness[1] if system.witness else
                                        (Fraction(1, system.shell.multiplicity),) * system.shell.multiplicity)
        orbital = [r for r in system.rows() if not any(r.spin) and not r.holds(snu, ())]
        detail = "; ".join(f"{r.cubicle or 'orbital'}: {r.text()}" for r in orbital)
        raise HighSpinInfeasible(
            f"orbital spectrum admits no {system.shell.key} spin state" + (f" (violates {detail})" if detail else ""))
    return poly


def _describe(row: Row, names: Sequence[str]) -> str:
    terms = []
    for c, n in zip(row.coeffs, names):
        if c:
            terms.append(f"{'+' if c > 0 else '-'}{'' if abs(c) == 1 else abs(c)}{n}")
    lhs = "".join(terms).lstrip("+") or "0"
    return f"{lhs} {'=' if row.sense == EQ else '<='} {row.bound} [{row.label}]"


def _extremum(shell_or_system, nu, direction) -> MomentResult:
    system = _system(shell_or_system)
    m = MomentObjective.for_shell(system.shell)
    poly = moment_polytope(system, nu)
    res = lp_optimize(poly, m.spin_coeffs, direction)
    snu = system.canonical_point(nu, res.point)[0]
    forms = (PROJECTED_BOUNDS if direction == "max" else PROJECTED_FLOORS).get(system.shell.key, ())
    tight = tuple(f.label for f in forms if f(snu) == res.value)
    active = tuple(_describe(r, system.mu_names) for r in poly.rows
                   if r.sense != EQ and r.lhs(res.point) == r.bound and r.label not in ("ordering", "box"))
    return MomentResult(res.value, res.point, tight, active, snu)


def moment_bound(shell_or_system, nu: Sequence) -> MomentResult:
    """Largest spin moment compatible with the constraints at orbital spectrum ``nu``."""
    return _extremum(shell_or_system, nu, "max")


def moment_floor(shell_or_system, nu: Sequence) -> MomentResult:
    """Smallest spin moment forced by the constraints at ``nu``."""
    return _extremum(shell_or_system, nu, "min")


def optimal_face(shell_or_system, nu: Sequence, direction: str = "max") -> list[tuple[Fraction, ...]]:
    """Vertices of the face of maximizers (a single vertex means a unique optimum)."""
    system = _system(shell_or_system)
    m = MomentObjective.for_shell(system.shell)
    poly = moment_polytope(system, nu)
    value = lp_optimize(poly, m.spin_coeffs, direction).value
    face = poly.with_rows((Row(m.spin_coeffs, value, EQ, "optimal"),))
    return enumerate_vertices(face)


def spin_independence_check(shell: ShellConfig | str, nu: Sequence) -> dict:
    """Orbital criteria for spectra reachable by spin-independent interactions.

    d7: nu3 + nu4 - nu5 <= 3 is required whatever the total spin; high spin
    additionally needs nu5 >= 1.  d8: nu1 + nu5 < 3 forces the S = 0 state.
    """
    if isinstance(shell, str):
        shell = ShellConfig.parse(shell)
    nu = tuple(sorted((exact(v) for v in nu), reverse=True))
    if len(nu) != 5:
        raise ValueError("expected five orbital occupancies")
    if shell.orbital_dim != 5 or shell.electron_count not in (7, 8):
        raise UnsupportedShell(f"no spin-independence criterion for {shell.key}")
    if shell.electron_count == 7:
        lhs = nu[2] + nu[3] - nu[4]
        violated = ["nu3+nu4-nu5 <= 3"] if lhs > 3 else []
        return {"consistent": not violated, "violated": violated, "value": lhs,
                "high_spin_possible": nu[4] >= 1, "collapse": False}
    lhs = nu[0] + nu[4]
    collapse = lhs < 3
    return {"consistent": True, "violated": [], "value": lhs, "high_spin_possible": not collapse,
            "collapse": collapse}


# ---------------------------------------------------------------------------
# projections and regions


@lru_cache(maxsize=8)
def projected_system(system: ConstraintSystem) -> Polytope:
    """Irredundant H-representation of the (nu, M) shadow."""
    m = MomentObjective.for_shell(system.shell)
    return project_out(system.polytope(), system.mu_names, introduce=("M", m.definition(system)))


def classify_projection(proj: Polytope) -> dict[str, list[Row]]:
    """Split shadow rows into upper bounds, floors, and purely orbital rows."""
    out: dict[str, list[Row]] = {"upper": [], "lower": [], "orbital": [], "equalities": []}
    for r in proj.rows:
        if r.sense == EQ:
            out["equalities"].append(r)
        elif r.coeffs[-1] > 0:
            out["upper"].append(r)
        elif r.coeffs[-1] < 0:
            out["lower"].append(r)
        else:
            out["orbital"].append(r)
    return out


def canonical_row(row: Row, equalities: Sequence[Row], pivot: int) -> tuple:
    """Row reduced modulo ``equalities`` (eliminating column ``pivot``) and scaled to primitive form."""
    coeffs, bound = list(row.coeffs), row.bound
    for e in equalities:
        if e.coeffs[pivot]:
            f = coeffs[pivot] / e.coeffs[pivot]
            coeffs = [a - f * b for a, b in zip(coeffs, e.coeffs)]
            bound -= f * e.bound
    r = Row(tuple(coeffs), bound).normalized()
    return r.coeffs, r.bound


@lru_cache(maxsize=8)
def zero_moment_region(system: ConstraintSystem) -> Polytope:
    """Orbital spectra compatible with a vanishing spin moment."""
    proj = remove_redundant(projected_system(system).fix({"M": 0}))
    return Polytope(proj.variables, tuple(r.normalized() for r in proj.rows))


def reference_region(system: ConstraintSystem, convention: str = "chart") -> Polytope:
    """Sorted, normalized orbital spectra inside the box.

    ``chart``: the box is imposed on the chart coordinates nu_1..nu_{n-1}
    only; the last occupancy is eliminated through the normalization and
    keeps just its ordering row.  ``box``: every 0 <= nu_i <= 2 row.
    """
    if convention not in ("chart", "box"):
        raise ValueError("convention must be 'chart' or 'box'")
    n = system.shell.orbital_dim
    names = system.nu_names
    cap = system.orbital_cap if system.orbital_cap is not None else Fraction(system.shell.electron_count)
    unit = lambda i, v: tuple(Fraction(v) if j == i else Fraction(0) for j in range(n))  # noqa: E731
    rows = [Row((Fraction(1),) * n, Fraction(system.shell.electron_count), EQ, "normalization")]
    rows += [Row(tuple(Fraction(1) if j == i + 1 else Fraction(-1) if j == i else Fraction(0) for j in range(n)),
                 0, LE, "ordering") for i in range(n - 1)]
    boxed = range(n - 1) if convention == "chart" else range(n)
    rows += [Row(unit(i, -1), 0, LE, "box") for i in boxed]
    rows += [Row(unit(i, 1), cap, LE, "box") for i in boxed]
    return Polytope(names, tuple(rows))


def zero_moment_fraction(system: ConstraintSystem, convention: str = "chart") -> dict:
    zero = volume(zero_moment_region(system))
    total = volume(reference_region(system, convention))
    return {"zero_volume": zero, "reference_volume": total, "fraction": zero / total, "convention": convention}


def spin_free(system: ConstraintSystem, nu: Sequence) -> bool:
    """True when the spin polytope at (literal, unsorted) ``nu`` is the whole sorted chamber."""
    k = system.shell.multiplicity
    poly = system.polytope().fix(dict(zip(system.nu_names, (exact(v) for v in nu))))
    chamber = [tuple(Fraction(1, j) if i < j else Fraction(0) for i in range(k)) for j in range(1, k + 1)]
    return all(poly.contains(v) for v in chamber)


def free_spin_interval(system: ConstraintSystem, origin: Sequence, direction: Sequence
                       ) -> tuple[Fraction, Fraction] | None:
    """Exact t-interval where ``nu = origin + t * direction`` leaves the spins unconstrained.

    Every row must hold at every vertex of the sorted spin chamber; each such
    requirement is linear in t.
    """
    origin = [exact(v) for v in origin]
    direction = [exact(v) for v in direction]
    k = system.shell.multiplicity
    chamber = [tuple(Fraction(1, j) if i < j else Fraction(0) for i in range(k)) for j in range(1, k + 1)]
    lo, hi = None, None
    for r in system.rows():
        slope = sum((a * d for a, d in zip(r.orbital, direction)), Fraction(0))
        base = sum((a * o for a, o in zip(r.orbital, origin)), Fraction(0))
        for v in chamber:
            rest = r.bound - base - sum((b * x for b, x in zip(r.spin, v)), Fraction(0))
            if r.sense == EQ:
                if slope == 0:
                    if rest != 0:
                        return None
                    continue
                t = rest / slope
                lo = t if lo is None else max(lo, t)
                hi = t if hi is None else min(hi, t)
            elif slope > 0:
                hi = rest / slope if hi is None else min(hi, rest / slope)
            elif slope < 0:
                lo = rest / slope if lo is None else max(lo, rest / slope)
            elif rest < 0:
                return None
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


# ---------------------------------------------------------------------------
# iron


@dataclass(frozen=True)
class Segment:
    a_from: Fraction
    a_to: Fraction
    slope: Fraction
    intercept: Fraction
    mu_sat: tuple[tuple[Fraction, Fraction], ...] = field(default=())  # (constant, coefficient of a) per mu_j

    def formula(self) -> str:
        return f"M = {self.intercept} {'+' if self.slope >= 0 else '-'} {abs(self.slope)}a"


def _bcc_joint(system: ConstraintSystem):
    spec = specialize(system, SymmetrySpec.bcc())
    m = MomentObjective.for_shell(system.shell)
    return spec, m


def _mu_affine(system, m, a0, a1, direction):
    """Optimal spin state as an affine function of a along a boundary segment."""
    pts = []
    for a in (a0 + (a1 - a0) / 3, a0 + 2 * (a1 - a0) / 3):
        nu = SymmetrySpec.bcc(a).nu(system.shell.electron_count)
        face = optimal_face(system, nu, direction)
        if len(face) != 1:
            return ()
        pts.append((a, face[0]))
    (x0, p0), (x1, p1) = pts
    out = []
    for u, v in zip(p0, p1):
        slope = (v - u) / (x1 - x0)
        out.append((u - slope * x0, slope))
    return tuple(out)


def iron_diagram(a_min=Fraction(7, 5), a_max=Fraction(5, 3), system: ConstraintSystem | None = None) -> dict:
    """Admissible (a, M) region for BCC d7 spectra (a, a, a, b, b).

    The region is the shadow of the joint (a, mu) polytope; its vertices are
    exact.  Vertices are labelled A, B, C, ... clockwise starting from the
    top-left corner.
    """
    system = system or load_catalog(ShellConfig.d(7))
    a_min, a_max = exact(a_min), exact(a_max)
    spec, m = _bcc_joint(system)
    lo_a, hi_a = lp_optimize(spec.polytope(), spec.polytope().vector({"a": 1}), "min").value, \
        lp_optimize(spec.polytope(), spec.polytope().vector({"a": 1}), "max").value
    if not (lo_a <= a_min < a_max <= hi_a):
        raise RangeError(f"a-range must lie inside [{lo_a}, {hi_a}]")
    joint = spec.polytope()
    joint = joint.with_rows((Row(joint.vector({"a": -1}), -a_min, LE, "a range"),
                               Row(joint.vector({"a": 1}), a_max, LE, "a range")))
    shadow = project_out(joint, spec.mu_names, introduce=("M", dict(zip(spec.mu_names, m.spin_coeffs))))
    verts = sorted(set(enumerate_vertices(shadow)))
    upper, lower = _chains(verts)
    ring = upper + [p for p in reversed(lower) if p not in upper]
    labels = [chr(ord("A") + i) for i in range(len(ring))]
    vertices = [DiagramVertex(lbl, p[0], p[1]) for lbl, p in zip(labels, ring)]
    up_segments = [_segment(system, m, p, q, "max") for p, q in zip(upper, upper[1:])]
    low_segments = [_segment(system, m, p, q, "min") for p, q in zip(lower, lower[1:])]
    return {"vertices": vertices, "upper": up_segments, "lower": low_segments, "a_range": (a_min, a_max)}


def _chains(verts):
    """Upper and lower convex chains of a planar point set, left to right (exact)."""
    pts = sorted(verts)

    def cross(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    upper = upper[::-1]
    # vertical end edges belong to neither chain
    while len(upper) > 1 and upper[0][0] == upper[1][0]:
        upper.pop(0)
    while len(upper) > 1 and upper[-1][0] == upper[-2][0]:
        upper.pop(-1 if upper[-1][1] < upper[-2][1] else -2)
    while len(lower) > 1 and lower[0][0] == lower[1][0]:
        lower.pop(1)
    while len(lower) > 1 and lower[-1][0] == lower[-2][0]:
        lower.pop(-1 if lower[-1][1] > lower[-2][1] else -2)
    return upper, lower


def _segment(system, m, p, q, direction) -> Segment:
    slope = (q[1] - p[1]) / (q[0] - p[0])
    mu = _mu_affine(system, m, p[0], q[0], direction)
    return Segment(p[0], q[0], slope, p[1] - slope * p[0], mu)


# ---------------------------------------------------------------------------
# cobalt


def _co_bound(nu: Sequence[float]) -> float:
    n1, n2, n3, n4, n5 = nu
    return 3 * n3 + (n4 - n5) - 5 * (n1 - n2)


def _co_sorted(a, b, c, eps, delta) -> float:
    return _co_bound(sorted((a, b + eps, b - eps, c + delta, c - delta), reverse=True))


def _co_best_sorted(a, b, c, m_orb):
    """Maximum over the split of the Co bound evaluated on the sorted spectrum.

    Along delta in [0, m_orb/4] (eps = (m_orb - 4 delta)/2) the sorted bound is
    piecewise linear; its maximum sits at an endpoint or at a point where two
    occupancies swap order.
    """
    top = m_orb / 4
    candidates = {0.0, top}
    # entries as affine functions of delta: value = u + v * delta
    lines = [(a, 0.0), (b + m_orb / 2, -2.0), (b - m_orb / 2, 2.0), (c, 1.0), (c, -1.0)]
    for (u1, v1), (u2, v2) in itertools.combinations(lines, 2):
        if v1 != v2:
            d = (u2 - u1) / (v1 - v2)
            if 0 <= d <= top:
                candidates.add(d)
    best = None
    for d in sorted(candidates):
        eps = (m_orb - 4 * d) / 2
        val = _co_sorted(a, b, c, eps, d)
        if best is None or val > best[2] + 1e-15:
            best = (eps, d, val)
    return best


def cobalt_bound(a, b, c, m_orb, sigma: dict | None = None) -> dict:
    """Largest Co-framed bound over orbital-moment splits 2 eps + 4 delta = m_orb.

    The two ordering cases eps < delta and eps > delta fix the spectrum as
    (a, c+delta, b+eps, b-eps, c-delta) and (a, b+eps, c+delta, c-delta, b-eps);
    each is linear in the split and maximized at an end of its range.  The
    returned ``best`` maximizes the bound on the actually sorted spectrum over
    every split, so it also covers b != c.  ``sigma`` maps a/b/c to
    uncertainties; the interval image is taken over the 27 points of the
    (-sigma, 0, +sigma) grid.
    """
    a, b, c, m_orb = (float(exact(v)) for v in (a, b, c, m_orb))
    if not (a >= b - 1e-9 and b >= c - 1e-9) or min(a, b, c) < 0 or max(a, b, c) > 2:
        raise InvalidPopulations("expected 2 >= a >= b >= c >= 0")
    if m_orb < 0:
        raise InvalidPopulations("orbital moment must be nonnegative")
    top = m_orb / 4
    if b + m_orb / 2 > 2 or b - m_orb / 2 < 0 or c - top < 0 or c + top > 2:
        raise InvalidPopulations("the split pushes an occupancy out of [0, 2]")

    def case_lt(eps, d):
        return _co_bound((a, c + d, b + eps, b - eps, c - d))

    def case_gt(eps, d):
        return _co_bound((a, b + eps, c + d, c - d, b - eps))

    cases = []
    mid = m_orb / 6
    for name, fn, (d0, d1) in (("eps<delta", case_lt, (mid, top)), ("eps>delta", case_gt, (0.0, mid))):
        ends = [((m_orb - 4 * d) / 2, d) for d in (d0, d1)]
        vals = [(fn(e, d), e, d) for e, d in ends]
        value, eps, d = max(vals, key=lambda t: (t[0], -t[2]))
        cases.append({"case": name, "epsilon": eps, "delta": d, "bound": value})
    no_split = _co_bound((a, b, b, c, c))
    eps_s, d_s, val_s = _co_best_sorted(a, b, c, m_orb)
    label = "eps>delta" if eps_s > d_s else "eps<delta" if eps_s < d_s else "eps=delta"
    out = {
        "no_split_bound": no_split,
        "cases": cases,
        "best": {"epsilon": eps_s, "delta": d_s, "bound": val_s, "case": label},
        "adjustment": CobaltAdjustment(eps_s, d_s, m_orb),
    }
    if sigma:
        sa, sb, sc = (float(exact(sigma.get(k, 0))) for k in "abc")
        images = [_co_best_sorted(a + da * sa, b + db * sb, c + dc * sc, m_orb)[2]
                  for da, db, dc in itertools.product((-1, 0, 1), repeat=3)]
        out["interval"] = (min(images), max(images))
    return out


# ---------------------------------------------------------------------------
# nickel


def nickel_bounds(nu: Sequence, system: ConstraintSystem | None = None) -> dict:
    """The four d8 closed-form bounds, their minimum, and the LP cross-check."""
    nu_exact = tuple(sorted((exact(v) for v in nu), reverse=True))
    if len(nu_exact) != 5:
        raise ValueError("expected five orbital occupancies")
    if nu_exact[0] > 2 or nu_exact[-1] < 0:
        raise InvalidPopulations("occupancies must lie in [0, 2]")
    if nu_exact[0] + nu_exact[4] < 3:
        raise CollapseToSingletState("nu1 + nu5 < 3: the d8 shell collapses into the S = 0 state")
    forms = PROJECTED_BOUNDS["d8-high"]
    values = [f(nu_exact) for f in forms]
    low = min(values)
    attaining = [i + 1 for i, v in enumerate(values) if v == low]
    lp = moment_bound(system or load_catalog(ShellConfig.d(8)), nu_exact)
    return {
        "bounds": [{"row": i + 1, "label": f.label, "value": v} for i, (f, v) in enumerate(zip(forms, values))],
        "minimum": low,
        "attaining_rows": attaining,
        "lp_value": lp.value,
        "lp_agrees": lp.value == low,
        "first_row_attains": 1 in attaining,
    }
