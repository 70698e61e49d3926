"""Constrained spin statistics over a moment polytope.

Equilibrium minimizes ``F/kT = -beta m.mu - S(mu)`` over the admissible mu.
With every row written homogeneously as ``c.mu <= 0`` (using sum(mu) = 1) the
minimizer has the exponential-family form

    mu_i ~ exp(m_i beta + sum_k g_k c_{k,i}),   g_k <= 0,

and the multipliers ``lam = -g`` minimize the convex function
``log sum_i exp(m_i beta - (C^T lam)_i)`` over ``lam >= 0``.  That dual is
solved by an active-set method with damped Newton steps.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, nnls
from scipy.special import logsumexp, softmax

from .catalog import ShellConfig, SymmetrySpec, load_catalog, printed_bcc_row, specialize
from .errors import (
    DegenerateFit,
    EmptyPolytope,
    NoRootAboveOne,
    NonConvergence,
    OutOfRange,
    RangeError,
)
from .magnetics import MomentObjective
from .polytope import EQ, Polytope, Row, is_feasible, primitive_vector
from .rational import exact

RESIDUAL_TOL = 1e-12
MAX_NEWTON = 200
A_LOW = Fraction(7, 5)
A_HIGH = Fraction(19, 13)


# ---------------------------------------------------------------------------
# problem setup


@dataclass(frozen=True)
class Facet:
    """Homogeneous row ``coeffs . mu <= 0`` and where it came from."""

    coeffs: tuple[Fraction, ...]
    source: int
    label: str


def homogeneous_facets(poly: Polytope) -> list[Facet]:
    """Rows that can bind at finite beta, as ``c . mu <= 0`` (duplicates merged).

    The polytope must contain ``sum(mu) = 1`` as its only equality.  Rows whose
    homogeneous coefficients are all <= 0 hold strictly for every positive mu
    and are skipped.
    """
    k = poly.ambient_dimension
    eqs = [e for e in poly.equalities if any(e.coeffs) or e.bound]
    ones = tuple(Fraction(1) for _ in range(k))
    for e in eqs:
        if primitive_vector(e.coeffs + (-e.bound,)) != primitive_vector(ones + (Fraction(-1),)):
            raise ValueError("thermal states need sum(mu) = 1 as the only equality")
    facets: list[Facet] = []
    seen = set()
    for idx, r in enumerate(poly.rows):
        if r.sense == EQ:
            continue
        c = tuple(v - r.bound for v in r.coeffs)
        if all(v <= 0 for v in c):
            continue
        key = primitive_vector(c)
        if key in seen:
            continue
        seen.add(key)
        facets.append(Facet(key, idx, r.label))
    return facets


@dataclass(frozen=True)
class ThermalState:
    beta: float
    mu: np.ndarray = field(compare=False)
    active_facets: tuple[int, ...]
    multipliers: tuple[float, ...]
    regime: int
    residual: float = 0.0

    @property
    def entropy(self) -> float:
        mu = self.mu[self.mu > 0]
        return float(-(mu * np.log(mu)).sum())

    def moment(self, m: Sequence) -> float:
        return float(np.dot(np.asarray(m, dtype=float), self.mu))


class ThermalProblem:
    """Precomputed float data for one polytope and moment objective."""

    def __init__(self, poly: Polytope, m: MomentObjective | Sequence):
        if not isinstance(m, MomentObjective):
            m = MomentObjective(tuple(m))
        if len(m.spin_coeffs) != poly.ambient_dimension:
            raise ValueError("moment objective does not match the polytope dimension")
        if not is_feasible(poly):
            raise EmptyPolytope("the moment polytope is empty")
        self.poly = poly
        self.objective = m
        self.m = np.array([float(v) for v in m.spin_coeffs])
        self.facets = homogeneous_facets(poly)
        k = poly.ambient_dimension
        self.C = np.array([[float(v) for v in f.coeffs] for f in self.facets]).reshape(len(self.facets), k)

    # -- fixed active set -------------------------------------------------

    def solve_on(self, active: Sequence[int], beta: float, lam0: np.ndarray | None = None):
        """Newton on the dual with ``active`` facets held as equalities.

        Returns ``(lam, mu, residual)``; ``lam`` may come out negative, which
        tells the caller the facet should be released.
        """
        s0 = beta * self.m
        if not active:
            return np.zeros(0), softmax(s0), 0.0
        ca = self.C[list(active)]
        lam = np.zeros(len(active)) if lam0 is None else np.array(lam0, dtype=float)
        residual = math.inf
        for _ in range(MAX_NEWTON):
            s = s0 - ca.T @ lam
            mu = softmax(s)
            g = -(ca @ mu)
            residual = float(np.max(np.abs(g)))
            if residual <= RESIDUAL_TOL:
                return lam, mu, residual
            cm = ca * mu
            h = cm @ ca.T - np.outer(ca @ mu, ca @ mu)
            step = -np.linalg.lstsq(h, g, rcond=None)[0]
            f0 = logsumexp(s)
            slope = float(g @ step)
            if -slope < 1e-10 * max(1.0, abs(f0)):
                # predicted decrease is below float resolution of f: judge by the gradient norm
                trial = lam + step
                if np.max(np.abs(ca @ softmax(s0 - ca.T @ trial))) >= residual:
                    break
            else:
                t = 1.0
                while t > 1e-14:
                    trial = lam + t * step
                    if logsumexp(s0 - ca.T @ trial) <= f0 + 1e-4 * t * slope:
                        break
                    t /= 2
                if t <= 1e-14:
                    break
            lam = trial
        mu = softmax(s0 - ca.T @ lam)
        residual = float(np.max(np.abs(ca @ mu)))
        return lam, mu, residual

    # -- active-set driver --------------------------------------------------

    def minimize(self, beta: float, warm: Sequence[int] = (), lam_warm: dict | None = None) -> ThermalState:
        """Equilibrium state at ``beta``.

        Far from beta = 0 a cold start sits where the dual Hessian vanishes, so
        the solve is continued from a moderate beta when no warm multipliers
        are supplied.  Warm multipliers are only a hint: if they fail to
        converge the cold path is taken.
        """
        if not beta >= 0 or not math.isfinite(beta):
            raise ValueError("beta must be finite and nonnegative")
        return self._prune(self._solve(float(beta), warm, lam_warm))

    def _solve(self, beta: float, warm: Sequence[int], lam_warm: dict | None) -> ThermalState:
        if lam_warm is not None:
            try:
                return self._active_set(beta, warm, lam_warm)
            except NonConvergence:
                pass
        if beta > 2.0 and len(self.facets):
            b, st = 2.0, self._active_set(2.0, (), None)
            while b < beta:
                nb = min(beta, 1.5 * b)
                lam = {k: -g * nb / b for k, g in zip(st.active_facets, st.multipliers)}
                st = self._active_set(nb, st.active_facets, lam)
                b = nb
            return st
        return self._active_set(beta, warm, None)

    def _prune(self, state: ThermalState) -> ThermalState:
        """Smallest active set that still satisfies the KKT conditions.

        Close to a vertex the slack of a facet through it drops below float
        resolution although the exact minimizer keeps it inactive; such
        facets are released one at a time while the reduced solve stays
        feasible with nonnegative multipliers.
        """
        act = list(state.active_facets)
        lam = {k: -g for k, g in zip(act, state.multipliers)}
        changed = True
        while changed and act:
            changed = False
            for k in sorted(act, key=lambda j: lam[j]):
                rest = [j for j in act if j != k]
                lr, mu, res = self.solve_on(rest, state.beta, np.array([lam[j] for j in rest]))
                if res <= RESIDUAL_TOL and np.all(lr >= 0) and float(np.max(self.C @ mu)) <= RESIDUAL_TOL:
                    act, lam = rest, dict(zip(rest, lr))
                    state = ThermalState(state.beta, mu, tuple(rest), tuple(-float(v) for v in lr),
                                         1 + len(rest), res)
                    changed = True
                    break
        return state

    def _active_set(self, beta: float, warm: Sequence[int], lam_warm: dict | None) -> ThermalState:
        """Projected Newton on ``min log Z(lam)`` over ``lam >= 0``.

        Multipliers that sit at zero with a nonnegative gradient are held
        fixed; the rest take a (slightly regularized) Newton step, and the
        step is projected back onto ``lam >= 0`` with Armijo backtracking.
        The active set is whatever ends up with ``lam > 0``.
        """
        nf = len(self.facets)
        s0 = beta * self.m
        lam = np.zeros(nf)
        for k, v in (lam_warm or {}).items():
            if 0 <= k < nf:
                lam[k] = max(0.0, v)
        if nf == 0:
            mu = softmax(s0)
            return ThermalState(float(beta), mu, (), (), 1, 0.0)

        def evaluate(x):
            s = s0 - self.C.T @ x
            return logsumexp(s), softmax(s)

        f, mu = evaluate(lam)
        pg = math.inf
        for _ in range(MAX_NEWTON):
            cm = self.C @ mu
            g = -cm
            pg_vec = np.where(lam > 0, g, np.minimum(g, 0.0))
            pg = float(np.max(np.abs(pg_vec)))
            if pg <= RESIDUAL_TOL:
                break
            eps = min(1e-3, pg)
            fixed = (lam <= eps) & (g > 0)
            free = ~fixed
            d = np.zeros(nf)
            d[fixed] = -lam[fixed]
            cf = self.C[free]
            h = (cf * mu) @ cf.T - np.outer(cf @ mu, cf @ mu)
            # Levenberg term fading with the residual; the min-norm solve handles
            # facets through a degenerate vertex, which make h singular
            h += (min(pg, 1.0) ** 2 + 1e-14) * np.eye(len(h))
            d[free] = -np.linalg.lstsq(h, g[free], rcond=1e-10)[0]
            step = self._search(lam, d, f, g, pg, evaluate)
            if step is None:
                # Newton direction failed; try plain projected gradient
                step = self._search(lam, -g, f, g, pg, evaluate)
            if step is None:
                break
            trial, f_t, mu_t = step
            lam, f, mu = trial, f_t, mu_t
        if pg > RESIDUAL_TOL:
            polished = self._face_polish(beta, mu, tight=max(1e-6, 10 * pg))
            if polished is not None:
                return polished
        if pg > 1e-9:
            raise NonConvergence("projected Newton iteration did not converge", best=mu, residual=pg)
        act = tuple(int(k) for k in np.flatnonzero(lam > 0))
        residual = max((abs(float(self.C[k] @ mu)) for k in act), default=0.0)
        residual = max(residual, pg)
        mult = tuple(-float(lam[k]) for k in act)
        return ThermalState(float(beta), mu, act, mult, 1 + len(act), residual)

    def _face_polish(self, beta: float, mu: np.ndarray, tight: float = 1e-6,
                     max_tight: int = 16) -> ThermalState | None:
        """Primal Newton on candidate faces near ``mu``.

        Near a degenerate vertex the dual multipliers are not unique and the
        dual iteration stalls.  Every face spanned by a few nearly tight
        facets is tried in turn; the first whose restricted minimizer is
        feasible with nonnegative multipliers is the global minimizer by
        convexity.
        """
        k = len(mu)
        near = [int(j) for j in np.flatnonzero(self.C @ mu > -tight)]
        if len(near) > max_tight:
            return None
        for size in range(0, min(len(near), k - 1) + 1):
            for subset in itertools.combinations(near, size):
                state = self._solve_face(beta, mu, subset)
                if state is not None:
                    return state
        return None

    def _solve_face(self, beta: float, mu0: np.ndarray, subset) -> ThermalState | None:
        """Infeasible-start Newton for the minimizer on the face ``C_S mu = 0``.

        Works in the scaling ``H^-1 = diag(mu)`` so components of order
        1e-30 keep full relative accuracy.
        """
        k = len(mu0)
        a = np.vstack([self.C[list(subset)], np.ones((1, k))]) if subset else np.ones((1, k))
        if np.linalg.matrix_rank(a) < len(a):
            return None
        b = np.zeros(len(a))
        b[-1] = 1.0
        s = beta * self.m
        # components that underflowed still need a finite logarithm
        x, w = np.maximum(mu0, 1e-300), np.zeros(len(a))

        def residual(x, w):
            return np.concatenate([np.log(x) + 1.0 - s + a.T @ w, a @ x - b])

        r = residual(x, w)
        for _ in range(MAX_NEWTON):
            if float(np.max(np.abs(r))) <= 1e-13:
                break
            grad = np.log(x) + 1.0 - s
            w_new = np.linalg.lstsq((a * x) @ a.T, (a @ x - b) - a @ (x * grad), rcond=None)[0]
            dx = -x * (grad + a.T @ w_new)
            dw = w_new - w
            norm = float(np.linalg.norm(r))
            t = 1.0
            while t > 1e-14:
                trial = x + t * dx
                if np.all(trial > 0):
                    r_t = residual(trial, w + t * dw)
                    if np.linalg.norm(r_t) <= (1 - 0.01 * t) * norm:
                        break
                t /= 2
            else:
                return None
            x, w, r = trial, w + t * dw, r_t
        if float(np.max(np.abs(r))) > 1e-10:
            return None
        lam = w[:-1]
        if np.any(lam < -1e-9):
            return None
        if len(self.C) and float(np.max(self.C @ x)) > RESIDUAL_TOL:
            return None
        order = np.argsort(subset)
        act = tuple(int(subset[i]) for i in order)
        mult = tuple(float(-max(lam[i], 0.0)) for i in order)
        res = max((abs(float(self.C[j] @ x)) for j in act), default=0.0)
        return ThermalState(float(beta), x, act, mult, 1 + len(act), res)

    def _search(self, lam, d, f, g, pg, evaluate):
        """Projected Armijo backtracking along ``d``; None if no step is accepted."""
        t = 1.0
        while t > 1e-14:
            trial = np.maximum(lam + t * d, 0.0)
            f_t, mu_t = evaluate(trial)
            decrease = float(g @ (trial - lam))
            scale = 1e-12 * max(1.0, abs(f))
            if -decrease > 0.1 * scale and f_t - f <= 1e-4 * decrease:
                return trial, f_t, mu_t
            if f_t < f - scale and -decrease <= 0.1 * scale:
                return trial, f_t, mu_t
            if abs(f_t - f) <= scale:
                # below float resolution of f: judge by the projected gradient
                g_t = -(self.C @ mu_t)
                pg_t = float(np.max(np.abs(np.where(trial > 0, g_t, np.minimum(g_t, 0.0)))))
                if pg_t <= 0.9 * pg:
                    return trial, f_t, mu_t
            t /= 2
        return None

    def kkt_residual(self, state: ThermalState) -> float:
        """Distance of -grad F from the cone of active normals plus the normalization normal.

        Levels whose weight underflowed to zero have no finite gradient and
        are left out of the check.
        """
        mu = state.mu
        keep = mu > 0
        grad = -state.beta * self.m[keep] + np.log(mu[keep]) + 1.0
        ones = np.ones(int(keep.sum()))
        cols = [self.C[k][keep] for k in state.active_facets] + [ones, -ones]
        a = np.array(cols).T
        _, res = nnls(a, -grad)
        return float(res)


def gibbs(beta: float, m: MomentObjective | Sequence) -> np.ndarray:
    """Unconstrained Boltzmann weights ``mu_i ~ exp(m_i beta)``."""
    coeffs = m.spin_coeffs if isinstance(m, MomentObjective) else m
    return softmax(float(beta) * np.array([float(v) for v in coeffs]))


def minimize_free_energy(beta: float, poly: Polytope, m: MomentObjective | Sequence,
                         warm: Sequence[int] = ()) -> ThermalState:
    return ThermalProblem(poly, m).minimize(beta, warm)


# ---------------------------------------------------------------------------
# BCC iron


@lru_cache(maxsize=1)
def _bcc_symbolic():
    return specialize(load_catalog(ShellConfig.d(7)), SymmetrySpec.bcc())


@lru_cache(maxsize=64)
def bcc_moment_polytope(a) -> Polytope:
    """Spin polytope of BCC d7 at t2g occupancy ``a`` (all irredundant table rows kept)."""
    spec = _bcc_symbolic()
    a = exact(a)
    rows = []
    for r in spec.structural + spec.inequalities:
        coeffs = r.coeffs[1:]
        bound = r.bound - r.coeffs[0] * a
        if not any(coeffs):
            if (bound < 0) if r.sense != EQ else (bound != 0):
                raise RangeError(f"a = {a} lies outside the BCC range")
            continue
        rows.append(Row(coeffs, bound, r.sense, r.label))
    return Polytope(spec.mu_names, tuple(rows))


@lru_cache(maxsize=64)
def bcc_problem(a) -> ThermalProblem:
    return ThermalProblem(bcc_moment_polytope(exact(a)), MomentObjective((3, 1, -1, -3)))


def printed_index(facet: Facet, a) -> int | None:
    """0-based position of ``facet`` in the printed BCC list at ``a``, matched by content."""
    a = exact(a)
    target = primitive_vector(facet.coeffs)
    for i in range(9):
        row = printed_bcc_row(i, a)
        if any(row) and primitive_vector(row) == target:
            return i
    return None


def m_sat(a) -> Fraction:
    """Saturation moment of BCC d7 for a in [7/5, 3/2]."""
    return 7 * exact(a) - 8


def critical_betas(a) -> tuple[float, float]:
    """Analytic activation points of the two facets met on the way to saturation.

    beta1 = log(alpha)/2 where alpha > 1 solves the cubic built from the third
    printed row; beta2 = log((20 - 12a)/(19 - 13a))/4.
    """
    a = exact(a)
    if not (A_LOW <= a < A_HIGH):
        raise RangeError(f"a = {a} outside [7/5, 19/13)")
    c = [float(v) for v in printed_bcc_row(2, a)]
    roots = np.roots(c)
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9 and r.real > 1 + 1e-12)
    if not real:
        raise NoRootAboveOne(f"cubic {c} has no root above one at a = {a}")
    poly = np.poly1d(c)
    lo, hi = 1.0 + 1e-12, real[0] * 2 + 1
    alpha = real[0]
    if poly(lo) * poly(alpha + 1e-6) < 0:
        alpha = brentq(poly, lo, alpha + 1e-6, xtol=1e-15, rtol=1e-15)
    beta1 = 0.5 * math.log(alpha)
    beta2 = 0.25 * math.log(float((20 - 12 * a) / (19 - 13 * a)))
    return beta1, beta2


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Transition:
    beta: float
    facet: int
    kind: str  # "activate" or "release"
    printed_row: int | None = None


@dataclass
class Trajectory:
    states: list[ThermalState]
    transitions: list[Transition]
    findings: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]


def _refine(problem: ThermalProblem, before: ThermalState, after: ThermalState) -> list[Transition]:
    """Locate active-set changes between two grid states by root finding."""
    out = []
    s0, s1 = set(before.active_facets), set(after.active_facets)
    for k in sorted(s1 - s0):
        base = list(before.active_facets)

        def h(beta, base=base, k=k):
            _, mu, _ = problem.solve_on(base, beta)
            return float(problem.C[k] @ mu)

        lo, hi = before.beta, after.beta
        if h(lo) < 0 < h(hi):
            out.append(Transition(brentq(h, lo, hi, xtol=1e-13, rtol=1e-15), k, "activate"))
        else:
            out.append(Transition(hi, k, "activate"))
    for k in sorted(s0 - s1):
        base = sorted(set(before.active_facets))
        pos = base.index(k)

        def g(beta, base=base, pos=pos):
            lam, _, _ = problem.solve_on(base, beta)
            return float(lam[pos])

        lo, hi = before.beta, after.beta
        if g(lo) > 0 > g(hi):
            out.append(Transition(brentq(g, lo, hi, xtol=1e-13, rtol=1e-15), k, "release"))
        else:
            out.append(Transition(hi, k, "release"))
    return sorted(out, key=lambda t: t.beta)


def _split(problem: ThermalProblem, before: ThermalState, after: ThermalState, depth: int = 0) -> list[Transition]:
    """Bisect until each interval holds a single active-set change, then refine it."""
    changes = set(before.active_facets) ^ set(after.active_facets)
    if len(changes) <= 1 or depth > 50:
        return _refine(problem, before, after)
    mid = problem.minimize(0.5 * (before.beta + after.beta), before.active_facets,
                           {k: -g for k, g in zip(before.active_facets, before.multipliers)})
    return _split(problem, before, mid, depth + 1) + _split(problem, mid, after, depth + 1)


def trajectory(problem: ThermalProblem, beta_grid: Iterable[float], a=None) -> Trajectory:
    grid = [float(b) for b in beta_grid]
    if any(y <= x for x, y in zip(grid, grid[1:])):
        raise ValueError("beta grid must be increasing")
    states: list[ThermalState] = []
    transitions: list[Transition] = []
    warm: Sequence[int] = ()
    for beta in grid:
        lam = None
        if states and states[-1].active_facets:
            prev = states[-1]
            lam = {k: -g for k, g in zip(prev.active_facets, prev.multipliers)}
        st = problem.minimize(beta, warm, lam)
        if states and st.active_facets != states[-1].active_facets:
            transitions += _split(problem, states[-1], st)
        states.append(st)
        warm = st.active_facets
    if a is not None:
        transitions = [Transition(t.beta, t.facet, t.kind, printed_index(problem.facets[t.facet], a))
                       for t in transitions]
    findings = [f"facet {t.facet} released at beta = {t.beta:.10g}" for t in transitions if t.kind == "release"]
    for st in states:
        # levels are sorted for beta >= 0; the table rows assume it
        if np.any(np.diff(st.mu) > 1e-12):
            findings.append(f"spin occupancies out of order at beta = {st.beta:.10g}")
    return Trajectory(states, transitions, findings)


def evolve(a, beta_grid: Iterable[float]) -> Trajectory:
    """Equilibrium states of BCC d7 along an increasing beta grid."""
    return trajectory(bcc_problem(exact(a)), beta_grid, exact(a))


# ---------------------------------------------------------------------------
# Weiss mean field


@dataclass(frozen=True)
class CurvePoint:
    t_reduced: float
    m_reduced: float
    beta: float
    regime: int
    crossover_marker: str | None = None


def _moment_at(problem: ThermalProblem, beta: float, warm=()) -> tuple[float, ThermalState]:
    st = problem.minimize(beta, warm)
    return float(problem.m @ st.mu), st


def _variance_at_zero(m: np.ndarray) -> float:
    return float(np.mean(m ** 2) - np.mean(m) ** 2)


def _self_consistent(problem: ThermalProblem, t: float, msat: float, coupling: float):
    """Nonzero root of M = M(beta), beta = M / (coupling t); (M, state) or (0, None)."""
    if t >= 1.0:
        st = problem.minimize(0.0)
        return 0.0, st

    def g(mm):
        return _moment_at(problem, mm / (coupling * t))[0] - mm

    hi = msat
    lo = msat * 1e-9
    if g(lo) <= 0:
        return 0.0, problem.minimize(0.0)
    if g(hi) >= 0:
        # saturated to float resolution
        return hi, problem.minimize(hi / (coupling * t))
    root = brentq(g, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=500)
    return root, problem.minimize(root / (coupling * t))


def _curve_point(args):
    a, t, unconstrained = args
    problem = _unconstrained_problem() if unconstrained else bcc_problem(a)
    coupling = _variance_at_zero(problem.m)
    msat = 3.0 if unconstrained else float(m_sat(a))
    mm, st = _self_consistent(problem, t, msat, coupling)
    beta = mm / (coupling * t) if mm > 0 else 0.0
    return CurvePoint(t, mm / msat, beta, st.regime if st is not None else 1)


@lru_cache(maxsize=1)
def _unconstrained_problem() -> ThermalProblem:
    k = 4
    ones = tuple(Fraction(1) for _ in range(k))
    rows = [Row(ones, 1, EQ, "normalization")]
    rows += [Row(tuple(Fraction(-1) if j == i else Fraction(0) for j in range(k)), 0) for i in range(k)]
    return ThermalProblem(Polytope(tuple(f"mu{i + 1}" for i in range(k)), tuple(rows)), (3, 1, -1, -3))


def crossover_moments(a) -> dict:
    """Reduced temperatures and moments where the Weiss trajectory crosses beta1, beta2."""
    a = exact(a)
    problem = bcc_problem(a)
    coupling = _variance_at_zero(problem.m)
    msat = float(m_sat(a))
    b1, b2 = critical_betas(a)
    m1 = float(problem.m @ problem.minimize(b1).mu)
    m2 = float(problem.m @ problem.minimize(b2).mu)
    return {
        "beta1": b1, "beta2": b2,
        "M1": m1, "M2": m2,
        "M1_over_Msat": m1 / msat, "M2_over_Msat": m2 / msat,
        "t1": m1 / (coupling * b1), "t2": m2 / (coupling * b2),
        "M_sat": msat,
    }


def weiss_curve(a, t_grid: Iterable[float], workers: int | None = None) -> dict:
    """Self-consistent reduced magnetization with and without the constraints.

    The internal field is proportional to M; beta = M / (5 t) puts the Curie
    point of the unconstrained spin-3/2 model at t = 1 (5 is the variance of
    m at beta = 0).  Crossover points are appended with their markers.
    """
    a = exact(a)
    grid = [float(t) for t in t_grid]
    if any(t <= 0 for t in grid):
        raise RangeError("reduced temperatures must be positive")
    if workers is None:
        workers = int(os.environ.get("PAULIMAG_WORKERS", "1") or 1)
    jobs = [(a, t, False) for t in grid]
    pure_jobs = [(a, t, True) for t in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            constrained = list(pool.map(_curve_point, jobs))
            pure = list(pool.map(_curve_point, pure_jobs))
    else:
        constrained = [_curve_point(j) for j in jobs]
        pure = [_curve_point(j) for j in pure_jobs]
    summary = crossover_moments(a)
    markers = [
        CurvePoint(summary["t1"], summary["M1_over_Msat"], summary["beta1"], 2, "beta1"),
        CurvePoint(summary["t2"], summary["M2_over_Msat"], summary["beta2"], 3, "beta2"),
    ]
    return {"constrained": constrained, "unconstrained": pure, "markers": markers, "summary": summary}


# ---------------------------------------------------------------------------
# data series


@dataclass(frozen=True)
class DataSeries:
    points: tuple[tuple[float, float], ...]
    kind: str = "magnetization"
    units: str = ""

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise ValueError("data abscissae must be strictly increasing")

    @property
    def x(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @classmethod
    def from_csv(cls, source, kind: str = "magnetization", units: str = "") -> "DataSeries":
        """CSV with a ``T_kelvin,value`` header; ``#`` lines are comments."""
        if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
            with open(source, newline="") as fh:
                text = fh.read()
        else:
            text = str(source)
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        reader = csv.reader(io.StringIO("\n".join(lines)))
        header = [h.strip() for h in next(reader)]
        if header[:2] != ["T_kelvin", "value"]:
            raise ValueError("expected header 'T_kelvin,value'")
        pts = sorted((float(r[0]), float(r[1])) for r in reader if r)
        return cls(tuple(pts), kind, units)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["T_kelvin", "value"])
        for x, y in self.points:
            w.writerow([repr(x), repr(y)])
        return out.getvalue()


def crossover_temperatures(moments: dict | Sequence[float], data: DataSeries) -> tuple[float, float]:
    """Temperatures where measured M/M_sat reaches the two critical reduced moments.

    ``moments`` is a summary from ``crossover_moments``/``weiss_curve`` or a
    pair (M1/M_sat, M2/M_sat).  The inverse map value -> T is a monotone
    (PCHIP) interpolant of the data.
    """
    if isinstance(moments, dict):
        targets = (moments["M1_over_Msat"], moments["M2_over_Msat"])
    else:
        targets = tuple(float(v) for v in moments)
    x, y = data.x, data.y
    if not np.all(np.diff(y) < 0):
        raise ValueError("magnetization data must decrease strictly with temperature")
    inverse = PchipInterpolator(y[::-1], x[::-1])
    out = []
    for v in targets:
        if not (y.min() <= v <= y.max()):
            raise OutOfRange(f"reduced moment {v} outside the data range [{y.min()}, {y.max()}]")
        out.append(float(inverse(v)))
    return out[0], out[1]


def fit_quadratic_baseline(data: DataSeries, window: tuple[float, float] | None = None) -> dict:
    """Least-squares ``y ~ a2 T^2 + a0`` over ``window``; residual over the whole series."""
    x, y = data.x, data.y
    mask = np.ones_like(x, dtype=bool) if window is None else (x >= window[0]) & (x <= window[1])
    if len(np.unique(x[mask])) < 3:
        raise DegenerateFit("need at least three distinct temperatures in the fit window")
    design = np.column_stack([x[mask] ** 2, np.ones(mask.sum())])
    (a2, a0), *_ = np.linalg.lstsq(design, y[mask], rcond=None)
    resid = y - (a2 * x ** 2 + a0)
    return {"a2": float(a2), "a0": float(a0),
            "residual": DataSeries(tuple(zip(x, resid)), data.kind, data.units)}


def residual_kink(series: DataSeries) -> float:
    """Temperature with the largest change of slope in a residual series."""
    x, y = series.x, series.y
    if len(x) < 3:
        raise DegenerateFit("need at least three points")
    slopes = np.diff(y) / np.diff(x)
    change = np.abs(np.diff(slopes))
    return float(x[1:-1][int(np.argmax(change))])


# ---------------------------------------------------------------------------
# grid oracle


def grid_minimum(poly: Polytope, m: Sequence, beta: float, coarse: float = 1e-2, levels: int = 6):
    """Brute-force minimizer of F over barycentric grids.

    A full grid of spacing ``coarse`` is scanned, then a small window around
    the best feasible point is rescanned with ten times finer spacing, ``levels``
    times.  Only for four spin levels.  Returns ``(F, mu)``.
    """
    k = poly.ambient_dimension
    if k != 4:
        raise ValueError("grid oracle is implemented for four spin levels")
    m = np.array([float(v) for v in m])
    rows = [(np.array([float(c) for c in r.coeffs]), float(r.bound)) for r in poly.rows if r.sense != EQ]
    a_mat = np.array([c for c, _ in rows])
    b_vec = np.array([b for _, b in rows])

    def scan(centre, half, step):
        ax = [np.arange(max(0.0, c - half), min(1.0, c + half) + step / 2, step) for c in centre[:3]]
        g1, g2, g3 = np.meshgrid(*ax, indexing="ij")
        pts = np.stack([g1.ravel(), g2.ravel(), g3.ravel()], axis=1)
        pts = np.column_stack([pts, 1.0 - pts.sum(axis=1)])
        pts = pts[pts[:, 3] >= 0]
        pts = pts[np.all(pts @ a_mat.T <= b_vec, axis=1)]
        if len(pts) == 0:
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = -np.where(pts > 0, pts * np.log(pts), 0.0).sum(axis=1)
        f = -beta * (pts @ m) - ent
        i = int(np.argmin(f))
        return float(f[i]), pts[i]

    best = scan(np.full(4, 0.5), 0.5, coarse)
    if best is None:
        raise EmptyPolytope("no grid point is feasible")
    step = coarse
    for _ in range(levels):
        for _ in range(20):
            nxt = scan(best[1], 4 * step, step / 10)
            if nxt is None or nxt[0] >= best[0]:
                break
            moved = np.max(np.abs(nxt[1] - best[1]))
            best = nxt
            if moved < 3 * step:
                break
        step /= 10
    return best


def free_energy(mu: np.ndarray, m: Sequence, beta: float) -> float:
    mu = np.asarray(mu, dtype=float)
    pos = mu[mu > 0]
    return float(-beta * np.dot(np.asarray([float(v) for v in m]), mu) + (pos * np.log(pos)).sum())
