from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from paulimag.errors import DimensionMismatch, Infeasible, Unbounded, UnboundedPolytope
from paulimag.polytope import (
    EQ,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    Polytope,
    Row,
    affine_dimension,
    certify_vertex,
    enumerate_vertices,
    feasible,
    find_point,
    lp_optimize,
    project_out,
    remove_redundant,
    solve_lp,
    verify_certificate,
    volume,
)

F = Fraction


def simplex(k):
    rows = [Row((1,) * k, 1, EQ, "sum")]
    rows += [Row(tuple(-1 if j == i else 0 for j in range(k)), 0) for i in range(k)]
    return Polytope(tuple(f"x{i}" for i in range(k)), rows)


def test_lp_small_and_certificate():
    poly = Polytope(("x", "y"), [Row((1, 1), 4), Row((1, 0), 3), Row((-1, 0), 0), Row((0, -1), 0)])
    res = lp_optimize(poly, (2, 1))
    assert res.value == 7 and res.point == (3, 1)
    assert verify_certificate(poly, res)
    low = lp_optimize(poly, (2, 1), "min")
    assert low.value == 0 and verify_certificate(poly, low)


def test_lp_infeasible_and_unbounded():
    empty = Polytope(("x",), [Row((1,), 0), Row((-1,), -1)])
    assert solve_lp(empty, (1,)).status == INFEASIBLE
    with pytest.raises(Infeasible):
        lp_optimize(empty, (1,))
    ray = Polytope(("x",), [Row((-1,), 0)])
    assert solve_lp(ray, (1,)).status == UNBOUNDED
    with pytest.raises(Unbounded):
        lp_optimize(ray, (1,))


def test_normalization_max_is_one(d7):
    poly = d7.polytope()
    obj = poly.vector({name: 1 for name in d7.mu_names})
    assert lp_optimize(poly, obj).value == 1


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Polytope(("x", "y"), [Row((1,), 0)])
    with pytest.raises(DimensionMismatch):
        solve_lp(simplex(3), (1, 2))


def test_remove_redundant_drops_implied_bound():
    poly = Polytope(("x",), [Row((1,), 1), Row((1,), 2), Row((-1,), 0)])
    out = remove_redundant(poly)
    assert [(r.coeffs, r.bound) for r in out.rows] == [((1,), 1), ((-1,), 0)]
    assert remove_redundant(out).rows == out.rows


def test_simplex_vertices_and_volume():
    verts = enumerate_vertices(simplex(4))
    assert sorted(verts) == sorted(tuple(F(int(i == j)) for j in range(4)) for i in range(4))
    assert all(certify_vertex(simplex(4), v) for v in verts)
    assert volume(simplex(3)) == F(1, 2)


def test_volume_ignores_row_order_and_duplicates():
    poly = simplex(4)
    shuffled = Polytope(poly.variables, tuple(reversed(poly.rows)) + poly.rows[1:3])
    assert volume(shuffled) == volume(poly) == F(1, 6)


def test_volume_of_flat_set_is_zero():
    flat = simplex(3).with_rows([Row((1, 0, 0), 0), Row((-1, 0, 0), 0)])
    assert volume(flat) == 0


def test_unbounded_vertices_rejected():
    with pytest.raises(UnboundedPolytope):
        enumerate_vertices(Polytope(("x", "y"), [Row((-1, 0), 0), Row((0, -1), 0)]))


def test_project_nothing_is_irredundant_input():
    poly = Polytope(("x", "y"), [Row((1, 1), 2), Row((1, 1), 3), Row((-1, 0), 0), Row((0, -1), 0)])
    out = project_out(poly, [])
    assert set((r.coeffs, r.bound) for r in out.rows) == {((1, 1), 2), ((-1, 0), 0), ((0, -1), 0)}


def test_project_square_to_interval():
    poly = Polytope(("x", "y"), [Row((1, 1), 1), Row((-1, 0), 0), Row((0, -1), 0)])
    out = project_out(poly, ["y"])
    assert sorted((r.coeffs, r.bound) for r in out.rows) == [((-1,), 0), ((1,), 1)]


def test_feasible_wrapper(d7):
    ok, bad = feasible(d7, (F(7, 5),) * 5, (F(3, 5), F(1, 5), F(1, 5), 0))
    assert ok and not bad
    ok, bad = feasible(d7, (2, 2, F(3, 2), F(1, 1), F(1, 2)), (F(1, 4),) * 4)
    assert not ok and any(r.cubicle == "R9" for r in bad)


def test_witness_points_feasible(d7, d8, d7_low):
    for system in (d7, d8, d7_low):
        nu, mu = system.witness
        assert feasible(system, nu, mu)[0]


def test_affine_dimension():
    assert affine_dimension([(0, 0), (1, 0), (0, 1)]) == 2
    assert affine_dimension([(0, 0), (1, 1), (2, 2)]) == 1


def test_solver_is_deterministic(d7):
    poly = d7.restrict((F(35, 24),) * 3 + (F(21, 16),) * 2)
    a = solve_lp(poly, (3, 1, -1, -3))
    b = solve_lp(poly, (3, 1, -1, -3))
    assert a == b


# --- random instances -------------------------------------------------------

small = st.integers(-5, 5)


@st.composite
def bounded_lp(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(0, 5))
    rows = [Row(tuple(draw(small) for _ in range(n)), draw(st.integers(-3, 8))) for _ in range(m)]
    # a box keeps every instance bounded
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        rows.append(Row(e, draw(st.integers(0, 4))))
        rows.append(Row(tuple(-v for v in e), draw(st.integers(0, 4))))
    if draw(st.booleans()):
        rows.append(Row(tuple(draw(small) for _ in range(n)), draw(st.integers(-2, 2)), EQ))
    obj = tuple(draw(small) for _ in range(n))
    return Polytope(tuple(f"x{i}" for i in range(n)), rows), obj, draw(st.sampled_from(["max", "min"]))


@settings(max_examples=1000)
@given(bounded_lp())
def test_random_lp_certificates_and_float_oracle(instance):
    poly, obj, direction = instance
    res = solve_lp(poly, obj, direction)
    a_ub = np.array([[float(c) for c in r.coeffs] for r in poly.inequalities])
    b_ub = np.array([float(r.bound) for r in poly.inequalities])
    eqs = poly.equalities
    a_eq = np.array([[float(c) for c in r.coeffs] for r in eqs]) if eqs else None
    b_eq = np.array([float(r.bound) for r in eqs]) if eqs else None
    sign = -1.0 if direction == "max" else 1.0
    ref = linprog(sign * np.array([float(v) for v in obj]), A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * poly.ambient_dimension, method="highs")
    if res.status == OPTIMAL:
        assert verify_certificate(poly, res)
        assert ref.status == 0
        assert abs(sign * ref.fun - float(res.value)) < 1e-7
    else:
        assert res.status == INFEASIBLE
        assert ref.status == 2


@st.composite
def projection_case(draw):
    n = 3
    rows = [Row(tuple(draw(small) for _ in range(n)), draw(st.integers(0, 6))) for _ in range(draw(st.integers(1, 5)))]
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        rows.append(Row(e, 3))
        rows.append(Row(tuple(-v for v in e), 3))
    pts = draw(st.lists(st.tuples(st.integers(-12, 12), st.integers(-12, 12)), min_size=1, max_size=6))
    return Polytope(("x", "y", "z"), rows), [(F(a, 4), F(b, 4)) for a, b in pts]


@settings(max_examples=60)
@given(projection_case())
def test_projection_lift_soundness(case):
    poly, points = case
    shadow = project_out(poly, ["z"])
    for x, y in points:
        lifted = find_point(poly.fix({"x": x, "y": y})) is not None
        assert shadow.contains((x, y)) == lifted
