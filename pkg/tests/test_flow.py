import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from geomcrystal import flow
from geomcrystal import groupcore as gc
from geomcrystal import pathmodel as pm
from geomcrystal.errors import DomainExit

seeds = st.integers(0, 10_000)


def sl2_exact(seed, T=1.0):
    """B_T of the smooth curve itself, integral by adaptive quadrature."""
    curve = pm.smooth_function(seed, 2, T)
    integral = quad(lambda t: math.exp(-2 * curve(t)[0]), 0, T, epsabs=0, epsrel=1e-13, limit=200)[0]
    x = curve(T)[0]
    return np.array([[math.exp(x), 0.0], [math.exp(x) * integral, math.exp(-x)]])


def relative_error(B, exact):
    mask = exact != 0
    return float(np.max(np.abs(B - exact)[mask] / np.abs(exact[mask])))


def test_zero_path_examples():
    assert np.allclose(flow.project_p(pm.Path.zero(2, K=64)), [[1, 0], [1, 1]], atol=1e-14)
    traj = flow.solve(pm.Path.zero(3, K=64))
    assert np.allclose(traj.N[-1], [[1, 0, 0], [1, 1, 0], [0.5, 1, 1]], atol=1e-13)
    assert np.array_equal(traj.N[0], np.eye(3))


def test_sl2_closed_form_on_random_path():
    path = pm.random_path(4, 2, 1.0, 2000)
    integral = np.exp(pm.log_integrals(path, 1)[0])
    traj = flow.solve(path)
    assert np.allclose(traj.B_stack, flow.sl2_closed_form(path, integral), rtol=1e-12, atol=1e-14)


def test_second_order_convergence_on_a_smooth_path():
    exact = sl2_exact(3)
    errs = [relative_error(flow.project_p(pm.smooth_path(3, 2, K=K)), exact) for K in (1000, 2000, 4000)]
    for coarse, fine in zip(errs, errs[1:]):
        assert 1.8 <= math.log2(coarse / fine) <= 2.2


@given(seeds)
def test_trajectory_invariants(seed):
    path = pm.random_path(seed, 4, 1.0, 300)
    traj = flow.solve(path)
    assert np.allclose(np.triu(traj.N, 1), 0) and np.allclose(np.diagonal(traj.N, axis1=1, axis2=2), 1)
    assert np.allclose(traj.A[-1], np.diag(np.exp(path.values[-1])))
    assert flow.certify_positivity(traj, 1.0)["status"] == "positive"


def test_certify_positivity_examples():
    traj = flow.solve(pm.Path.zero(2, K=32))
    report = flow.certify_positivity(traj, 1.0)
    assert report["min_minor"] == pytest.approx(1.0) and report["status"] == "positive"
    assert flow.certify_positivity(traj, 0.0)["status"] == "boundary"
    traj3 = flow.solve(pm.random_path(1, 3, 1.0, 500))
    report = flow.certify_positivity(traj3, 1.0)
    assert report["minors_checked"] == 12 and report["status"] == "positive"


def test_projection_structure():
    path = pm.random_path(5, 3, 1.0, 1000)
    B = flow.project_p(path)
    tri = gc.gauss_decompose(B)
    assert np.allclose(np.log(tri.diagonal), path.endpoint, atol=1e-12)
    for i in (1, 2):
        assert math.log(tri.n_part[i, i - 1]) == pytest.approx(pm.eps(path, i), abs=1e-10)


@given(seeds)
def test_projection_commutes_with_duality(seed):
    path = pm.random_path(seed, 3, 1.0, 500)
    lhs = flow.project_p(pm.dual(path))
    rhs = gc.involution_iota(flow.project_p(path))
    assert np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))) <= 1e-10


def test_transform_examples():
    path = pm.random_path(6, 3, 1.0, 1000)
    n_elt = gc.chevalley_y(3, 1, 0.7) @ gc.chevalley_y(3, 2, 1.3)
    assert pm.sup_distance(flow.transform_T(n_elt, path), path) <= 1e-12
    a = np.array([0.3, -0.1, -0.2])
    shifted = flow.transform_T(gc.exp_cartan(a), path)
    assert np.allclose(shifted.values, path.values + a, atol=1e-12)
    xi = 0.8
    integral = np.exp(pm.log_integrals(path, 2)[0])
    expected = path.values + np.log1p(xi * integral)[:, None] * np.array([0.0, 1.0, -1.0])
    assert np.allclose(flow.transform_T(gc.chevalley_x(3, 2, xi), path).values, expected, atol=1e-12)


def test_transform_leaves_domain():
    path = pm.Path.zero(2, K=100)
    with pytest.raises(DomainExit) as err:
        flow.transform_T(gc.chevalley_x(2, 1, -2.0), path)
    assert err.value.time == pytest.approx(0.5, abs=0.011)


def test_transform_composition():
    rng = np.random.default_rng(0)
    path = pm.random_path(1, 3, 1.0, 20000)
    for _ in range(3):
        u1 = gc.x_word(3, (1, 2, 1), rng.uniform(0.2, 2, 3))
        u2 = gc.x_word(3, (2, 1, 2), rng.uniform(0.2, 2, 3))
        lhs = flow.transform_T(u1 @ u2, path)
        rhs = flow.transform_T(u1 @ gc.part_minus(u2), flow.transform_T(u2, path))
        assert pm.sup_distance(lhs, rhs) <= 1e-7


@given(seeds, st.floats(0.1, 5))
def test_first_minor_after_a_chevalley_factor(seed, xi):
    path = pm.random_path(seed, 3, 1.0, 500)
    traj = flow.solve(path)
    integral = np.exp(pm.log_integrals(path, 1)[0])
    G = np.einsum("ij,kjl->kil", gc.chevalley_x(3, 1, xi), traj.N)
    minors = gc.principal_minors_batch(G)
    assert np.allclose(minors[:, 0], 1 + xi * integral, rtol=1e-7)
    assert np.allclose(minors[:, 1], 1.0, rtol=1e-7)


@given(seeds, st.floats(-2, 2))
def test_action_is_a_path_transform(seed, c):
    path = pm.random_path(seed, 3, 1.0, 500)
    for i in (1, 2):
        # a negative entry still keeps g B_t in the big cell: 1 + (e^c - 1) F_t > 0
        g = gc.chevalley_x(3, i, math.expm1(c) * math.exp(-pm.eps(path, i)))
        assert pm.sup_distance(pm.act(path, i, c), flow.transform_T(g, path)) <= 1e-8


def test_trajectory_json():
    traj = flow.solve(pm.Path.zero(2, K=10))
    data = json.loads(flow.trajectory_to_json(traj, stride=4))
    assert data["grid"] == [0.0, 0.4, 0.8, 1.0]
    assert len(data["N"][0]) == 4 and data["A"][0] == [1.0, 0.0, 0.0, 1.0]
