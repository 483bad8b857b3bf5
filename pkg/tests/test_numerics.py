"""Integration, differentiation and quadrature kernel tests."""

import numpy as np
import pytest

from f13.numerics import (
    Grid,
    PoleError,
    cumulative_integral_refined,
    fd_derivative,
    quadrature,
    rk4_integrate,
)


def measured_orders(errors):
    return [np.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]


def test_grid_invariants():
    g = Grid(0.0, 1.0, 10)
    assert g.h == 0.1
    assert len(g.points()) == 11
    with pytest.raises(ValueError):
        Grid(1.0, 0.0, 10)
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 3)


def test_rk4_constant_and_exponential():
    g = Grid(0.0, 1.0, 1000)
    t = rk4_integrate(lambda z, y: np.zeros_like(y), [2.0, -3.0], g)
    assert np.max(np.abs(t.states - [2.0, -3.0])) == 0.0
    t = rk4_integrate(lambda z, y: y, [1.0], g)
    assert abs(t.column(0)[-1] - np.e) < 1e-10


def test_rk4_order():
    errs = []
    for N in (100, 200, 400):
        t = rk4_integrate(lambda z, y: y, [1.0], Grid(0.0, 1.0, N))
        errs.append(abs(t.column(0)[-1] - np.e))
    orders = measured_orders(errs)
    print("rk4 orders:", orders)
    assert min(orders) > 3.9


def test_rk4_pole_detection():
    # y' = y^2 from y(0) = 1 blows up at z = 1
    with pytest.raises(PoleError) as err:
        rk4_integrate(lambda z, y: y**2, [1.0], Grid(0.0, 2.0, 200))
    assert np.all(np.isfinite(err.value.partial_states))
    assert 0.9 < err.value.last_good_z <= 1.1


def test_fd_constant_and_linear():
    g = Grid(0.0, 1.0, 50)
    for order in (2, 4):
        # boundary stencils leave rounding-level residue on constants
        assert np.max(np.abs(fd_derivative(np.full(51, 3.3), g, order))) < 5e-14
        d = fd_derivative(2.0 * g.points() + 1.0, g, order)
        assert np.max(np.abs(d - 2.0)) < 1e-12


def test_fd_order4_accuracy_interior():
    g = Grid(0.0, 1.0, 100)  # h = 1e-2
    d = fd_derivative(np.sin(g.points()), g, order=4)
    interior = np.abs(d - np.cos(g.points()))[2:-2]
    assert np.max(interior) < 1e-8


def test_fd_measured_orders():
    for order in (2, 4):
        errs = []
        for N in (100, 200, 400):
            g = Grid(0.0, 1.0, N)
            d = fd_derivative(np.sin(g.points()), g, order)
            errs.append(np.max(np.abs(d - np.cos(g.points()))))
        orders = measured_orders(errs)
        print(f"fd order-{order} measured:", orders)
        assert min(orders) > order - 0.1


def test_fd_grid_too_small():
    with pytest.raises(ValueError):
        fd_derivative(np.zeros(4), Grid(0.0, 1.0, 4), order=4)  # length mismatch
    g = Grid(0.0, 1.0, 4)
    fd_derivative(np.zeros(5), g, order=4)  # 5 points is the minimum


def test_quadrature_polynomial_and_exponential():
    g = Grid(0.0, 1.0, 100)
    assert np.max(np.abs(quadrature(np.zeros(101), g))) == 0.0
    q = quadrature(2.0 * g.points(), g)
    assert abs(q[-1] - 1.0) < 1e-12
    q = quadrature(np.exp(g.points()), g)
    assert abs(q[-1] - (np.e - 1.0)) < 1e-9


def test_quadrature_order():
    errs = []
    for N in (100, 200, 400):
        g = Grid(0.0, 1.0, N)
        errs.append(abs(quadrature(np.exp(g.points()), g)[-1] - (np.e - 1.0)))
    orders = measured_orders(errs)
    print("simpson orders:", orders)
    assert min(orders) > 3.9


def test_quadrature_odd_cell_flagged():
    g = Grid(0.0, 1.0, 101)
    with pytest.warns(RuntimeWarning, match="trapezoid"):
        q = quadrature(np.exp(g.points()), g)
    assert abs(q[-1] - (np.e - 1.0)) < 1e-6  # trapezoid tail costs accuracy


def test_cumulative_refined_matches_log():
    g = Grid(1.0, 3.0, 40)
    vals = cumulative_integral_refined(lambda z: 1.0 / z, g, tol=1e-12)
    assert vals.shape == (41,)
    assert np.max(np.abs(vals - np.log(g.points()))) < 1e-11


def test_trajectory_shape_checks():
    g = Grid(0.0, 1.0, 10)
    from f13.numerics import Trajectory

    with pytest.raises(ValueError):
        Trajectory(g, np.zeros((5, 2)))
    with pytest.raises(ValueError):
        Trajectory(g, np.full((11, 1), np.nan))
