import math
import warnings

import numpy as np
import pytest

from fpconstraint.experiments import HEALTHY_MODEL
from fpconstraint.mesh import build_mesh
from fpconstraint.model import DoubleWell, Indicator, ModelSpec, Quadratic, ShiftedGaussian
from fpconstraint.oracles import (
    ResolutionWarning,
    check_asymptote,
    exact_moments,
    fourth_moment_derivative,
    mass_prefactor,
    moment_convergence,
    nodes_in_core,
    predicted_slope,
    required_intervals,
    second_moment_bound,
)

UNIT = ModelSpec(Quadratic(1.0), source=Indicator(0.3, 0.5), gamma=1.0, dim=3)


def test_mass_prefactor():
    assert mass_prefactor(2.0, 4.0, 3.0) == 1.5


def test_zeroth_moment_value():
    m0, _, _ = exact_moments(UNIT, 1.0)
    assert m0 == pytest.approx((0.5**3 - 0.3**3) / 3, rel=1e-15)


@pytest.mark.parametrize("mu", [0.1, 1.0, 7.0])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 3.0])
def test_exact_moments_match_expanded_form(mu, gamma):
    # m4 = A mu/(g+8mu) + B mu/((g+8mu)(g+4mu)), B = (4N+8) int (r^2 + 2N/g) S
    model = ModelSpec(Quadratic(1.0), source=Indicator(0.3, 0.5), gamma=gamma, dim=3)
    n, s = 3, model.source
    i0, i2, i4 = (s.moment(k, n) for k in (0, 2, 4))
    m2_want = mu / (gamma + 4 * mu) * (i2 + 2 * n * i0 / gamma)
    B = (4 * n + 8) * (i2 + 2 * n * i0 / gamma)
    m4_want = i4 * mu / (gamma + 8 * mu) + B * mu / ((gamma + 8 * mu) * (gamma + 4 * mu))
    m0, m2, m4 = exact_moments(model, mu)
    assert m0 == pytest.approx(mu * i0 / gamma, rel=1e-14)
    assert m2 == pytest.approx(m2_want, rel=1e-14)
    assert m4 == pytest.approx(m4_want, rel=1e-14)


def test_exact_moments_need_quadratic():
    with pytest.raises(TypeError):
        exact_moments(ModelSpec(DoubleWell()), 1.0)


@pytest.mark.parametrize("mu", [0.01, 0.3, 2.0, 40.0])
def test_fourth_moment_derivative(mu):
    d = 1e-6 * max(mu, 1.0)
    fd = (exact_moments(UNIT, mu + d)[2] - exact_moments(UNIT, mu - d)[2]) / (2 * d)
    assert fourth_moment_derivative(UNIT, mu) == pytest.approx(fd, rel=1e-7)


def test_second_moment_bound_holds():
    # Hessian of a r^2 is 2a
    for a in (0.5, 1.0, 2.0):
        model = ModelSpec(Quadratic(a), source=Indicator(0.3, 0.5))
        bound = second_moment_bound(model, 2 * a)
        for mu in np.logspace(-3, 6, 20):
            assert exact_moments(model, mu)[1] <= bound
        assert exact_moments(model, 1e12)[1] == pytest.approx(bound, rel=1e-9)
    with pytest.raises(ValueError):
        second_moment_bound(UNIT, 0.0)


def test_moments_converge_on_large_ball():
    reports, orders = moment_convergence(UNIT, 1.0, [100, 200, 400, 800], radius=6.0)
    errs = np.array([r.rel_errors for r in reports])
    # m2 and m4 converge at second order; m0 sits at roundoff
    np.testing.assert_allclose(orders[-1, 1:], 2.0, atol=0.05)
    assert np.all(orders[:, 1:] > 1.8)
    assert errs[-1, 1] < 1e-3 and errs[-1, 2] < 1e-3
    assert np.all(errs[:, 0] < 1e-10)


def test_moments_on_unit_ball_are_truncation_limited():
    reports, _ = moment_convergence(UNIT, 1.0, [500, 1000])
    errs = np.array([r.rel_errors for r in reports])
    assert np.all(errs > 0.5)
    assert np.all(np.abs(errs[1] - errs[0]) < 1e-3)


def test_predicted_slope_value():
    want = (4e-3 * math.pi) ** -1.5 * (0.5**3 - 0.3**3) / 3
    assert predicted_slope(HEALTHY_MODEL) == pytest.approx(want, rel=1e-14)
    assert predicted_slope(HEALTHY_MODEL) == pytest.approx(23.1894, rel=1e-5)


def test_resolution_proxy():
    assert required_intervals(4.0, 1e7) == 56921
    mesh = build_mesh(56921, 3)
    assert nodes_in_core(mesh, 4.0, 1e7) == 10
    assert nodes_in_core(build_mesh(56920, 3), 4.0, 1e7) == 9
    assert nodes_in_core(build_mesh(2000, 3), 4.0, 1e4) == 11


def test_asymptote_trend(healthy_model):
    mesh = build_mesh(2000, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ResolutionWarning)
        rep = check_asymptote(healthy_model, mesh, [1e2, 1e3, 1e4])
    assert rep.decreasing and rep.resolved.all()
    assert rep.rel_deviation[-1] <= 0.1
    assert rep.predicted_slope == pytest.approx(23.1894, rel=1e-5)


def test_asymptote_warns_when_unresolved(healthy_model):
    with pytest.warns(ResolutionWarning):
        rep = check_asymptote(healthy_model, build_mesh(200, 3), [1e2, 1e4])
    assert list(rep.resolved) == [True, False]


def test_vanishing_origin_kernel_predicts_zero_slope():
    model = ModelSpec(Quadratic(2.0), ShiftedGaussian(1e-3, 0.1))
    assert predicted_slope(model) < 1e-3 * predicted_slope(HEALTHY_MODEL)
