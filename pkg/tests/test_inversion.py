import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpconstraint.assembly import assemble
from fpconstraint.experiments import PRESETS
from fpconstraint.inversion import Status, _sign_changes, invert, mu_grid, scan_monotonicity
from fpconstraint.mesh import build_mesh
from fpconstraint.solver import evaluate, solve_primal


@pytest.fixture(scope="module")
def systems():
    out = {}
    for name in ("fig_ok1", "fig_bad", "fig_bad2", "fig_delta4"):
        model = PRESETS[name].model
        out[name] = (assemble(model, build_mesh(2000, 3)), model)
    return out


def test_mu_grid():
    np.testing.assert_allclose(mu_grid(0.0, 10.0, 11), np.arange(11.0))
    g = mu_grid(1e-2, 1e7, 10)
    assert g[0] == pytest.approx(1e-2) and g[-1] == pytest.approx(1e7)
    np.testing.assert_allclose(np.diff(np.log10(g)), 1.0)
    with pytest.raises(ValueError):
        mu_grid(5.0, 1.0, 10)
    with pytest.raises(ValueError):
        mu_grid(0.0, 1.0, 2)


def test_sign_changes_skip_zeros():
    grid = np.arange(6.0)
    assert _sign_changes(grid, np.array([1, 0, 2, -1, 0, -3.0])) == [(2.0, 3.0)]
    assert _sign_changes(grid, np.array([1, 0, 0, -1, 0, 2.0])) == [(0.0, 3.0), (3.0, 5.0)]
    assert _sign_changes(grid, np.zeros(6)) == []


@settings(max_examples=60)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=30))
def test_sign_change_count_matches_runs(values):
    v = np.array(values)
    nz = np.sign(v[v != 0])
    expected = int(np.count_nonzero(np.diff(nz))) if nz.size else 0
    assert len(_sign_changes(np.arange(len(v), dtype=float), v)) == expected


def test_scan_healthy_is_monotone(systems):
    sys, model = systems["fig_ok1"]
    scan = scan_monotonicity(sys, model, 0.0, 10.0, 21)
    assert scan.monotone
    assert np.all(np.diff(scan.f_values) > 0)
    assert scan.f_values[0] == 0.0


def test_scan_threads_match_serial(systems):
    sys, model = systems["fig_bad2"]
    a = scan_monotonicity(sys, model, 0.0, 2500.0, 11)
    b = scan_monotonicity(sys, model, 0.0, 2500.0, 11, workers=4)
    np.testing.assert_array_equal(a.f_values, b.f_values)
    np.testing.assert_array_equal(a.fprime_values, b.fprime_values)


@pytest.mark.parametrize("mu_star", [0.5, 5.0, 50.0])
def test_round_trip(systems, mu_star):
    sys, model = systems["fig_ok1"]
    ell = solve_primal(sys, model, mu_star).f_value
    rep = invert(sys, model, ell)
    assert rep.status is Status.CONVERGED
    assert abs(rep.f_at_mu - ell) <= 1e-8 * max(1.0, ell)
    assert rep.mu_found == pytest.approx(mu_star, rel=1e-6)
    lo, hi = rep.bracket
    f_lo = solve_primal(sys, model, lo).f_value
    f_hi = solve_primal(sys, model, hi).f_value
    assert f_lo <= ell <= f_hi


def test_zero_target(systems):
    sys, model = systems["fig_ok1"]
    rep = invert(sys, model, 0.0)
    assert rep.mu_found == 0.0 and rep.n_solves == 0 and rep.converged


def test_negative_target_rejected(systems):
    sys, model = systems["fig_ok1"]
    with pytest.raises(ValueError):
        invert(sys, model, -1.0)
    with pytest.raises(ValueError):
        invert(sys, model, 1.0, tol_f=0.0)


def test_unreachable_target_reports_no_bracket(systems):
    # F for the double well stays below about 4e3
    sys, model = systems["fig_bad"]
    rep = invert(sys, model, 1e6, mu_max=1e6)
    assert rep.status is Status.NO_BRACKET and not rep.converged
    assert rep.mu_found > 1e6


def test_smallest_root_with_scan(systems):
    sys, model = systems["fig_bad2"]
    scan = scan_monotonicity(sys, model, 0.0, 2500.0, 101)
    assert not scan.monotone
    ell = 0.9 * scan.f_values.max()
    crossings = scan.crossings(ell)
    assert len(crossings) == 2
    rep = invert(sys, model, ell, scan=scan)
    assert rep.status is Status.NON_MONOTONE_WARNING
    lo, hi = crossings[0]
    assert lo <= rep.mu_found <= hi
    assert abs(rep.f_at_mu - ell) <= rep.tol_f


def test_newton_uses_exact_derivative(systems):
    sys, model = systems["fig_ok1"]
    ell = evaluate(sys, model, 3.3)[0]
    rep = invert(sys, model, ell)
    assert rep.newton_steps >= 1
    assert rep.n_solves <= 12
