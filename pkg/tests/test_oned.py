import numpy as np
import pytest

from core.errors import InvalidParameterError
from core.oned import (
    OneDProblem,
    PBoundary,
    clamped_effective_modulus,
    discrete_energy,
    lc_sweep,
    solve_mindlin_1d,
    solve_relaxed_1d,
)


def test_local_limit_equal_moduli():
    solution = solve_mindlin_1d(OneDProblem(mu_e=1.0, mu_micro=1.0, Lc=0.0, n_cells=2000))
    np.testing.assert_allclose(solution.u, solution.grid, atol=1e-10)
    np.testing.assert_allclose(solution.p, 0.5, atol=1e-10)
    assert solution.effective_modulus == pytest.approx(0.5, abs=1e-10)
    assert solution.residual < 1e-10


def test_local_limit_is_harmonic_mean():
    prob = OneDProblem(mu_e=2.0, mu_micro=3.0, Lc=0.0, n_cells=2000)
    assert solve_mindlin_1d(prob).effective_modulus == pytest.approx(1.2, abs=1e-10)
    assert prob.harmonic_modulus == pytest.approx(1.2)


def test_boundary_data_is_exact():
    solution = solve_mindlin_1d(OneDProblem(mu_e=1.0, mu_micro=2.0, Lc=0.3, n_cells=64, u_left=-0.5, u_right=0.25,
                                            p_boundary="clamped"))
    assert solution.u[0] == -0.5 and solution.u[-1] == 0.25
    assert solution.p[0] == 0.0 and solution.p[-1] == 0.0


def test_clamped_boundary_layer_stiffens():
    prob = OneDProblem(mu_e=1.0, mu_micro=1.0, Lc=0.05, n_cells=2000, p_boundary=PBoundary.CLAMPED)
    mu_eff = solve_mindlin_1d(prob).effective_modulus
    assert prob.harmonic_modulus < mu_eff < prob.mu_micro
    assert mu_eff == pytest.approx(clamped_effective_modulus(prob), rel=1e-4)


def test_free_micro_distortion_stays_homogeneous():
    for lc in (1e-3, 0.1, 10.0):
        prob = OneDProblem(mu_e=1.0, mu_micro=3.0, Lc=lc, n_cells=200)
        solution = solve_mindlin_1d(prob)
        assert solution.effective_modulus == pytest.approx(prob.harmonic_modulus, rel=1e-8)
        np.testing.assert_allclose(solution.p, solution.p[0], atol=1e-8)


@pytest.mark.parametrize("boundary", list(PBoundary))
def test_small_length_approaches_harmonic_mean(boundary):
    prob = OneDProblem(mu_e=1.0, mu_micro=1.0, Lc=1e-3, n_cells=2000, p_boundary=boundary)
    assert solve_mindlin_1d(prob).effective_modulus == pytest.approx(prob.harmonic_modulus, rel=5e-3)


def test_vanishing_length_in_sweep():
    template = OneDProblem(mu_e=1.0, mu_micro=2.0, n_cells=4000)
    (lc, mu_eff), = lc_sweep(template, [1e-4])
    assert lc == 1e-4
    assert abs(mu_eff - template.harmonic_modulus) < 1e-6 * template.harmonic_modulus


def test_sweep_converges_monotonically():
    template = OneDProblem(mu_e=1.0, mu_micro=1.0, n_cells=2000, p_boundary="clamped")
    rows = lc_sweep(template, [0.2, 0.1, 0.05, 0.025, 0.0], max_workers=2)
    assert [row[0] for row in rows] == [0.2, 0.1, 0.05, 0.025, 0.0]
    moduli = np.array([row[1] for row in rows])
    assert np.all(np.diff(moduli) < 0.0)
    gaps = moduli - template.harmonic_modulus
    assert np.all(np.diff(gaps[:-1]) < 0.0)
    assert moduli[-1] == pytest.approx(template.harmonic_modulus, abs=1e-12)


def test_second_order_grid_convergence():
    errors = []
    for n in (100, 200, 400):
        prob = OneDProblem(mu_e=1.0, mu_micro=1.0, Lc=0.1, n_cells=n, p_boundary=PBoundary.CLAMPED)
        errors.append(abs(solve_mindlin_1d(prob).effective_modulus - clamped_effective_modulus(prob)))
    assert errors[0] / errors[1] > 3.0
    assert errors[1] / errors[2] > 3.0


@pytest.mark.parametrize("boundary", list(PBoundary))
def test_solution_satisfies_central_difference_stencil(boundary):
    prob = OneDProblem(mu_e=1.5, mu_micro=0.5, Lc=0.2, n_cells=100, p_boundary=boundary)
    solution = solve_mindlin_1d(prob)
    h = 1.0 / prob.n_cells
    p, flux = solution.p, solution.cell_flux
    curvature = (p[:-2] - 2.0 * p[1:-1] + p[2:]) / h ** 2
    micro_rows = -0.5 * (flux[:-1] + flux[1:]) + 2.0 * prob.mu_micro * p[1:-1] - prob.mu * prob.Lc ** 2 * curvature
    np.testing.assert_allclose(micro_rows, 0.0, atol=1e-8)
    np.testing.assert_allclose(np.diff(flux), 0.0, atol=1e-9)
    if boundary is PBoundary.FREE:
        # 镜像虚节点 p_{-1} = p_1
        left = -flux[0] + 2.0 * prob.mu_micro * p[0] - 2.0 * prob.mu * prob.Lc ** 2 * (p[1] - p[0]) / h ** 2
        assert left == pytest.approx(0.0, abs=1e-8)


def test_flux_is_constant():
    solution = solve_mindlin_1d(OneDProblem(mu_e=1.5, mu_micro=0.5, Lc=0.2, n_cells=500, p_boundary="clamped"))
    flux = solution.cell_flux
    assert np.max(np.abs(flux - flux[0])) < 1e-9 * abs(flux[0])


def test_solution_energy_below_homogeneous_trial():
    prob = OneDProblem(mu_e=1.0, mu_micro=2.0, Lc=0.1, n_cells=200)
    solution = solve_mindlin_1d(prob)
    slope = prob.u_right - prob.u_left
    trial = discrete_energy(prob, solution.grid * slope + prob.u_left, np.full(prob.n_cells + 1, slope))
    assert discrete_energy(prob, solution.u, solution.p) <= trial


def test_relaxed_closed_form():
    assert solve_relaxed_1d(1.0, 1.0).effective_modulus == 0.5
    assert solve_relaxed_1d(1.0, 1e9).effective_modulus == pytest.approx(1.0, abs=1e-8)
    relaxed = solve_relaxed_1d(2.0, 3.0, u_left=0.1, u_right=0.6)
    np.testing.assert_allclose(relaxed.cell_flux, 2.0 * 2.0 * (0.5 - 0.2), rtol=1e-9)


def test_relaxed_matches_two_field_solver_node_by_node():
    relaxed = solve_relaxed_1d(2.0, 3.0, n_cells=16)
    numeric = solve_mindlin_1d(OneDProblem(mu_e=2.0, mu_micro=3.0, Lc=0.0, n_cells=16))
    np.testing.assert_allclose(numeric.u, relaxed.u, atol=1e-12)
    np.testing.assert_allclose(numeric.p, relaxed.p, atol=1e-12)
    assert numeric.effective_modulus == pytest.approx(relaxed.effective_modulus, abs=1e-12)


def test_invalid_problems():
    with pytest.raises(InvalidParameterError):
        OneDProblem(mu_e=0.0, mu_micro=1.0)
    with pytest.raises(InvalidParameterError):
        OneDProblem(mu_e=1.0, mu_micro=1.0, Lc=-0.1)
    with pytest.raises(InvalidParameterError):
        OneDProblem(mu_e=1.0, mu_micro=1.0, n_cells=4)
    with pytest.raises(InvalidParameterError):
        solve_mindlin_1d(OneDProblem(mu_e=1.0, mu_micro=1.0, n_cells=16, u_left=1.0, u_right=1.0))
    with pytest.raises(InvalidParameterError):
        lc_sweep(OneDProblem(mu_e=1.0, mu_micro=1.0, n_cells=16), [0.1, -1.0])
    with pytest.raises(ValueError):
        OneDProblem(mu_e=1.0, mu_micro=1.0, p_boundary="pinned")
