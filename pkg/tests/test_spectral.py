"""Eigensolver checks: analytic cases, structure of eigenpairs, identities."""

import math

import numpy as np
import pytest

from henonmorse.radial import linearized_potential, solve_nodal_power
from henonmorse.spectral import (SpectralConfig, SpectralError,
                                 WeightedSLProblem, count_interior_nodes,
                                 fit_decay_exponent, liouville_transform,
                                 picone_residual, rayleigh_quotient,
                                 solve_singular_spectrum,
                                 solve_standard_spectrum, theta_analytic,
                                 weighted_inner_product, zero_potential)

BESSEL_J0_FIRST_ZERO = 2.404825557695773


def test_standard_bessel_disc():
    prob = WeightedSLProblem(M=2.0, a=zero_potential, kind="standard")
    spec = solve_standard_spectrum(prob, 2)
    target = BESSEL_J0_FIRST_ZERO ** 2
    assert spec.values[0] == pytest.approx(target, rel=1e-3)
    assert spec.values[0] == pytest.approx(target, rel=1e-7)


def test_standard_ball_sine():
    prob = WeightedSLProblem(M=3.0, a=zero_potential, kind="standard")
    spec = solve_standard_spectrum(prob, 3)
    assert spec.values[0] == pytest.approx(math.pi ** 2, rel=1e-7)
    # eigenfunction sin(pi r)/r, checked at a few radii
    p1 = spec.eigenpairs[0]
    r = p1.grid[1:-1:512]
    model = np.sin(math.pi * r) / r
    scale = p1.samples[1:-1:512] / model
    assert np.std(scale) / abs(np.mean(scale)) < 1e-5
    # all eigenvalues positive without a potential
    assert np.all(spec.values > 0)
    assert spec.negative_count == 0


def test_standard_purely_positive_any_m():
    for M in (2.0, 2.5, 4.0):
        prob = WeightedSLProblem(M=M, a=zero_potential, kind="standard")
        spec = solve_standard_spectrum(prob, 2)
        assert np.all(spec.values > 0)


def test_singular_zero_potential_empty():
    prob = WeightedSLProblem(M=4.0, a=zero_potential, kind="singular")
    spec = solve_singular_spectrum(prob, 5)
    assert len(spec.eigenpairs) == 0
    assert spec.exhausted_below >= spec.threshold - 1e-6 - 1e-15
    assert spec.negative_count == 0


def test_liouville_transform_structure():
    prob = WeightedSLProblem(M=4.0, a=zero_potential, kind="singular")
    lp = liouville_transform(prob, 30.0, 512)
    assert lp.threshold == pytest.approx(1.0)
    assert np.allclose(lp.V, 1.0)
    prob2 = WeightedSLProblem(M=2.0, a=lambda r: np.ones_like(r),
                              kind="singular")
    lp2 = liouville_transform(prob2, 30.0, 512)
    assert lp2.threshold == 0.0
    r = np.exp(-lp2.x)
    assert np.allclose(lp2.V, -r * r)
    with pytest.raises(ValueError):
        liouville_transform(
            WeightedSLProblem(M=3.0, a=zero_potential, kind="standard"),
            30.0)


@pytest.fixture(scope="module")
def lane_emden_case():
    prof = solve_nodal_power(3.0, 3.0, 2)
    a = linearized_potential(prof)
    prob = WeightedSLProblem(M=3.0, a=a, kind="singular")
    spec = solve_singular_spectrum(prob, 3)
    return prof, prob, spec


def test_singular_spectrum_shape(lane_emden_case):
    _, _, spec = lane_emden_case
    vals = spec.values
    assert spec.negative_count == 2
    assert vals[0] < -2.0 < vals[1] < 0.0
    assert np.all(np.diff(vals) > 0)          # simple, strictly increasing
    assert [p.interior_nodes for p in spec.eigenpairs[:3]] == [0, 1, 2]
    # the public node counter agrees with the stored counts
    assert [count_interior_nodes(p) for p in spec.eigenpairs[:3]] == [0, 1, 2]


def test_eigenpair_normalization_and_sign(lane_emden_case):
    _, _, spec = lane_emden_case
    for p in spec.eigenpairs:
        h = p.x_grid[1] - p.x_grid[0]
        # unit weighted norm via the isometry int r^(M-3) psi^2 = int u^2
        assert np.trapezoid(p.u_samples ** 2, dx=h) == pytest.approx(
            1.0, rel=1e-8)
        # positive in the nodal zone touching the boundary
        assert p.u_samples[1] > 0
    assert spec.eigenpairs[0].boundary_slope < 0


def test_node_counting_synthetic():
    r = np.linspace(0, 1, 500)
    pair = type("P", (), {})()
    vals = np.cos(3.5 * math.pi * r)  # 3 interior sign changes in (0,1)
    from henonmorse.spectral import count_interior_nodes_sampled
    assert count_interior_nodes_sampled(vals[1:-1], 1e-8) == 3
    assert count_interior_nodes_sampled(np.ones(100), 1e-8) == 0


def test_rayleigh_quotient_eigen_consistency(lane_emden_case):
    _, prob, spec = lane_emden_case
    for p in spec.eigenpairs[:2]:
        q = rayleigh_quotient(p, prob)
        assert q == pytest.approx(p.value, rel=1e-6)


def test_rayleigh_quotient_symbolic_cases():
    # w = 1 - r^2, a = 0, M = 3, standard weight:
    #   num = int r^2 (2r)^2 = 4/5, den = int r^2 (1-r^2)^2 = 8/105
    #   quotient = 21/2
    prob = WeightedSLProblem(M=3.0, a=zero_potential, kind="standard")
    r = np.linspace(0, 1, 20001)
    q = rayleigh_quotient((r, 1 - r ** 2), prob)
    assert q == pytest.approx(10.5, rel=1e-6)
    # w = 1 - r: num = int r^2 = 1/3, den = int r^2(1-r)^2 = 1/30
    q2 = rayleigh_quotient((r, 1 - r, -np.ones_like(r)), prob)
    assert q2 == pytest.approx(10.0, rel=1e-6)


def test_rayleigh_quotient_variational_bound(lane_emden_case):
    _, prob, spec = lane_emden_case
    probN = WeightedSLProblem(M=3.0, a=prob.a, kind="standard")
    nu1 = solve_standard_spectrum(probN, 1).values[0]
    rng = np.random.default_rng(8)
    r = np.linspace(0, 1, 4001)
    for _ in range(10):
        w = np.polyval(rng.normal(size=4), r) * (1 - r)
        assert rayleigh_quotient((r, w), probN) >= nu1 - 1e-6 * abs(nu1)


def test_decay_exponent_formula_cases():
    assert theta_analytic(-4.0, 2.0) == pytest.approx(2.0)   # sqrt(-nu)
    assert theta_analytic(-1e-12, 4.0) == pytest.approx(0.0, abs=1e-12)
    assert theta_analytic(-2.0, 3.0) == pytest.approx(1.0)


def test_decay_exponent_fit(lane_emden_case):
    _, _, spec = lane_emden_case
    p1 = spec.eigenpairs[0]
    fit = fit_decay_exponent(p1, 3.0)
    assert abs(fit.theta_fit - fit.theta_analytic) / fit.theta_analytic < 0.02
    # explicit window deep in the tail
    fit2 = fit_decay_exponent(p1, 3.0, window=(1e-4, 1e-2))
    assert abs(fit2.theta_fit - fit2.theta_analytic) \
        / fit2.theta_analytic < 0.02
    # a window containing the first node is rejected
    p2 = spec.eigenpairs[1]
    big = np.abs(p2.samples) > 1e-6 * np.max(np.abs(p2.samples))
    signs = np.sign(p2.samples[big])
    flip = np.nonzero(signs[1:] != signs[:-1])[0][0]
    node_r = p2.grid[big][flip]
    with pytest.raises(ValueError, match="node"):
        fit_decay_exponent(p2, 3.0, window=(node_r * 0.5, min(0.9,
                                                              node_r * 1.5)))


def test_picone_identity_residuals():
    prof = solve_nodal_power(3.0, 3.0, 2)
    prob = WeightedSLProblem(M=3.0, a=linearized_potential(prof),
                             kind="singular")
    res = {}
    for n in (16384, 32768):
        spec = solve_singular_spectrum(prob, 2,
                                       SpectralConfig(n=n, x_max=30.0))
        p1, p2 = spec.eigenpairs
        assert picone_residual(p1, p1, 3.0) < 1e-12
        res[n] = picone_residual(p1, p2, 3.0)
    assert res[32768] < 1e-6
    assert res[32768] < 0.4 * res[16384]      # second-order shrinkage


def test_weighted_orthogonality(lane_emden_case):
    _, _, spec = lane_emden_case
    p1, p2 = spec.eigenpairs[0], spec.eigenpairs[1]
    assert abs(weighted_inner_product(p1, p2)) < 1e-8


def test_grid_too_coarse_raises():
    prof = solve_nodal_power(3.0, 3.0, 2)
    prob = WeightedSLProblem(M=3.0, a=linearized_potential(prof),
                             kind="singular")
    with pytest.raises(SpectralError, match="coarse"):
        solve_singular_spectrum(prob, 2,
                                SpectralConfig(n=256, x_max=40.0, tol=1e-9))


def test_near_threshold_flagged(lane_emden_case):
    _, _, spec = lane_emden_case
    # the third eigenvalue sits within 0.01 of the threshold 0.25: its decay
    # rate cannot be certified inside the x_max cap
    third = spec.eigenpairs[2]
    assert third.value > 0
    assert third.uncertain
    assert not spec.eigenpairs[0].uncertain
