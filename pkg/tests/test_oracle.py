"""Dense r-grid oracle: independence checks against the production solvers."""

import numpy as np
import pytest

from henonmorse.oracle import dense_oracle_spectrum
from henonmorse.radial import linearized_potential, solve_nodal_power
from henonmorse.spectral import (SpectralConfig, WeightedSLProblem,
                                 solve_singular_spectrum, zero_potential)


@pytest.fixture(scope="module")
def case():
    prof = solve_nodal_power(3.0, 3.0, 2)
    prob = WeightedSLProblem(M=3.0, a=linearized_potential(prof),
                             kind="singular")
    return prob


def test_oracle_matches_liouville_solver(case):
    spec = solve_singular_spectrum(case, 2)
    orc = dense_oracle_spectrum(case, n=2000)
    assert orc.negative_count == spec.negative_count == 2
    for sv, ov in zip(spec.values[:2], orc.values[:2]):
        assert abs(sv - ov) / abs(ov) < 1e-4


def test_oracle_nodes_and_normalization(case):
    orc = dense_oracle_spectrum(case, n=2000)
    assert [p.interior_nodes for p in orc.eigenpairs[:2]] == [0, 1]
    p = orc.eigenpairs[0]
    wgt = np.where(p.grid > 0, p.grid ** (3.0 - 3.0), 0.0)
    nrm = np.trapezoid(wgt * p.samples ** 2, p.grid)
    assert nrm == pytest.approx(1.0, rel=1e-3)


def test_oracle_epsilon_convergence(case):
    a = dense_oracle_spectrum(case, n=2000, epsilon_cut=1e-8)
    b = dense_oracle_spectrum(case, n=2000, epsilon_cut=5e-9)
    for i in range(2):
        move = abs(a.values[i] - b.values[i])
        assert move < a.eigenpairs[i].error_bar


def test_oracle_eigenfunction_round_trip(case):
    spec = solve_singular_spectrum(case, 2, SpectralConfig(n=8192))
    orc = dense_oracle_spectrum(case, n=3500)
    for i in range(2):
        pl, po = spec.eigenpairs[i], orc.eigenpairs[i]
        sel = pl.grid >= 1e-4
        f2 = np.interp(pl.grid[sel], po.grid, po.samples)
        f1 = pl.samples[sel] / np.max(np.abs(pl.samples[sel]))
        f2 = f2 / np.max(np.abs(f2))
        if np.dot(f1, f2) < 0:
            f2 = -f2
        assert np.max(np.abs(f1 - f2)) < 1e-4


def test_oracle_standard_bessel():
    prob = WeightedSLProblem(M=2.0, a=zero_potential, kind="standard")
    orc = dense_oracle_spectrum(prob, n=2000, k=1)
    assert orc.values[0] == pytest.approx(2.404825557695773 ** 2, rel=1e-5)


def test_oracle_size_guard():
    prob = WeightedSLProblem(M=3.0, a=zero_potential, kind="singular")
    with pytest.raises(ValueError, match="4000"):
        dense_oracle_spectrum(prob, n=4001)
    with pytest.raises(ValueError, match="epsilon"):
        dense_oracle_spectrum(prob, n=100, epsilon_cut=0.5)
