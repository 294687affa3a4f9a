"""Shared fixtures: the (N, alpha, p, m) test matrix is solved once per
session and reused by the acceptance criteria and several unit tests."""

import time

import numpy as np
import pytest

from henonmorse.dimension import generalized_dimension
from henonmorse.radial import linearized_potential, solve_nodal_power
from henonmorse.spectral import (SpectralConfig, WeightedSLProblem,
                                 solve_singular_spectrum,
                                 solve_standard_spectrum)


def matrix_points():
    """All subcritical (N, alpha, p, m) combinations of the test matrix."""
    pts = []
    for N in (2, 3, 5):
        for alpha in (0.0, 1.0, 2.7, 4.0):
            M = 2.0 * (N + alpha) / (2.0 + alpha)
            for p in (2.2, 3.0):
                if M > 2 and p >= (M + 2) / (M - 2):
                    continue
                for m in (1, 2, 3):
                    pts.append((N, alpha, p, m))
    return pts


MATRIX = matrix_points()


@pytest.fixture(scope="session")
def matrix_data():
    """Profiles, singular spectra and standard counts for every matrix point.

    Returns (points dict, wall-clock seconds for the profile+singular part,
    which is what the runtime budget covers).
    """
    data = {}
    t0 = time.time()
    for (N, alpha, p, m) in MATRIX:
        dmap = generalized_dimension(N, alpha)
        prof = solve_nodal_power(dmap.M, p, m)
        a = linearized_potential(prof)
        sing = solve_singular_spectrum(
            WeightedSLProblem(M=dmap.M, a=a, kind="singular"), m + 2,
            SpectralConfig())
        data[(N, alpha, p, m)] = {
            "dmap": dmap, "profile": prof, "potential": a, "singular": sing,
        }
    elapsed_core = time.time() - t0
    for key, entry in data.items():
        # counts only (k=0): the negative count and the zero band are what
        # the criteria consume from the standard problem
        std = solve_standard_spectrum(
            WeightedSLProblem(M=entry["dmap"].M, a=entry["potential"],
                              kind="standard"), 0, SpectralConfig())
        entry["standard"] = std
    return data, elapsed_core


@pytest.fixture(scope="session")
def reference_case(matrix_data):
    """The (3, 0, 3, 2) point, used by several focused tests."""
    data, _ = matrix_data
    return data[(3, 0.0, 3.0, 2)]


def piecewise_linear_weighted_integrals(r_nodes, w_nodes, M):
    """Exact integrals of a piecewise-linear w over [r0, rK].

    Returns (int r^(M-1) w'^2, int r^(M-1) w^2, int r^(M-3) w^2), each
    segment integrated in closed form so the values carry no quadrature
    error (only rounding).
    """
    r = np.asarray(r_nodes, dtype=float)
    w = np.asarray(w_nodes, dtype=float)

    def power_int(a, b, q):
        # int_a^b r^q dr, exact for the exponents that occur here
        if abs(q + 1.0) < 1e-14:
            return np.log(b / a)
        return (b ** (q + 1) - a ** (q + 1)) / (q + 1)

    grad2 = 0.0
    mass_std = 0.0
    mass_sing = 0.0
    for i in range(len(r) - 1):
        a, b = r[i], r[i + 1]
        slope = (w[i + 1] - w[i]) / (b - a)
        const = w[i] - slope * a
        grad2 += slope * slope * power_int(a, b, M - 1.0)
        # w^2 = const^2 + 2 const slope r + slope^2 r^2 against r^q
        for q, acc in ((M - 1.0, "std"), (M - 3.0, "sing")):
            if a == 0.0 and q <= -1.0:
                total = np.inf if const != 0 else \
                    2 * const * slope * power_int(a, b, q + 1.0) \
                    + slope * slope * power_int(a, b, q + 2.0)
            else:
                total = (const * const * power_int(a, b, q)
                         + 2 * const * slope * power_int(a, b, q + 1.0)
                         + slope * slope * power_int(a, b, q + 2.0))
            if acc == "std":
                mass_std += total
            else:
                mass_sing += total
    return grad2, mass_std, mass_sing


def random_piecewise_linear(rng, n_segments=6, r_min=0.0):
    """A random piecewise-linear trial function vanishing at r=1."""
    interior = np.sort(rng.uniform(max(r_min, 0.02), 0.98,
                                   size=n_segments - 1))
    r = np.concatenate(([r_min], interior, [1.0]))
    w = rng.uniform(-1.0, 1.0, size=len(r))
    w[-1] = 0.0
    return r, w
