"""Weighted Sturm-Liouville eigensolvers on the unit interval.

Two problems share the operator -(r^(M-1) psi')' - r^(M-1) a(r) psi:

* standard kind: eigenvalue weight r^(M-1), natural condition at r=0,
  solved by a finite-volume discretization on [0, 1];
* singular kind: eigenvalue weight r^(M-3), eigenvalues only below the
  Hardy threshold ((M-2)/2)^2, solved through the exact change of variables
  x = -ln r, u = r^((M-2)/2) psi, which turns the quotient isometrically
  into a half-line Schrodinger problem -u'' + V u = nu u with
  V(x) = ((M-2)/2)^2 - e^(-2x) a(e^(-x)).

Both reduce to symmetric tridiagonal matrices handled by Sturm bisection
(kernels module); eigenvalues carry Richardson error bars from a coarse/fine
grid pair.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from ._kernels import bisect_eigenvalues, inverse_iteration, sturm_count


class SpectralError(RuntimeError):
    """Discretization could not certify the requested accuracy."""


@dataclass(frozen=True)
class WeightedSLProblem:
    """Operator data: dimension parameter M, bounded potential a on (0, 1],
    and the eigenvalue-weight kind ("standard" or "singular")."""

    M: float
    a: Callable
    kind: str

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("M must be >= 2")
        if self.kind not in ("standard", "singular"):
            raise ValueError("kind must be 'standard' or 'singular'")

    @property
    def threshold(self) -> float:
        """Hardy ceiling for the singular kind; +inf for the standard kind."""
        if self.kind == "singular":
            return ((self.M - 2.0) / 2.0) ** 2
        return math.inf


def zero_potential(r):
    return np.zeros_like(np.asarray(r, dtype=float))


def potential_from_samples(r_samples, a_samples) -> Callable:
    """Linear interpolant of sampled a(r), extended by its edge values.

    Below the smallest sample the potential continues with that sample's
    value (the linearized potentials of interest tend to a constant at 0).
    """
    rs = np.asarray(r_samples, dtype=float)
    av = np.asarray(a_samples, dtype=float)

    def a(r):
        return np.interp(np.asarray(r, dtype=float), rs, av,
                         left=av[0], right=av[-1])

    return a


@dataclass(frozen=True)
class SpectralConfig:
    n: int = 4096                 # fine grid; the coarse grid is n // 2
    n_cap: int = 1 << 19
    x_max: float | None = None    # None selects the adaptive policy
    x_max_cap: float = 60.0
    kappa_x_target: float = 30.0  # aim sqrt(threshold - nu) * X >= this
    certify_kappa_x: float = 12.0  # below this the pair is flagged uncertain
    margin: float = 1e-6          # near-threshold exclusion band
    tol: float = 5e-4             # max relative Richardson error bar
    node_tol: float = 1e-8
    zero_cut: float = 1e-7        # |value| below this counts as zero
    eig_tol: float = 1e-13


@dataclass(frozen=True)
class EigenPair:
    value: float
    error_bar: float
    grid: np.ndarray              # r, ascending
    samples: np.ndarray           # psi(r), unit norm in the problem's weight
    derivative: np.ndarray        # psi'(r)
    interior_nodes: int
    boundary_slope: float         # psi'(1)
    decay_exponent: float | None  # fitted theta, singular negative pairs
    theta_analytic: float | None
    uncertain: bool = False
    x_grid: np.ndarray | None = None   # Liouville nodes, when applicable
    u_samples: np.ndarray | None = None


@dataclass(frozen=True)
class Spectrum:
    kind: str
    M: float
    threshold: float
    eigenpairs: tuple
    exhausted_below: float
    negative_count: int
    meta: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.eigenpairs])


# ---------------------------------------------------------------------------
# Liouville-transform path (singular kind)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiouvilleProblem:
    """Uniform Dirichlet discretization of -u'' + V u = nu u on (0, X)."""

    x: np.ndarray          # all nodes 0..n
    V: np.ndarray          # potential at all nodes
    h: float
    threshold: float

    def tridiagonal(self):
        """(diag, off) over the interior nodes."""
        d = 2.0 / self.h ** 2 + self.V[1:-1]
        e = np.full(len(d) - 1, -1.0 / self.h ** 2)
        return d, e


def liouville_transform(prob: WeightedSLProblem, x_max: float,
                        n: int = 4096) -> LiouvilleProblem:
    """Discretize the singular problem in x = -ln r.

    The transform u(x) = r^((M-2)/2) psi(r) maps the singular Rayleigh
    quotient isometrically onto the half-line form, with
    V(x) = threshold - e^(-2x) a(e^(-x)); the artificial Dirichlet wall at
    x_max is admissible because sub-threshold eigenfunctions decay like
    exp(-sqrt(threshold - nu) x).
    """
    if prob.kind != "singular":
        raise ValueError("liouville_transform applies to the singular kind")
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    x = np.linspace(0.0, x_max, n + 1)
    r = np.exp(-x)
    a_vals = np.asarray(prob.a(r), dtype=float)
    if not np.all(np.isfinite(a_vals)):
        raise SpectralError("potential not evaluable on the Liouville grid")
    V = prob.threshold - r * r * a_vals
    return LiouvilleProblem(x=x, V=V, h=x_max / n, threshold=prob.threshold)


def _auto_x_max(prob: WeightedSLProblem, cfg: SpectralConfig) -> float:
    """Pick X so the potential has flattened and target decay is reached."""
    cap = cfg.x_max_cap
    xs = np.linspace(0.0, cap, 4097)
    w = np.exp(-2 * xs) * np.abs(prob.a(np.exp(-xs)))
    tol = 1e-10 * max(1.0, prob.threshold)
    above = np.nonzero(w > tol)[0]
    x_flat = xs[above[-1]] if len(above) else 0.0
    x0 = min(cap, max(20.0, x_flat + 8.0))

    grid = liouville_transform(prob, x0, 1024)
    d, e = grid.tridiagonal()
    hi = prob.threshold - cfg.margin
    count = sturm_count(d, e, hi)
    if count == 0:
        return x0
    lo = float(np.min(grid.V)) - 1.0
    vals = bisect_eigenvalues(d, e, lo, hi, 1, count, 1e-8, 1e-10)
    kappa_min = math.sqrt(max(prob.threshold - vals[-1], 1e-30))
    return min(cap, max(x0, cfg.kappa_x_target / kappa_min))


def _resolution(n_cfg: int, x_max: float, v_min: float, threshold: float,
                n_cap: int):
    """Grid size large enough to resolve the fastest local oscillation."""
    k_osc = math.sqrt(max(threshold - v_min, 1.0))
    n_req = 2.0 * x_max * k_osc
    n = n_cfg
    while n < min(n_req, n_cap):
        n *= 2
    return min(n, n_cap), n_req > n_cap


def _eigenvector_pair(d, e, lam):
    vec = inverse_iteration(d, e, lam, 3)
    t = np.empty_like(vec)
    t[:] = d * vec
    t[:-1] += e * vec[1:]
    t[1:] += e * vec[:-1]
    res = float(np.linalg.norm(t - lam * vec))
    return vec, res


def count_interior_nodes_sampled(vals: np.ndarray, tol_frac: float) -> int:
    """Sign changes of a sampled function, ignoring sub-tolerance samples."""
    cut = tol_frac * float(np.max(np.abs(vals)))
    big = np.abs(vals) > cut
    signs = np.sign(vals[big])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def count_interior_nodes(pair: EigenPair) -> int:
    """Nodes of the eigenfunction strictly inside (0, 1).

    Counted on the Liouville samples when present: u and psi share their
    sign pattern, but u stays bounded while psi may grow toward the origin
    for eigenvalues above 0, which would starve a relative node tolerance.
    """
    if pair.u_samples is not None:
        return count_interior_nodes_sampled(pair.u_samples[1:-1], 1e-8)
    inner = (pair.grid > 0.0) & (pair.grid < 1.0)
    return count_interior_nodes_sampled(pair.samples[inner], 1e-8)


def solve_singular_spectrum(prob: WeightedSLProblem, k: int,
                            cfg: SpectralConfig = SpectralConfig()
                            ) -> Spectrum:
    """Up to k eigenvalues below threshold - margin, with eigenfunctions.

    Sturm bisection on the Liouville tridiagonal at two resolutions gives
    Richardson-extrapolated values and error bars; disagreement beyond
    cfg.tol raises SpectralError.  Pairs whose decay rate cannot satisfy
    sqrt(threshold - nu) * X >= cfg.certify_kappa_x within the x_max cap are
    flagged uncertain (truncation-limited accuracy near the threshold).
    """
    if prob.kind != "singular":
        raise ValueError("solve_singular_spectrum needs the singular kind")
    x_max = cfg.x_max if cfg.x_max is not None else _auto_x_max(prob, cfg)
    thr = prob.threshold
    hi = thr - cfg.margin

    probe = liouville_transform(prob, x_max, 2048)
    n, capped = _resolution(cfg.n, x_max, float(np.min(probe.V)), thr,
                            cfg.n_cap)

    grids = {}
    for nn in (n // 2, n):
        g = liouville_transform(prob, x_max, nn)
        d, e = g.tridiagonal()
        cnt = sturm_count(d, e, hi)
        lo = float(np.min(g.V)) - 1.0
        vals = (bisect_eigenvalues(d, e, lo, hi, 1, min(cnt, max(k, 0)),
                                   cfg.eig_tol, 1e-300)
                if cnt and k else np.empty(0))
        grids[nn] = (g, d, e, cnt, vals)

    g_f, d_f, e_f, count_f, vals_f = grids[n]
    _, _, _, _, vals_c = grids[n // 2]
    n_found = len(vals_f)
    n_common = min(n_found, len(vals_c))
    values = vals_f.copy()
    bars = np.full(n_found, np.inf)
    values[:n_common] = (4 * vals_f[:n_common] - vals_c[:n_common]) / 3
    bars[:n_common] = np.abs(vals_f[:n_common] - vals_c[:n_common]) / 3
    bad = bars > cfg.tol * np.maximum(1.0, np.abs(values))
    if np.any(bad):
        raise SpectralError(
            f"grid too coarse: Richardson bar {bars[bad][0]:.3e} on "
            f"eigenvalue {values[bad][0]:.6g} (n={n}, x_max={x_max:.3g})")
    _assert_simple(values, cfg)

    zero_cut_count = sturm_count(d_f, e_f, -cfg.zero_cut)
    zero_band = sturm_count(d_f, e_f, cfg.zero_cut) - zero_cut_count
    pairs = []
    h = g_f.h
    x = g_f.x
    r_desc = np.exp(-x)
    a_half = (prob.M - 2.0) / 2.0
    for i in range(n_found):
        vec, _res = _eigenvector_pair(d_f, e_f, vals_f[i])
        u = np.zeros(len(x))
        u[1:-1] = vec
        if u[1] < 0:
            u = -u
        u /= math.sqrt(simpson(u * u, dx=h))
        du = np.gradient(u, h, edge_order=2)
        psi = u * np.exp(a_half * x)
        dpsi = -np.exp(0.5 * prob.M * x) * (a_half * u + du)
        kappa = math.sqrt(max(thr - values[i], 0.0))
        uncertain = kappa * x_max < cfg.certify_kappa_x
        theta_fit = None
        theta_an = None
        if values[i] < 0:
            theta_an = theta_analytic(values[i], prob.M)
            theta_fit = _fit_decay(x, u, a_half, None)
        nodes = count_interior_nodes_sampled(u[1:-1], cfg.node_tol)
        pairs.append(EigenPair(
            value=float(values[i]), error_bar=float(bars[i]),
            grid=r_desc[::-1].copy(), samples=psi[::-1].copy(),
            derivative=dpsi[::-1].copy(), interior_nodes=nodes,
            boundary_slope=float(dpsi[0]), decay_exponent=theta_fit,
            theta_analytic=theta_an, uncertain=bool(uncertain),
            x_grid=x.copy(), u_samples=u.copy()))

    if count_f > n_found:
        nxt = bisect_eigenvalues(d_f, e_f, vals_f[-1] if n_found else
                                 float(np.min(g_f.V)) - 1.0, hi,
                                 n_found + 1, n_found + 1, cfg.eig_tol,
                                 1e-300)
        exhausted = float(nxt[0])
    else:
        exhausted = hi
    meta = {"n": n, "x_max": float(x_max), "count_below_margin": int(count_f),
            "resolution_capped": bool(capped),
            "zero_band_count": int(zero_band)}
    return Spectrum(kind="singular", M=prob.M, threshold=thr,
                    eigenpairs=tuple(pairs), exhausted_below=exhausted,
                    negative_count=int(zero_cut_count), meta=meta)


# ---------------------------------------------------------------------------
# finite-volume path (standard kind)
# ---------------------------------------------------------------------------

def _standard_tridiag(prob: WeightedSLProblem, n: int):
    """Symmetric form of the FV pencil on the uniform grid with n cells.

    Exact cell masses of r^(M-1) keep the scheme well behaved at r=0, where
    the natural (zero-flux) closure encodes psi'(0)=0.
    """
    M = prob.M
    r = np.linspace(0.0, 1.0, n + 1)
    rm = 0.5 * (r[:-1] + r[1:])
    k = rm ** (M - 1.0) / np.diff(r)
    edges = np.concatenate(([0.0], rm, [1.0]))
    mass = (edges[1:] ** M - edges[:-1] ** M) / M
    diag = np.empty(n)
    diag[0] = k[0]
    diag[1:] = k[:-1] + k[1:]
    off = -k[:-1]
    m_u = mass[:n]
    a_vals = np.asarray(prob.a(np.maximum(r[:n], 1e-300)), dtype=float)
    diag = diag - a_vals * m_u
    s = 1.0 / np.sqrt(m_u)
    return r, m_u, s, diag * s * s, off * s[:-1] * s[1:]


def solve_standard_spectrum(prob: WeightedSLProblem, k: int,
                            cfg: SpectralConfig = SpectralConfig()
                            ) -> Spectrum:
    """First k eigenvalues of the standard-weight problem.

    Self-adjoint three-point discretization with half-cell natural closure at
    r=0 and Dirichlet at r=1, reduced to a symmetric tridiagonal matrix by
    the diagonal weight; Sturm bisection plus Richardson as in the singular
    path.  The grid is refined automatically until the deepest potential well
    is resolved.
    """
    if prob.kind != "standard":
        raise ValueError("solve_standard_spectrum needs the standard kind")
    rs = np.linspace(1e-9, 1.0, 4097)
    amax = float(np.max(np.abs(prob.a(rs))))
    n_req = 16.0 * math.sqrt(amax + 1.0)
    n = cfg.n
    while n < min(n_req, cfg.n_cap):
        n *= 2
    capped = n_req > cfg.n_cap

    data = {}
    grids = (n,) if k == 0 else (n // 2, n)
    for nn in grids:
        r, m_u, s, d, e = _standard_tridiag(prob, nn)
        gmin = float(np.min(d - np.abs(np.concatenate((e, [0.0]))))
                     - np.max(np.abs(np.concatenate(([0.0], e)))))
        gmax = float(np.max(d + np.abs(np.concatenate((e, [0.0]))))
                     + np.max(np.abs(np.concatenate(([0.0], e)))))
        vals = (bisect_eigenvalues(d, e, gmin, gmax, 1, k, cfg.eig_tol,
                                   1e-300) if k else np.empty(0))
        data[nn] = (r, m_u, s, d, e, vals)

    r_f, m_f, s_f, d_f, e_f, vals_f = data[n]
    if k == 0:
        values = vals_f
        bars = np.empty(0)
    else:
        vals_c = data[n // 2][5]
        values = (4 * vals_f - vals_c) / 3
        bars = np.abs(vals_f - vals_c) / 3
        bad = bars > cfg.tol * np.maximum(1.0, np.abs(values))
        if np.any(bad):
            raise SpectralError(
                f"grid too coarse: Richardson bar {bars[bad][0]:.3e} on "
                f"standard eigenvalue {values[bad][0]:.6g} (n={n})")
        _assert_simple(values, cfg)

    negative_count = sturm_count(d_f, e_f, -cfg.zero_cut)
    zero_band = sturm_count(d_f, e_f, cfg.zero_cut) - negative_count
    pairs = []
    for i in range(len(values)):
        vec, _res = _eigenvector_pair(d_f, e_f, vals_f[i])
        psi_in = vec * s_f                      # generalized eigenvector
        psi = np.concatenate((psi_in, [0.0]))   # append Dirichlet node r=1
        if psi_in[-1] != 0 and psi_in[-1] < 0:
            psi = -psi
        nrm = math.sqrt(float(np.dot(psi[:-1] ** 2, m_f)))
        psi /= nrm
        dpsi = np.gradient(psi, r_f, edge_order=2)
        nodes = count_interior_nodes_sampled(psi[:-1], cfg.node_tol)
        pairs.append(EigenPair(
            value=float(values[i]), error_bar=float(bars[i]), grid=r_f.copy(),
            samples=psi, derivative=dpsi, interior_nodes=nodes,
            boundary_slope=float(dpsi[-1]), decay_exponent=None,
            theta_analytic=None, uncertain=False))
    exhausted = float(values[-1]) if len(values) else -math.inf
    meta = {"n": n, "amax": amax, "zero_band_count": int(zero_band),
            "resolution_capped": bool(capped)}
    return Spectrum(kind="standard", M=prob.M, threshold=math.inf,
                    eigenpairs=tuple(pairs), exhausted_below=exhausted,
                    negative_count=int(negative_count), meta=meta)


# ---------------------------------------------------------------------------
# diagnostics on eigenpairs
# ---------------------------------------------------------------------------

def _assert_simple(values, cfg):
    """Every eigenvalue is simple: two bisection results closer than the
    certified gap resolution signal a defective solve, not a pair."""
    for a, b in zip(values[:-1], values[1:]):
        if b - a < 100.0 * (cfg.eig_tol * max(1.0, abs(a)) + 1e-300):
            raise SpectralError(
                f"near-degenerate eigenvalues {a:.12g}, {b:.12g}: below the "
                "gap resolution of the bisection")


def theta_analytic(nu_hat: float, M: float) -> float:
    """Vanishing rate at the origin: psi = O(r^theta) for nu_hat < 0."""
    return (2.0 - M + math.sqrt((M - 2.0) ** 2 - 4.0 * nu_hat)) / 2.0


def _fit_decay(x, u, a_half, window_x):
    """Least-squares slope of ln|psi| against ln r deep in the tail."""
    umax = float(np.max(np.abs(u)))
    if window_x is None:
        mask = (np.abs(u) > 1e-11 * umax) & (np.abs(u) < 1e-4 * umax)
        mask &= x > 2.0
    else:
        mask = (x >= window_x[0]) & (x <= window_x[1]) & (np.abs(u) > 0)
    if np.count_nonzero(mask) < 8:
        return None
    xs = x[mask]
    if np.any(np.sign(u[mask])[1:] != np.sign(u[mask])[:-1]):
        return None
    # ln|psi| = a_half * x + ln|u|; ln r = -x
    ln_psi = a_half * xs + np.log(np.abs(u[mask]))
    slope = np.polyfit(-xs, ln_psi, 1)[0]
    return float(slope)


@dataclass(frozen=True)
class DecayFit:
    theta_fit: float
    theta_analytic: float
    n_points: int
    window: tuple


def fit_decay_exponent(pair: EigenPair, M: float,
                       window=None) -> DecayFit:
    """Fit the vanishing rate of a singular eigenfunction near the origin.

    `window` is (r_lo, r_hi) inside (0, first node); by default a band deep
    in the tail where the samples are clean power laws is selected.
    """
    if pair.value >= 0:
        raise ValueError("decay fit expects a negative singular eigenvalue")
    if pair.x_grid is None:
        raise ValueError("pair carries no Liouville samples")
    x, u = pair.x_grid, pair.u_samples
    a_half = (M - 2.0) / 2.0
    if window is not None:
        r_lo, r_hi = window
        wx = (max(-math.log(r_hi), 0.0), -math.log(r_lo))
        sel = (x >= wx[0]) & (x <= wx[1])
        seg = u[sel]
        signs = np.sign(seg[np.abs(seg) > 0])
        if signs.size and np.any(signs[1:] != signs[:-1]):
            raise ValueError("window contains a node of the eigenfunction")
        theta = _fit_decay(x, u, a_half, wx)
        n_pts = int(np.count_nonzero(sel))
    else:
        theta = _fit_decay(x, u, a_half, None)
        n_pts = 0
    if theta is None:
        raise ValueError("window has too few usable samples for a fit")
    return DecayFit(theta_fit=theta,
                    theta_analytic=theta_analytic(pair.value, M),
                    n_points=n_pts, window=window or ("auto", "auto"))


def picone_residual(pi: EigenPair, pj: EigenPair, M: float) -> float:
    """Normalized defect of the cross-eigenfunction differential identity.

    For exact eigenpairs, r^(M-1)(psi_i' psi_j - psi_i psi_j') integrates the
    weighted product r^(M-3) psi_i psi_j against the eigenvalue gap; in
    Liouville variables that reads W(x) + (nu_j - nu_i) * int_0^x u_i u_j = 0
    with W the plain Wronskian.  Returns the max defect over all subintervals
    scaled by the natural magnitude of the two terms.
    """
    if pi.x_grid is None or pj.x_grid is None:
        raise ValueError("picone residual needs Liouville-sampled pairs")
    if len(pi.x_grid) != len(pj.x_grid) or \
       abs(pi.x_grid[-1] - pj.x_grid[-1]) > 1e-12:
        raise ValueError("pairs come from different grids")
    x = pi.x_grid
    h = x[1] - x[0]
    ui, uj = pi.u_samples, pj.u_samples
    dui = _diff4(ui, h)
    duj = _diff4(uj, h)
    wr = ui * duj - dui * uj
    cum = cumulative_simpson(ui * uj, dx=h, initial=0.0)
    defect = wr + (pj.value - pi.value) * cum
    scale = max(float(np.max(np.abs(ui))) * float(np.max(np.abs(duj)))
                + float(np.max(np.abs(uj))) * float(np.max(np.abs(dui))),
                1e-300)
    return float(np.max(np.abs(defect)) / scale)


def _diff4(y, h):
    """Fourth-order centered first derivative on a uniform grid."""
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) \
        / (12 * h)
    d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h)
    d[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) \
        / (12 * h)
    d[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) \
        / (12 * h)
    return d


def weighted_inner_product(pi: EigenPair, pj: EigenPair) -> float:
    """int_0^1 r^(M-3) psi_i psi_j dr via the Liouville isometry."""
    if pi.x_grid is None or pj.x_grid is None:
        raise ValueError("needs Liouville-sampled pairs")
    h = pi.x_grid[1] - pi.x_grid[0]
    return float(simpson(pi.u_samples * pj.u_samples, dx=h))


def rayleigh_quotient(w, prob: WeightedSLProblem) -> float:
    """Quadratic form over weighted mass for a trial function.

    `w` is an EigenPair or a tuple (r, values[, derivative]) with w(1) = 0.
    Evaluated on the i-th eigenfunction this reproduces the i-th eigenvalue
    up to quadrature accuracy.
    """
    if isinstance(w, EigenPair) and w.x_grid is not None:
        x, u = w.x_grid, w.u_samples
        h = x[1] - x[0]
        a_half = (prob.M - 2.0) / 2.0
        du = _diff4(u, h)
        r = np.exp(-x)
        a_vals = np.asarray(prob.a(r), dtype=float)
        num = simpson((a_half * u + du) ** 2 - r * r * a_vals * u * u, dx=h)
        if prob.kind == "singular":
            den = simpson(u * u, dx=h)
        else:
            den = simpson(r * r * u * u, dx=h)
        return float(num / den)
    if isinstance(w, EigenPair):
        r, vals, dvals = w.grid, w.samples, w.derivative
    else:
        r = np.asarray(w[0], dtype=float)
        vals = np.asarray(w[1], dtype=float)
        dvals = np.asarray(w[2], dtype=float) if len(w) > 2 else \
            np.gradient(vals, r, edge_order=2)
    if abs(vals[-1]) > 1e-9 * float(np.max(np.abs(vals))):
        raise ValueError("trial function must vanish at r = 1")
    M = prob.M
    a_vals = np.asarray(prob.a(np.maximum(r, 1e-300)), dtype=float)
    wgt = r ** (M - 1.0)
    num = np.trapezoid(wgt * (dvals ** 2 - a_vals * vals ** 2), r)
    if prob.kind == "singular":
        den_w = np.where(r > 0, r ** (M - 3.0), 0.0)
    else:
        den_w = wgt
    den = np.trapezoid(den_w * vals ** 2, r)
    if den == 0:
        raise ZeroDivisionError("trial function has zero weighted mass")
    return float(num / den)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def spectrum_to_json(spec: Spectrum, path) -> None:
    doc = {
        "kind": spec.kind,
        "M": spec.M,
        "threshold": None if math.isinf(spec.threshold) else spec.threshold,
        "exhausted_below": None if math.isinf(spec.exhausted_below)
        else spec.exhausted_below,
        "negative_count": spec.negative_count,
        "eigenvalues": [
            {
                "value": p.value,
                "error_bar": p.error_bar,
                "nodes": p.interior_nodes,
                "theta_fit": p.decay_exponent,
                "theta_analytic": p.theta_analytic,
                "uncertain": p.uncertain,
            }
            for p in spec.eigenpairs
        ],
        "meta": {k: v for k, v in spec.meta.items()
                 if isinstance(v, (int, float, bool, str))},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def eigenfunction_to_csv(pair: EigenPair, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "psi"])
        for r, v in zip(pair.grid, pair.samples):
            w.writerow([f"{r:.17g}", f"{v:.17g}"])
