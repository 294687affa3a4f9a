"""Nodal radial solutions of -(t^(M-1) v')' = c t^(M-1) f(v) on [0, 1].

Power nonlinearities are solved by integrating the initial value problem from
t=0 and exploiting the scaling symmetry v -> gamma^(2/(p-1)) v(gamma t) to
move the m-th zero to 1; generic nonlinearities go through a shooting
bisection on v(0).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .dimension import generalized_dimension


class IntegrationError(RuntimeError):
    """The IVP integrator could not deliver what was asked of it."""


class BracketError(ValueError):
    """A shooting bracket is degenerate or does not straddle the target."""


@dataclass(frozen=True)
class Nonlinearity:
    """Right-hand side f(u), either |u|^(p-1) u or a user-supplied pair."""

    kind: str                       # "power" | "custom"
    p: float | None = None
    f: Callable | None = None
    f_prime: Callable | None = None
    odd: bool = False

    @classmethod
    def power(cls, p: float) -> "Nonlinearity":
        if p <= 1:
            raise ValueError("power exponent must satisfy p > 1")
        return cls(kind="power", p=float(p), odd=True)

    @classmethod
    def custom(cls, f: Callable, f_prime: Callable,
               odd: bool = False) -> "Nonlinearity":
        return cls(kind="custom", f=f, f_prime=f_prime, odd=bool(odd))

    def __call__(self, u):
        if self.kind == "power":
            return np.abs(u) ** (self.p - 1.0) * u
        return self.f(u)

    def derivative(self, u):
        if self.kind == "power":
            return self.p * np.abs(u) ** (self.p - 1.0)
        return self.f_prime(u)

    def tag(self) -> str:
        if self.kind == "power":
            return f"power(p={self.p:.17g})"
        return f"custom(odd={self.odd})"


@dataclass(frozen=True)
class EmdenTrajectory:
    """Raw adaptive-step IVP output with refined zero and critical events."""

    ts: np.ndarray
    vs: np.ndarray
    dvs: np.ndarray
    zeros: np.ndarray
    zero_slopes: np.ndarray
    critical_points: np.ndarray
    critical_values: np.ndarray
    status: int

    @property
    def reached_target(self) -> bool:
        return self.status == _kernels.OK_EVENTS


def integrate_emden_ivp(M: float, nl: Nonlinearity, c: float, v0: float,
                        t_max: float, *, rtol: float = 1e-10,
                        atol: float = 1e-12, zero_tol: float = 1e-12,
                        max_zeros: int = 64,
                        max_steps: int = 600_000) -> EmdenTrajectory:
    """Integrate v'' + (M-1)/t v' + c f(v) = 0 from the regular start at 0.

    v(0)=v0, v'(0)=0, v''(0) = -c f(v0)/M.  Each sign change of v is refined
    to |v| < zero_tol * |v0|; sign changes of v' are refined to critical
    points.  Stops after max_zeros zeros or at t_max.
    """
    if v0 == 0:
        raise ValueError("v0 must be nonzero; v0=0 is the trivial solution")
    if M < 2:
        raise ValueError("M must be >= 2")
    if zero_tol <= 0 or rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")

    if nl.kind == "power":
        out = _kernels.integrate_radial_power(
            float(M), float(c), float(nl.p), float(v0), float(t_max),
            float(rtol), float(atol), int(max_zeros), int(max_steps),
            float(zero_tol))
    else:
        fn = nl.f

        def rhs(t, v, dv, m_dim, c_, p_):
            fv = fn(v)
            if t <= 0.0:
                return -c_ * fv / m_dim
            return -(m_dim - 1.0) / t * dv - c_ * fv

        out = _kernels.integrate_radial_generic(
            rhs, float(M), float(c), 0.0, float(v0), float(t_max),
            float(rtol), float(atol), int(max_zeros), int(max_steps),
            float(zero_tol))
    status, ts, vs, dvs, zt, zdv, ct, cv = out
    if status == _kernels.FAIL_NONFINITE:
        raise IntegrationError("nonlinearity returned a non-finite value")
    if status == _kernels.FAIL_UNDERFLOW:
        raise IntegrationError(
            "step size underflow (stiff or blow-up region reached)")
    return EmdenTrajectory(ts=ts, vs=vs, dvs=dvs, zeros=zt, zero_slopes=zdv,
                           critical_points=ct, critical_values=cv,
                           status=status)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """A validated nodal radial solution sampled on its solver grid.

    `grid` carries the integrator's accepted steps mapped onto [0, 1];
    `evaluate` interpolates between them with the stored derivative (cubic
    Hermite), which keeps interpolation error at the integrator's own order.
    """

    variable: str                   # "emden" | "physical"
    M: float
    grid: np.ndarray
    values: np.ndarray
    derivative: np.ndarray
    zeros: np.ndarray
    critical_points: np.ndarray
    extremal_values: np.ndarray
    nodal_zones: int
    nonlinearity: Nonlinearity
    coupling: float
    meta: dict = field(default_factory=dict)

    def evaluate(self, t):
        return _hermite(self.grid, self.values, self.derivative,
                        np.asarray(t, dtype=float))

    def evaluate_derivative(self, t):
        return _hermite(self.grid, self.values, self.derivative,
                        np.asarray(t, dtype=float), derivative=True)


def _hermite(x, y, dy, q, derivative=False):
    """Vectorized cubic Hermite interpolation on a strictly increasing grid."""
    scalar = q.ndim == 0
    qf = np.atleast_1d(q)
    idx = np.clip(np.searchsorted(x, qf, side="right") - 1, 0, len(x) - 2)
    h = x[idx + 1] - x[idx]
    s = (qf - x[idx]) / h
    y0, y1 = y[idx], y[idx + 1]
    d0, d1 = dy[idx], dy[idx + 1]
    if derivative:
        g00 = 6 * s * s - 6 * s
        g10 = 3 * s * s - 4 * s + 1
        g01 = -6 * s * s + 6 * s
        g11 = 3 * s * s - 2 * s
        out = g00 * y0 / h + g10 * d0 + g01 * y1 / h + g11 * d1
    else:
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        out = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    return out[0] if scalar else out


def _count_sign_changes(vals, tol):
    """Sign changes in a sampled sequence, ignoring sub-tolerance samples."""
    big = np.abs(vals) > tol
    signs = np.sign(vals[big])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def solve_nodal_power(M: float, p: float, m: int, *, rtol: float = 1e-10,
                      atol: float = 1e-12, zero_tol: float = 1e-12,
                      t_max: float = 1e10,
                      max_steps: int = 600_000) -> RadialProfile:
    """Radial solution with exactly m nodal zones for f(u) = |u|^(p-1) u.

    Integrates the IVP with v(0)=1 to its m-th zero T_m and rescales by the
    symmetry v -> T_m^(2/(p-1)) v(T_m t).  For M > 2 the subcritical range is
    p < (M+2)/(M-2); outside it the solver still runs and sets the
    `supercritical` flag in meta.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if p <= 1:
        raise ValueError("p must be > 1")
    supercritical = bool(M > 2 and p >= (M + 2) / (M - 2))
    traj = integrate_emden_ivp(M, Nonlinearity.power(p), 1.0, 1.0, t_max,
                               rtol=rtol, atol=atol, zero_tol=zero_tol,
                               max_zeros=m, max_steps=max_steps)
    if not traj.reached_target:
        raise IntegrationError(
            f"zero #{m} not found before t_max={t_max:g} "
            f"(p may be too close to or beyond the critical range "
            f"at this budget)")
    t_m = traj.zeros[m - 1]
    beta = 2.0 / (p - 1.0)
    amp = t_m ** beta
    grid = traj.ts / t_m
    values = amp * traj.vs
    derivative = amp * t_m * traj.dvs
    grid[-1] = 1.0
    values[-1] = 0.0
    zeros = traj.zeros / t_m
    zeros[-1] = 1.0
    crits = traj.critical_points / t_m
    extremal = np.concatenate(([values[0]],
                               np.abs(amp * traj.critical_values)))
    meta = {"raw_final_zero": float(t_m), "p": float(p), "rtol": rtol,
            "atol": atol, "zero_tol": zero_tol,
            "supercritical": supercritical}
    return RadialProfile(variable="emden", M=float(M), grid=grid,
                         values=values, derivative=derivative, zeros=zeros,
                         critical_points=crits[:m - 1] if len(crits) >= m - 1
                         else crits,
                         extremal_values=extremal[:m],
                         nodal_zones=m, nonlinearity=Nonlinearity.power(p),
                         coupling=1.0, meta=meta)


def _interior_zero_count(M, nl, c, d, rtol, atol, max_steps):
    """Zeros of the IVP solution with v(0)=d inside (0, 1)."""
    traj = integrate_emden_ivp(M, nl, c, d, 1.0, rtol=rtol, atol=atol,
                               max_zeros=64, max_steps=max_steps)
    return int(np.count_nonzero(traj.zeros < 1.0 - 1e-13)), traj


def solve_nodal_shooting(M: float, nl: Nonlinearity, c: float, m: int,
                         bracket=None, *, tol: float = 1e-10,
                         rtol: float = 1e-11, atol: float = 1e-13,
                         max_steps: int = 400_000) -> RadialProfile:
    """Nodal solution for a generic nonlinearity by bisection on v(0).

    Finds d with the m-th zero of the IVP solution sitting at t=1, i.e.
    m-1 interior zeros and |v(1)| < tol * d.  Zero-count monotonicity in d is
    assumed, not proven; when a bisection midpoint contradicts it the bracket
    is reported through BracketError instead of being silently accepted.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if bracket is not None:
        d_lo, d_hi = float(bracket[0]), float(bracket[1])
        if d_lo == d_hi:
            raise BracketError("empty bracket")
        k_lo, _ = _interior_zero_count(M, nl, c, d_lo, rtol, atol, max_steps)
        k_hi, _ = _interior_zero_count(M, nl, c, d_hi, rtol, atol, max_steps)
        if k_lo > k_hi:
            d_lo, d_hi, k_lo, k_hi = d_hi, d_lo, k_hi, k_lo
        if not (k_lo <= m - 1 and k_hi >= m):
            raise BracketError(
                f"bracket zero counts ({k_lo}, {k_hi}) do not straddle m={m}")
    else:
        d_lo = d_hi = 1.0
        k_lo = k_hi = _interior_zero_count(M, nl, c, 1.0, rtol, atol,
                                           max_steps)[0]
        growth = 0
        while k_hi < m:
            d_hi *= 2.0
            growth += 1
            if growth > 60:
                raise BracketError("no upper bracket below 2^60")
            k_hi, _ = _interior_zero_count(M, nl, c, d_hi, rtol, atol,
                                           max_steps)
        growth = 0
        while k_lo > m - 1:
            d_lo /= 2.0
            growth += 1
            if growth > 60:
                raise BracketError("no lower bracket above 2^-60")
            k_lo, _ = _interior_zero_count(M, nl, c, d_lo, rtol, atol,
                                           max_steps)

    traj_final = None
    d = d_hi
    for _ in range(200):
        d = 0.5 * (d_lo + d_hi)
        k_mid, traj = _interior_zero_count(M, nl, c, d, rtol, atol, max_steps)
        if not (k_lo <= k_mid <= k_hi):
            raise BracketError(
                f"zero count non-monotone in the bracket: "
                f"count({d:g})={k_mid} outside [{k_lo}, {k_hi}]")
        if k_mid >= m:
            d_hi = d
        else:
            d_lo = d
            traj_final = (d, traj)
        if (d_hi - d_lo) < 1e-15 * max(1.0, abs(d)):
            break
    if traj_final is None:
        k_mid, traj = _interior_zero_count(M, nl, c, d_lo, rtol, atol,
                                           max_steps)
        if k_mid != m - 1:
            raise BracketError("bisection failed to settle on a shooting "
                               "value with m-1 interior zeros")
        traj_final = (d_lo, traj)
    d, traj = traj_final

    # solution with m-1 interior zeros; residual at the boundary measures
    # how far the m-th zero is from t=1
    res = abs(traj.vs[-1])
    if res > tol * abs(d):
        raise IntegrationError(
            f"shooting residual |v(1)|={res:.3e} above tol*d={tol * abs(d):.3e}")
    grid = traj.ts.copy()
    values = traj.vs.copy()
    derivative = traj.dvs.copy()
    grid[-1] = 1.0
    values[-1] = 0.0
    interior = traj.zeros[traj.zeros < 1.0 - 1e-12]
    zeros = np.concatenate((interior[:m - 1], [1.0]))
    crits = traj.critical_points
    extremal = np.concatenate(([values[0]], np.abs(traj.critical_values)))
    meta = {"shoot_value": float(d), "residual": float(res), "rtol": rtol,
            "atol": atol}
    return RadialProfile(variable="emden", M=float(M), grid=grid,
                         values=values, derivative=derivative, zeros=zeros,
                         critical_points=crits[:m - 1] if len(crits) >= m - 1
                         else crits,
                         extremal_values=extremal[:m], nodal_zones=m,
                         nonlinearity=nl, coupling=float(c), meta=meta)


def henon_profile(N: int, alpha: float, p: float, m: int,
                  **solver_kwargs) -> RadialProfile:
    """Nodal radial solution of -laplace(u) = |x|^alpha |u|^(p-1) u in the
    unit ball, pulled back from the transformed profile.

    With s = (2+alpha)/2 and v the M(N, alpha)-dimensional power profile,
    u(r) = s^(2/(p-1)) v(r^s); zeros pull back as r_i = t_i^(1/s).
    """
    dmap = generalized_dimension(N, alpha)
    base = solve_nodal_power(dmap.M, p, m, **solver_kwargs)
    s = dmap.exponent
    amp = s ** (2.0 / (p - 1.0))
    grid_r = base.grid ** (1.0 / s)
    values_u = amp * base.values
    # u'(r) = amp * v'(t) * s * r^(s-1); r=0 stays 0 for alpha > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        rpow = np.where(grid_r > 0, grid_r ** (s - 1.0), 0.0 if s > 1 else 1.0)
    derivative_u = amp * s * base.derivative * rpow
    if s == 1.0:
        derivative_u[0] = amp * base.derivative[0]
    meta = dict(base.meta)
    meta.update({"N": int(N), "alpha": float(alpha), "amplitude": float(amp),
                 "emden_M": dmap.M})
    return RadialProfile(variable="physical", M=float(N), grid=grid_r,
                         values=values_u, derivative=derivative_u,
                         zeros=base.zeros ** (1.0 / s),
                         critical_points=base.critical_points ** (1.0 / s),
                         extremal_values=amp * base.extremal_values,
                         nodal_zones=m, nonlinearity=base.nonlinearity,
                         coupling=1.0, meta=meta)


# ---------------------------------------------------------------------------
# qualitative validation
# ---------------------------------------------------------------------------

@dataclass
class QualitativeReport:
    zero_count_ok: bool
    boundary_zero_ok: bool
    positive_at_origin: bool
    sign_alternation_ok: bool
    first_zone_decreasing: bool
    critical_points_ok: bool
    extremal_chain_ok: bool
    extremal_chain_enforced: bool
    structure_enforced: bool
    initial_slope: float
    initial_slope_ok: bool
    messages: list

    @property
    def passed(self) -> bool:
        hard = (self.zero_count_ok and self.boundary_zero_ok
                and self.positive_at_origin and self.sign_alternation_ok
                and self.initial_slope_ok)
        if self.structure_enforced:
            hard = hard and self.first_zone_decreasing \
                and self.critical_points_ok
            if self.extremal_chain_enforced:
                hard = hard and self.extremal_chain_ok
        return hard


def validate_profile(prof: RadialProfile, *, tol: float = 1e-7,
                     assume_positive_ratio: bool | None = None
                     ) -> QualitativeReport:
    """Check the qualitative structure a nodal solution must carry.

    Monotonicity of the first zone, one-critical-point-per-zone and the
    extremal chains hold when f(u)/u > 0 off zero; that is automatic for
    powers but not checkable for user nonlinearities, so for those the
    structural checks only warn unless `assume_positive_ratio` is set.
    """
    msgs = []
    m = prof.nodal_zones
    scale = float(np.max(np.abs(prof.values)))
    if assume_positive_ratio is None:
        assume_positive_ratio = prof.nonlinearity.kind == "power"
    if not assume_positive_ratio:
        msgs.append("f(u)/u > 0 not assumed: structural checks are "
                    "advisory only")

    zero_count_ok = len(prof.zeros) == m
    boundary_zero_ok = bool(abs(prof.zeros[-1] - 1.0) < 1e-12
                            and abs(prof.evaluate(1.0)) < tol * scale)
    positive_at_origin = prof.values[0] > 0
    if not zero_count_ok:
        msgs.append(f"expected {m} zeros, recorded {len(prof.zeros)}")

    # sign alternation: every clearly-nonzero sample inside zone i must
    # carry the sign (-1)^i
    bounds = np.concatenate(([0.0], prof.zeros))
    sign_alternation_ok = True
    for i in range(len(bounds) - 1):
        inside = (prof.grid > bounds[i]) & (prof.grid < bounds[i + 1]) \
            & (np.abs(prof.values) > tol * scale)
        if np.any(np.sign(prof.values[inside]) != (-1.0) ** i):
            sign_alternation_ok = False
            msgs.append(f"sign error inside nodal zone {i}")
            break

    inside = (prof.grid > 0) & (prof.grid < prof.zeros[0])
    first_zone_decreasing = bool(
        np.all(prof.derivative[inside] <= tol * scale))
    if not first_zone_decreasing:
        msgs.append("profile is not decreasing in its first nodal zone")

    crit_ok = True
    for i in range(m - 1):
        lo, hi = prof.zeros[i], prof.zeros[i + 1]
        n_in = int(np.count_nonzero((prof.critical_points > lo)
                                    & (prof.critical_points < hi)))
        if n_in != 1:
            crit_ok = False
            msgs.append(f"zone ({lo:.6g}, {hi:.6g}) has {n_in} critical "
                        f"points, expected 1")

    ext = prof.extremal_values
    chain_ok = bool(np.all(np.diff(ext) < 0)) if len(ext) > 1 else True
    enforced = prof.nonlinearity.odd
    if not enforced and len(ext) > 2:
        # without oddness only the same-sign chains are ordered
        chain_ok = (bool(np.all(np.diff(ext[0::2]) < 0))
                    and bool(np.all(np.diff(ext[1::2]) < 0)))
    if not chain_ok:
        msgs.append("extremal values are not ordered as expected")

    slope0 = float(prof.derivative[0])
    slope_ok = abs(slope0) <= tol * max(scale, 1.0)
    if not slope_ok:
        msgs.append(f"initial slope {slope0:.3e} above tolerance")

    return QualitativeReport(
        zero_count_ok=zero_count_ok, boundary_zero_ok=boundary_zero_ok,
        positive_at_origin=bool(positive_at_origin),
        sign_alternation_ok=sign_alternation_ok,
        first_zone_decreasing=first_zone_decreasing,
        critical_points_ok=crit_ok, extremal_chain_ok=chain_ok,
        extremal_chain_enforced=enforced,
        structure_enforced=bool(assume_positive_ratio),
        initial_slope=slope0, initial_slope_ok=slope_ok, messages=msgs)


@dataclass(frozen=True)
class AuxiliaryZ:
    grid: np.ndarray
    values: np.ndarray
    interior_zero_count: int


def auxiliary_z(prof: RadialProfile) -> AuxiliaryZ:
    """z = t v' + 2/(p-1) v on the profile grid, with its interior zero count.

    Only defined for power profiles in the transformed variable; z vanishes
    exactly m times in (0, 1) for an m-nodal solution.
    """
    if prof.nonlinearity.kind != "power":
        raise ValueError("the auxiliary function is defined for power "
                         "nonlinearities only")
    if prof.variable != "emden":
        raise ValueError("auxiliary_z expects a profile in the transformed "
                         "(emden) variable")
    p = prof.nonlinearity.p
    z = prof.grid * prof.derivative + 2.0 / (p - 1.0) * prof.values
    inner = (prof.grid > 0.0) & (prof.grid < 1.0)
    count = _count_sign_changes(z[inner], 1e-12 * float(np.max(np.abs(z))))
    return AuxiliaryZ(grid=prof.grid, values=z, interior_zero_count=count)


def linearized_potential(prof: RadialProfile) -> Callable:
    """Potential a(t) = c f'(v(t)) of the linearization along the profile."""
    nl = prof.nonlinearity
    c = prof.coupling

    def a(t):
        return c * nl.derivative(prof.evaluate(t))

    return a


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def profile_to_csv(prof: RadialProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "v", "v_prime"])
        for t, v, dv in zip(prof.grid, prof.values, prof.derivative):
            w.writerow([f"{t:.17g}", f"{v:.17g}", f"{dv:.17g}"])


def profile_to_json(prof: RadialProfile, path) -> None:
    doc = {
        "variable": prof.variable,
        "M": prof.M,
        "nonlinearity": prof.nonlinearity.tag(),
        "coupling": prof.coupling,
        "nodal_zones": prof.nodal_zones,
        "zeros": [float(z) for z in prof.zeros],
        "critical_points": [float(s) for s in prof.critical_points],
        "extremal_values": [float(v) for v in prof.extremal_values],
        "solver": {k: v for k, v in prof.meta.items()
                   if isinstance(v, (int, float, bool, str))},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
