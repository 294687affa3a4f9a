"""Numerical hot loops: adaptive Runge-Kutta integration and symmetric
tridiagonal eigenvalue machinery.

Kernels are compiled with numba when available.  Setting the environment
variable ``HENONMORSE_NO_NUMBA=1`` (or running without numba installed)
selects the pure NumPy/Python fallback; results are identical either way,
only speed differs.  ``benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENABLED = False
if os.environ.get("HENONMORSE_NO_NUMBA", "0") != "1":
    try:
        from numba import njit as _numba_njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


def njit(*args, **kwargs):
    """numba.njit, or a no-op decorator on the fallback path."""
    if NUMBA_ENABLED:
        return _numba_njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]

    def wrap(fn):
        return fn

    return wrap


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) embedded pair
# ---------------------------------------------------------------------------

_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (9017 / 3168, -355 / 33, 46732 / 5247,
                                49 / 176, -5103 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)

# integrator status codes
OK_EVENTS = 0        # requested number of zeros located
OK_TMAX = 3          # reached t_max without finding them all
FAIL_STEPS = 1       # step budget exhausted
FAIL_UNDERFLOW = 2   # step size underflow (stiff / blow-up)
FAIL_NONFINITE = 4   # right-hand side returned a non-finite value


def emden_rhs_power(t, v, dv, m_dim, c, p):
    """v'' for -(t^(M-1) v')' = c t^(M-1) |v|^(p-1) v; regular limit at t=0."""
    f = abs(v) ** (p - 1.0) * v
    if t <= 0.0:
        return -c * f / m_dim
    return -(m_dim - 1.0) / t * dv - c * f


def make_integrator(rhs, compiled):
    """Build an adaptive integrator around a right-hand side v''=rhs(...).

    `rhs(t, v, dv, m_dim, c, p)` must be a jitted function when `compiled`,
    any callable otherwise.  The returned driver has signature

        integrate(m_dim, c, p, v0, t_max, rtol, atol, max_zeros,
                  max_steps, zero_tol)
        -> (status, ts, vs, dvs, zeros_t, zeros_dv, crits_t, crits_v)

    It records every accepted step, refines each sign change of v to a zero
    of v and each sign change of v' to a critical point, and stops after
    `max_zeros` zeros of v or at t_max.  Event refinement re-takes RK steps
    from the left node with a bisection-safeguarded Newton update, so event
    locations carry the integrator's accuracy, not interpolation accuracy.
    """
    dec = njit(cache=False) if compiled else (lambda f: f)

    @dec
    def rk_step(t, v, dv, h, m_dim, c, p, k1a):
        k1v = dv
        k2v = dv + h * _A21 * k1a
        k2a = rhs(t + _C2 * h, v + h * _A21 * k1v, k2v, m_dim, c, p)
        k3v = dv + h * (_A31 * k1a + _A32 * k2a)
        k3a = rhs(t + _C3 * h, v + h * (_A31 * k1v + _A32 * k2v), k3v,
                  m_dim, c, p)
        k4v = dv + h * (_A41 * k1a + _A42 * k2a + _A43 * k3a)
        k4a = rhs(t + _C4 * h, v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v),
                  k4v, m_dim, c, p)
        k5v = dv + h * (_A51 * k1a + _A52 * k2a + _A53 * k3a + _A54 * k4a)
        k5a = rhs(t + _C5 * h, v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v
                                        + _A54 * k4v), k5v, m_dim, c, p)
        k6v = dv + h * (_A61 * k1a + _A62 * k2a + _A63 * k3a + _A64 * k4a
                        + _A65 * k5a)
        k6a = rhs(t + h, v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v
                                  + _A64 * k4v + _A65 * k5v), k6v, m_dim, c, p)
        vn = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v
                      + _B6 * k6v)
        dvn = dv + h * (_B1 * k1a + _B3 * k3a + _B4 * k4a + _B5 * k5a
                        + _B6 * k6a)
        k7a = rhs(t + h, vn, dvn, m_dim, c, p)
        errv = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v
                    + _E7 * dvn)
        erra = h * (_E1 * k1a + _E3 * k3a + _E4 * k4a + _E5 * k5a + _E6 * k6a
                    + _E7 * k7a)
        return vn, dvn, k7a, errv, erra

    @dec
    def refine_event(t, v, dv, k1a, h, m_dim, c, p, on_derivative, ref_scale,
                     tol):
        g0 = dv if on_derivative else v
        lo = 0.0
        hi = h
        hh = 0.5 * h
        vz = v
        dvz = dv
        for _ in range(80):
            vz, dvz, az, _, _ = rk_step(t, v, dv, hh, m_dim, c, p, k1a)
            g = dvz if on_derivative else vz
            dg = az if on_derivative else dvz
            if abs(g) <= tol * ref_scale:
                break
            if (g > 0.0) == (g0 > 0.0):
                lo = hh
            else:
                hi = hh
            step = hh - g / dg if dg != 0.0 else -1.0
            if step <= lo or step >= hi:
                step = 0.5 * (lo + hi)
            if abs(step - hh) < 1e-17 * h:
                hh = step
                vz, dvz, az, _, _ = rk_step(t, v, dv, hh, m_dim, c, p, k1a)
                break
            hh = step
        return t + hh, vz, dvz

    @dec
    def integrate(m_dim, c, p, v0, t_max, rtol, atol, max_zeros, max_steps,
                  zero_tol):
        ts = np.empty(max_steps)
        vs = np.empty(max_steps)
        dvs = np.empty(max_steps)
        zt = np.empty(max_zeros)
        zdv = np.empty(max_zeros)
        ct = np.empty(max_zeros + 2)
        cv = np.empty(max_zeros + 2)
        vscale = abs(v0)

        t = 0.0
        v = v0
        dv = 0.0
        acc = rhs(0.0, v, dv, m_dim, c, p)
        ts[0] = t
        vs[0] = v
        dvs[0] = dv
        ns = 1
        nz = 0
        nc = 0
        status = OK_TMAX

        h = 1e-4
        if acc != 0.0:
            hs = 0.1 * (2.0 * max(atol, rtol * vscale) / abs(acc)) ** 0.5
            if hs < h:
                h = hs
        while t < t_max:
            if ns >= max_steps:
                status = FAIL_STEPS
                break
            if h < 1e-15 * max(t, 1.0):
                status = FAIL_UNDERFLOW
                break
            if t + h > t_max:
                h = t_max - t
            vn, dvn, accn, errv, erra = rk_step(t, v, dv, h, m_dim, c, p, acc)
            if not (np.isfinite(vn) and np.isfinite(dvn)
                    and np.isfinite(accn)):
                status = FAIL_NONFINITE
                break
            sc_v = atol + rtol * max(abs(v), abs(vn))
            sc_d = atol + rtol * max(abs(dv), abs(dvn))
            err = max(abs(errv) / sc_v, abs(erra) / sc_d)
            if err <= 1.0:
                if (dv != 0.0 and (dv > 0.0) != (dvn > 0.0)
                        and nc < max_zeros + 2):
                    tc, vc, _ = refine_event(t, v, dv, acc, h, m_dim, c, p,
                                             True, max(abs(dv), abs(dvn)),
                                             1e-10)
                    ct[nc] = tc
                    cv[nc] = vc
                    nc += 1
                if (v > 0.0) != (vn > 0.0):
                    tz, vz, dvz = refine_event(t, v, dv, acc, h, m_dim, c, p,
                                               False, vscale, zero_tol)
                    zt[nz] = tz
                    zdv[nz] = dvz
                    nz += 1
                    if nz >= max_zeros:
                        ts[ns] = tz
                        vs[ns] = vz
                        dvs[ns] = dvz
                        ns += 1
                        status = OK_EVENTS
                        break
                t = t + h
                v = vn
                dv = dvn
                acc = accn
                ts[ns] = t
                vs[ns] = v
                dvs[ns] = dv
                ns += 1
                fac = 5.0
                if err > 0.0:
                    fac = 0.9 * err ** -0.2
                    if fac > 5.0:
                        fac = 5.0
                h = h * fac
            else:
                fac = 0.9 * err ** -0.2
                if fac < 0.2:
                    fac = 0.2
                h = h * fac
        return (status, ts[:ns], vs[:ns], dvs[:ns], zt[:nz], zdv[:nz],
                ct[:nc], cv[:nc])

    return integrate


if NUMBA_ENABLED:
    emden_rhs_power_c = njit(cache=True)(emden_rhs_power)
    integrate_radial_power = make_integrator(emden_rhs_power_c, True)
else:
    emden_rhs_power_c = emden_rhs_power
    integrate_radial_power = make_integrator(emden_rhs_power, False)


def integrate_radial_generic(rhs, *args):
    """Integrate with an arbitrary Python right-hand side (never compiled)."""
    return make_integrator(rhs, False)(*args)


# ---------------------------------------------------------------------------
# Symmetric tridiagonal eigenvalues: Sturm counts, bisection, eigenvectors
# ---------------------------------------------------------------------------

@njit(cache=True)
def sturm_count(diag, off, sigma):
    """Number of eigenvalues of tridiag(diag, off) strictly below sigma."""
    n = diag.shape[0]
    count = 0
    q = diag[0] - sigma
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = -1e-300
        q = (diag[i] - sigma) - off[i - 1] * off[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def bisect_eigenvalues(diag, off, lo0, hi0, k_first, k_last, tol_rel,
                       tol_abs):
    """Eigenvalues k_first..k_last (1-based, ascending) via Sturm bisection.

    Every requested eigenvalue must lie in (lo0, hi0].
    """
    nk = k_last - k_first + 1
    out = np.empty(nk)
    for j in range(nk):
        k = k_first + j
        lo = lo0
        hi = hi0
        for _ in range(210):
            mid = 0.5 * (lo + hi)
            if sturm_count(diag, off, mid) >= k:
                hi = mid
            else:
                lo = mid
            if hi - lo <= tol_abs + tol_rel * abs(mid):
                break
        out[j] = 0.5 * (lo + hi)
    return out


@njit(cache=True)
def inverse_iteration(diag, off, lam, n_iter):
    """Eigenvector of tridiag(diag, off) for the isolated eigenvalue lam.

    Factors (T - lam I) once by banded LU with partial pivoting, then runs a
    few inverse-iteration solves from a deterministic start.  Returns the
    unit 2-norm vector.
    """
    n = diag.shape[0]
    d0 = np.empty(n)      # U main diagonal
    d1 = np.zeros(n)      # U first superdiagonal
    d2 = np.zeros(n)      # U second superdiagonal (fill-in from swaps)
    ml = np.zeros(n)      # multipliers
    sw = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        d0[i] = diag[i] - lam
    for i in range(n - 1):
        d1[i] = off[i]
    for i in range(n - 1):
        a21 = off[i]
        if abs(d0[i]) >= abs(a21):
            piv = d0[i] if d0[i] != 0.0 else 1e-300
            d0[i] = piv
            m = a21 / piv
            ml[i] = m
            d0[i + 1] = d0[i + 1] - m * d1[i]
        else:
            sw[i] = True
            m = d0[i] / a21
            ml[i] = m
            u01 = d0[i + 1]
            u02 = d1[i + 1] if i + 1 < n - 1 else 0.0
            nd0 = d1[i] - m * u01
            d0[i] = a21
            d1[i] = u01
            d2[i] = u02
            d0[i + 1] = nd0
            if i + 1 < n - 1:
                d1[i + 1] = -m * u02
    if d0[n - 1] == 0.0:
        d0[n - 1] = 1e-300

    x = np.empty(n)
    for i in range(n):
        x[i] = 1.0 / (1.0 + 0.01 * (i % 7))
    nrm = np.sqrt(np.sum(x * x))
    for i in range(n):
        x[i] /= nrm
    for _ in range(n_iter):
        for i in range(n - 1):
            if sw[i]:
                tmp = x[i]
                x[i] = x[i + 1]
                x[i + 1] = tmp
            x[i + 1] = x[i + 1] - ml[i] * x[i]
        x[n - 1] = x[n - 1] / d0[n - 1]
        if n > 1:
            x[n - 2] = (x[n - 2] - d1[n - 2] * x[n - 1]) / d0[n - 2]
        for i in range(n - 3, -1, -1):
            x[i] = (x[i] - d1[i] * x[i + 1] - d2[i] * x[i + 2]) / d0[i]
        nrm = np.sqrt(np.sum(x * x))
        if nrm == 0.0 or not np.isfinite(nrm):
            for i in range(n):
                x[i] = 1.0 / (1.0 + 0.01 * ((i + 3) % 11))
            nrm = np.sqrt(np.sum(x * x))
        for i in range(n):
            x[i] /= nrm
    return x
