"""Morse-index assembly: spherical-harmonic bookkeeping, index formulas,
degeneracy detection, lower bounds and closed-form large-exponent values.

The count works through the angular threshold J of each negative transformed
eigenvalue: harmonic orders j with j < J contribute their multiplicity to the
index.  When J lands on an integer within tolerance the report flags the
collision (the solution is then numerically indistinguishable from a
degenerate one) and resolves the sum with the strict inequality, i.e. the
boundary order is excluded, which is exactly the closed-form rule at an exact
hit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dimension import DimensionMap, angular_threshold, degeneracy_targets
from .spectral import Spectrum

BETA_PLANAR = math.sqrt(26.9)  # first-eigenvalue decay constant, N=2 limit


def beltrami_eigen(N: int, j: int) -> int:
    """Eigenvalue j(N+j-2) of the Laplace-Beltrami operator on S^(N-1)."""
    if N < 2 or j < 0:
        raise ValueError("need N >= 2 and j >= 0")
    return j * (N + j - 2)


def beltrami_multiplicity(N: int, j: int) -> int:
    """Multiplicity of the j-th Laplace-Beltrami eigenvalue.

    Evaluated as an exact integer running product, (N+2j-2)(N+j-3)! /
    ((N-2)! j!); overflow-safe through Python integers.
    """
    if N < 2 or j < 0:
        raise ValueError("need N >= 2 and j >= 0")
    if j == 0:
        return 1
    num = N + 2 * j - 2
    for i in range(1, j):
        num *= N - 2 + i
    den = math.factorial(j)
    if num % den:
        raise ArithmeticError("multiplicity did not come out integer")
    return num // den


@dataclass(frozen=True)
class BeltramiTable:
    N: int
    j_max: int
    eigenvalues: tuple = field(init=False)
    multiplicities: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(
            beltrami_eigen(self.N, j) for j in range(self.j_max + 1)))
        object.__setattr__(self, "multiplicities", tuple(
            beltrami_multiplicity(self.N, j) for j in range(self.j_max + 1)))


@dataclass(frozen=True)
class SymmetryMultiplicity:
    """Multiplicities of the invariant harmonics of a symmetry subgroup."""

    label: str
    table: tuple   # entry j is the invariant multiplicity at order j

    def __post_init__(self):
        if not self.table or self.table[0] != 1:
            raise ValueError("constants are invariant: the j=0 entry must "
                             "be 1")

    @classmethod
    def full_rotation(cls, j_max: int) -> "SymmetryMultiplicity":
        return cls(label="full-rotation",
                   table=(1,) + (0,) * j_max)

    @classmethod
    def planar_cyclic(cls, q: int, j_max: int) -> "SymmetryMultiplicity":
        """Rotations by 2*pi/q in the plane: order j survives iff q | j."""
        if q < 1:
            raise ValueError("q must be >= 1")
        return cls(label=f"cyclic-{q}",
                   table=tuple(1 if j == 0 else (2 if j % q == 0 else 0)
                               for j in range(j_max + 1)))


@dataclass(frozen=True)
class EigenContribution:
    nu_hat: float
    lambda_hat_rad: float
    J: float
    contributing_j: tuple
    contribution: int
    integer_collision: bool


@dataclass(frozen=True)
class DegeneracyReport:
    radially_degenerate: bool
    radial_offender: int | None
    nonradial_hits: tuple          # (k, j, residual)
    tolerance: float
    source: str                    # which spectrum decided radial degeneracy


@dataclass(frozen=True)
class MorseReport:
    dmap: DimensionMap
    radial_morse: int
    per_eigenvalue: tuple
    total: int
    degeneracy: DegeneracyReport | None
    bounds: dict
    prediction: int | None
    nodal_zones: int | None


def _contribution(nu_hat: float, dmap: DimensionMap, collision_tol: float):
    J = angular_threshold(nu_hat, dmap)
    nearest = round(J)
    collision = abs(J - nearest) <= collision_tol and nearest >= 1
    j_top = int(math.ceil(J - 1e-300)) - 1  # largest j with j < J
    if collision:
        j_top = nearest - 1                 # strict rule at an exact hit
    js = tuple(range(0, j_top + 1))
    contrib = sum(beltrami_multiplicity(dmap.N, j) for j in js)
    lam = dmap.exponent ** 2 * nu_hat
    return EigenContribution(nu_hat=nu_hat, lambda_hat_rad=lam, J=J,
                             contributing_j=js, contribution=contrib,
                             integer_collision=collision)


def morse_index(spec: Spectrum, dmap: DimensionMap, *,
                m: int | None = None, has_f3: bool = True,
                collision_tol: float = 1e-5,
                degeneracy: DegeneracyReport | None = None) -> MorseReport:
    """Assemble the full Morse count from a singular spectrum.

    Each negative eigenvalue nu contributes sum_(j < J(nu)) N_j; entries
    whose J sits on an integer within collision_tol carry a flag (see module
    docstring).  Bounds and the closed-form large-exponent value are filled
    from the nodal-zone count m (default: the radial index itself).
    """
    if spec.kind != "singular":
        raise ValueError("morse_index consumes a singular-kind spectrum")
    if abs(spec.M - dmap.M) > 1e-12:
        raise ValueError("spectrum and dimension map disagree on M")
    neg = [p for p in spec.eigenpairs if p.value < 0]
    if spec.negative_count > len(neg):
        raise ValueError(
            f"spectrum carries {len(neg)} negative pairs but counts "
            f"{spec.negative_count} negative eigenvalues; request "
            "k >= negative_count")
    for p in neg:
        if p.uncertain:
            raise ValueError(
                f"eigenvalue {p.value:.6g} is flagged near-threshold; "
                "refusing to count it")
    entries = tuple(_contribution(p.value, dmap, collision_tol) for p in neg)
    total = sum(e.contribution for e in entries)
    m_zones = m if m is not None else len(neg)
    bounds = {
        "general": lower_bound(dmap.N, dmap.alpha, m_zones, False),
        "with_f3": lower_bound(dmap.N, dmap.alpha, m_zones, True),
    }
    try:
        pred = asymptotic_prediction(dmap.N, dmap.alpha, m_zones)
    except ValueError:
        pred = None
    return MorseReport(dmap=dmap, radial_morse=len(neg),
                       per_eigenvalue=entries, total=total,
                       degeneracy=degeneracy, bounds=bounds, prediction=pred,
                       nodal_zones=m_zones)


def degeneracy_scan(spec_singular: Spectrum, spec_standard: Spectrum | None,
                    dmap: DimensionMap, tol: float = 1e-6,
                    zero_tol: float = 1e-7) -> DegeneracyReport:
    """Detect radial and nonradial kernel directions from the spectra.

    Radial degeneracy is a zero eigenvalue: of the singular problem when
    N >= 3, of the standard problem when N = 2 (where the weighted space is
    strictly smaller and zero modes can fall outside it).  Nonradial
    degeneracy matches singular eigenvalues against the angular-order
    targets.
    """
    if dmap.N == 2:
        if spec_standard is None:
            raise ValueError("N=2 radial degeneracy requires the standard "
                             "spectrum")
        probe_vals = spec_standard.values
        source = "standard"
        band = spec_standard.meta.get("zero_band_count")
    else:
        probe_vals = spec_singular.values
        source = "singular"
        band = spec_singular.meta.get("zero_band_count")
    rad_idx = None
    for i, v in enumerate(probe_vals):
        if abs(v) < zero_tol:
            rad_idx = i + 1
            break
    # a count-only spectrum still decides degeneracy through the zero band
    radially_degenerate = rad_idx is not None or bool(band)

    hits = []
    vals = spec_singular.values
    if len(vals):
        nu_min = float(np.min(vals))
        j_max = 1
        while dmap.c * beltrami_eigen(dmap.N, j_max) <= abs(nu_min) + 1.0:
            j_max += 1
        targets = degeneracy_targets(dmap, j_max)
        for kk, v in enumerate(vals):
            for jj, tgt in enumerate(targets, start=1):
                res = abs(v - tgt)
                if res < tol:
                    hits.append((kk + 1, jj, res))
    return DegeneracyReport(radially_degenerate=radially_degenerate,
                            radial_offender=rad_idx,
                            nonradial_hits=tuple(hits), tolerance=tol,
                            source=source)


def symmetric_morse_index(report: MorseReport,
                          sym: SymmetryMultiplicity) -> int:
    """Morse index restricted to functions invariant under the subgroup.

    Same double sum as the full index with the subgroup's invariant
    multiplicities in place of the full ones.
    """
    max_j = max((e.contributing_j[-1] for e in report.per_eigenvalue
                 if e.contributing_j), default=-1)
    if max_j >= len(sym.table):
        raise ValueError(
            f"symmetry table covers j <= {len(sym.table) - 1}, "
            f"need j <= {max_j}")
    return sum(sym.table[j] for e in report.per_eigenvalue
               for j in e.contributing_j)


def lower_bound(N: int, alpha: float, m: int, has_f3: bool) -> int:
    """Closed-form floor for the Morse index of an m-nodal radial solution.

    Without extra structure: (m-1) * sum_(j=0..1+[alpha/2]) N_j.  When the
    nonlinearity satisfies the superlinearity condition f'(u) > f(u)/u the
    radial part contributes m instead of m-1:
    m + (m-1) * sum_(j=1..1+[alpha/2]) N_j.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    j_top = 1 + int(math.floor(alpha / 2.0))
    s_all = sum(beltrami_multiplicity(N, j) for j in range(0, j_top + 1))
    s_pos = s_all - 1
    if has_f3:
        return m + (m - 1) * s_pos
    return (m - 1) * s_all


def is_even_integer(alpha: float, tol: float = 1e-12) -> bool:
    return abs(2.0 * round(alpha / 2.0) - alpha) <= tol


def asymptotic_prediction(N: int, alpha: float, m: int, *,
                          guard: float = 1e-9) -> int:
    """Morse index in the large-exponent regime, from the closed forms.

    N >= 3: m * sum_(j=0..1+[alpha/2]) N_j for non-even alpha, and
    m * sum_(j=0..[alpha/2]) N_j + (m-1) N_(1+[alpha/2]) at even alpha
    (including 0).  N = 2 covers only m = 2, through the planar constant
    beta ~ sqrt(26.9): 4 + 2[(1+alpha/2) beta] + 2[alpha/2] off even alpha,
    2 + 2[(1+alpha/2) beta] + 2[alpha/2] at even alpha; the exceptional
    values alpha_n = 2(n/beta - 1), where the floor jumps, are refused, as
    are floor arguments within the propagated uncertainty of beta.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    j_half = int(math.floor(alpha / 2.0))
    even = is_even_integer(alpha)
    near = abs(2.0 * round(alpha / 2.0) - alpha)
    if not even and near < 1e-9:
        # an alpha this close to an even integer is ambiguous: the two
        # branches differ and float noise decides which one fires
        raise ValueError(
            f"alpha={alpha!r} sits within 1e-9 of an even integer; pass the "
            "exact even value to select that branch")
    if N >= 3:
        if even:
            return (m * sum(beltrami_multiplicity(N, j)
                            for j in range(0, j_half + 1))
                    + (m - 1) * beltrami_multiplicity(N, j_half + 1))
        return m * sum(beltrami_multiplicity(N, j)
                       for j in range(0, j_half + 2))
    if m != 2:
        raise ValueError("the planar closed form covers two nodal zones "
                         "only")
    arg = (1.0 + alpha / 2.0) * BETA_PLANAR
    # beta is only known approximately; a floor argument this close to an
    # integer (equivalently alpha close to an exceptional value) is unstable
    if abs(arg - round(arg)) < max(guard, 10 * abs(arg) * 1e-16):
        raise ValueError(
            f"alpha={alpha:g} is within the guard band of an exceptional "
            f"value 2(n/beta - 1); the limit index is not determined there")
    base = 2 if even else 4
    return base + 2 * int(math.floor(arg)) + 2 * j_half


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def morse_report_to_json(report: MorseReport, path) -> None:
    doc = {
        "N": report.dmap.N,
        "alpha": report.dmap.alpha,
        "M": report.dmap.M,
        "radial_morse": report.radial_morse,
        "total": report.total,
        "nodal_zones": report.nodal_zones,
        "bounds": report.bounds,
        "prediction": report.prediction,
        "per_eigenvalue": [
            {
                "nu_hat": e.nu_hat,
                "lambda_hat_rad": e.lambda_hat_rad,
                "J": e.J,
                "contributing_j": list(e.contributing_j),
                "contribution": e.contribution,
                "integer_collision": e.integer_collision,
            }
            for e in report.per_eigenvalue
        ],
        "degeneracy": None if report.degeneracy is None else {
            "radially_degenerate": report.degeneracy.radially_degenerate,
            "radial_offender": report.degeneracy.radial_offender,
            "nonradial_hits": [list(h) for h in
                               report.degeneracy.nonradial_hits],
            "tolerance": report.degeneracy.tolerance,
            "source": report.degeneracy.source,
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def morse_report_rows(report: MorseReport):
    """Compact (i, nu_hat, lambda_hat, J, contribution) rows for CSV sweeps."""
    return [(i + 1, e.nu_hat, e.lambda_hat_rad, e.J, e.contribution)
            for i, e in enumerate(report.per_eigenvalue)]
