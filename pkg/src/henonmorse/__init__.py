"""Nodal radial solutions of Henon-type problems on the unit ball, the
associated singular weighted Sturm-Liouville spectra, and Morse-index
reports built from them."""

from ._kernels import NUMBA_ENABLED
from .dimension import (DimensionMap, angular_threshold, degeneracy_targets,
                        eigenvalue_pullback, generalized_dimension,
                        map_radius)
from .morse import (BETA_PLANAR, BeltramiTable, DegeneracyReport, MorseReport,
                    SymmetryMultiplicity, asymptotic_prediction,
                    beltrami_eigen, beltrami_multiplicity, degeneracy_scan,
                    lower_bound, morse_index, symmetric_morse_index)
from .oracle import dense_oracle_spectrum
from .radial import (AuxiliaryZ, BracketError, EmdenTrajectory,
                     IntegrationError, Nonlinearity, QualitativeReport,
                     RadialProfile, auxiliary_z, henon_profile,
                     integrate_emden_ivp, linearized_potential,
                     solve_nodal_power, solve_nodal_shooting,
                     validate_profile)
from .spectral import (EigenPair, SpectralConfig, SpectralError, Spectrum,
                       WeightedSLProblem, count_interior_nodes,
                       fit_decay_exponent, liouville_transform,
                       picone_residual, rayleigh_quotient,
                       solve_singular_spectrum, solve_standard_spectrum,
                       theta_analytic, weighted_inner_product,
                       zero_potential)

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED", "BETA_PLANAR", "__version__",
    "DimensionMap", "generalized_dimension", "eigenvalue_pullback",
    "angular_threshold", "degeneracy_targets", "map_radius",
    "Nonlinearity", "RadialProfile", "EmdenTrajectory", "QualitativeReport",
    "AuxiliaryZ", "IntegrationError", "BracketError", "integrate_emden_ivp",
    "solve_nodal_power", "solve_nodal_shooting", "henon_profile",
    "validate_profile", "auxiliary_z", "linearized_potential",
    "WeightedSLProblem", "SpectralConfig", "SpectralError", "EigenPair",
    "Spectrum", "liouville_transform", "solve_singular_spectrum",
    "solve_standard_spectrum", "count_interior_nodes", "fit_decay_exponent",
    "picone_residual", "rayleigh_quotient", "weighted_inner_product",
    "theta_analytic", "zero_potential", "dense_oracle_spectrum",
    "BeltramiTable", "SymmetryMultiplicity", "MorseReport",
    "DegeneracyReport", "beltrami_eigen", "beltrami_multiplicity",
    "morse_index", "degeneracy_scan", "symmetric_morse_index", "lower_bound",
    "asymptotic_prediction",
]
