"""Log-gas energies, transportation-cost inequalities and beta ensembles."""

from .asymptotics import (clt_variance, clt_variance_limit, legendre_transform, lln_constant, log_mgf_centered,
                          log_mgf_exact, mgf_exact, rate_function)
from .circle import CircularMeasure, arc, circle_empirical, haar, w2_circle, w2_circle_optimal
from .energy import Kernel, Potential, continuous_energy, delta_n, discrete_energy, interpolation_f
from .ensemble import RngSpec, energy_statistic, monte_carlo, sample_matrix
from .fekete import Configuration, fekete_points
from .inequalities import (check_circle, check_discrete, check_haar, check_line, check_measure_vs_fekete,
                           check_semicircular)
from .measures import Dirac, Empirical, Gridded, Semicircle, Uniform, displacement_interpolate, w2
from .specfn import digamma, hermite_roots, log_gamma, semicircle_quantile, trigamma
from .tridiag import TridiagonalSym, eigenvalues

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
