"""Localized approximation on the real line by Hermite functions.

Four layers: the orthonormal Hermite basis and its closed-form kernels
(`hermite`), smooth low-pass filters and localized kernels (`filters`),
scattered-point quadrature exact for products of weighted polynomials
(`quadrature`), filtered projection / frame operators (`operators`), and local
smoothness estimation from frame-layer decay (`analysis`).
"""

from .hermite import (HermiteBasis, WeightedPolynomial, heat_kernel_closed,
                      heat_kernel_series, hermite_synthesis, mehler, psi_batch,
                      psi_derivative_batch, psi_integral, space_dimension,
                      weighted_poly_eval)
from .filters import (LocalizedKernel, LowPassFilter, filter_eval, kernel_eval,
                      kernel_matrix, localization_report)
from .quadrature import (ALPHA_DEFAULT, CoverageConstants, DiscreteMeasure,
                         PointSet, QuadratureRule, admissible_order, build_rule,
                         bounded_variation_check, density_content, load_rule,
                         range_truncation, regularity_norm, save_rule,
                         solve_mz_weights, verify_quadrature)
from .operators import (LEBESGUE, FrameDecomposition, MeasureSequence,
                        Projection, SampledFunction, approx_error_estimate,
                        builtin, decompose, fourier_hermite, reconstruct, sigma,
                        sigma_dx, tau)
from .analysis import (BesovParams, SmoothnessReport, Window, forward_difference,
                       global_classify, local_smoothness_map, modulus, seq_norm,
                       windows_on)

__version__ = "0.1.0"
