#pragma once

#include "grassvol/jacobi.hpp"
#include "grassvol/params.hpp"

namespace grassvol {

struct QuadratureConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  /// Ceiling for the finite integration range; the rest is integrated analytically.
  double nu_max_cap = 1e6;
  /// Gauss-Legendre nodes per panel.
  int panel_order = 32;

  void validate() const;
};

struct QuadratureResult {
  double mu = 0.0;
  double abs_err_est = 0.0;
  /// Where the finite panel range ends and the analytic tail begins.
  double nu_split = 0.0;
};

/// Normalized ball volume from the single oscillatory integral over nu.
/// Any valid triple is accepted and canonicalized. Throws ParameterError when
/// r^2 exceeds the largest squared distance, and AccuracyError when the
/// tolerance cannot be met.
QuadratureResult volume_quadrature_detailed(const Params& params, double r,
                                            const QuadratureConfig& cfg = {});
double volume_quadrature(const Params& params, double r, const QuadratureConfig& cfg = {});

/// Same computation with a prebuilt determinant (canonical parameters).
QuadratureResult volume_quadrature_detailed(const JacobiDeterminant& det, double r,
                                            const QuadratureConfig& cfg = {});

}  // namespace grassvol
