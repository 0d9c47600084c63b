#pragma once

#include <complex>
#include <vector>

#include "grassvol/params.hpp"

namespace grassvol {

using cplx = std::complex<double>;

/// Hard cap on p for the exact determinant path.
inline constexpr int kMaxExactP = 12;

/// Exponents of one determinant entry: integral of x^{alpha-1} (1-x)^{beta-1}.
struct DeterminantEntryParams {
  int alpha = 1;
  int beta = 1;
};

/// Which expansion det_entry used.
enum class EntryBranch { series, parts, gauss };

struct EntryValue {
  cplx value;
  double err_bound;  // absolute
  EntryBranch branch;
};

/// Integral over [0,1] of x^{alpha-1} (1-x)^{beta-1} exp(-i nu x).
/// Picks between the confluent hypergeometric series, the terminating
/// integration-by-parts expansion and a Gauss-Legendre rule, by smallest
/// rounding-error bound.
cplx det_entry(int alpha, int beta, double nu);
EntryValue det_entry_detailed(int alpha, int beta, double nu);

/// Coefficients of the integration-by-parts expansion
///   entry(nu) = sum_l (a_l - e^{-i nu} b_l) w^{l+1},  w = 1/(i nu).
/// a_l, b_l are the l-th derivatives of the integrand's polynomial part at 0
/// and 1. Exact for nu != 0.
struct PartsExpansion {
  std::vector<double> a;
  std::vector<double> b;
};
PartsExpansion parts_expansion(int alpha, int beta);

/// Characteristic function of the sum of Jacobi-ensemble eigenvalues,
/// D_p(nu) = det M(nu) / det M(0), with M_ij = det_entry(i+j+b-1, a+1, nu).
/// Immutable after construction; safe to share across threads.
class JacobiDeterminant {
 public:
  /// Requires canonical params with p <= kMaxExactP.
  explicit JacobiDeterminant(const Params& params);

  const Params& params() const noexcept { return params_; }

  cplx operator()(double nu) const;

  /// Same value plus a first-order rounding bound (absolute).
  cplx evaluate(double nu, double* err_bound) const;

  /// 1-norm condition number of M(0).
  double condition_m0() const noexcept { return cond_m0_; }

  /// log |p! v_{n,p,q} det M(0)|; zero in exact arithmetic.
  double log_normalization_defect() const noexcept { return log_norm_defect_; }

  /// Smallest |nu| from which the parts expansion is trusted for every entry.
  double parts_threshold() const noexcept { return parts_threshold_; }

  /// For complex w = 1/(i nu), the polynomials Q_k with
  ///   D_p(nu) = sum_{k=0}^{p} e^{-i k nu} Q_k(w).
  /// Used to integrate the tail analytically; valid for |nu| >= parts_threshold.
  std::vector<cplx> frequency_components(cplx w) const;

  /// Alternative form of D_p valid for p = q = n/2, built from truncated
  /// exponential sums. Throws ParameterError for other triples.
  cplx evaluate_half_dimension_form(double nu) const;

 private:
  cplx det_of_entries(const std::vector<cplx>& hankel) const;

  Params params_;
  int p_;
  int beta_;
  int alpha0_;  // alpha of entry (1,1)
  cplx det_m0_;
  double cond_m0_ = 1.0;
  double log_norm_defect_ = 0.0;
  double parts_threshold_ = 0.0;
  std::vector<PartsExpansion> parts_;  // per distinct alpha
};

/// Normalisation constant v_{n,p,q} in log form.
double log_jacobi_normalization(const Params& params);

}  // namespace grassvol
