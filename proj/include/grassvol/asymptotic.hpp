#pragma once

#include <vector>

#include "grassvol/params.hpp"
#include "grassvol/rational.hpp"

namespace grassvol {

/// First three cumulants of the linear statistic Y = sum_j (x_j - 1/2).
struct Cumulants {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

struct ExactCumulants {
  Rational kappa1;
  Rational kappa2;
  Rational kappa3;
  Cumulants to_double() const;
};

/// Closed forms; canonicalizes the triple.
ExactCumulants cumulants_closed_exact(const Params& params);
Cumulants cumulants_closed(const Params& params);

/// Mean of the squared distance, p(n-q)/n = kappa1 + p/2.
Rational mean_distance_sq_exact(const Params& params);
double mean_distance_sq(const Params& params);

/// kappa_1..kappa_max_order from the Painleve-type ODE for
///   sigma(nu) = sum_j kappa_j (-1)^j nu^j / (2^j (j-1)!) - p nu/4 + p(p+b),
/// matched order by order in exact arithmetic. At k = n + 1 the equation
/// leaves kappa_k free and that single value comes from cumulants_taylor.
/// Throws InvariantError if an order is inconsistent.
inline constexpr int kMaxCumulantOrder = 8;
std::vector<Rational> cumulants_recursive(const Params& params, int max_order);

/// Cumulants of Y from the exact Taylor expansion of log D_p at nu = 0.
inline constexpr int kMaxTaylorP = 12;
std::vector<Rational> cumulants_taylor(const Params& params, int max_order);

/// RMT limit: 1/2 erf(2 sqrt2 alpha) - 1/2 erf(2 sqrt2 (alpha - r^2)),
/// alpha = (n + 2p - 2q)/4.
double volume_rmt(const Params& params, double r);

/// Finite-size form: 1/2 erf(beta/sqrt(2 k2)) - 1/2 erf((beta - r^2)/sqrt(2 k2)),
/// beta = p(n-q)/n.
double volume_finite(const Params& params, double r);

enum class SurrogateKind { rmt, finite };

struct GaussianSurrogate {
  double mean = 0.0;
  double variance = 1.0;
  SurrogateKind kind = SurrogateKind::finite;
};

/// Gaussian models of Y: mean (n-2q)/4, variance 1/16 for rmt; kappa1,
/// kappa2 for finite.
GaussianSurrogate rmt_surrogate(const Params& params);
GaussianSurrogate finite_surrogate(const Params& params);

/// Hellinger distance sqrt(1 - BC) between two normal laws.
double hellinger_gaussians(const GaussianSurrogate& s1, const GaussianSurrogate& s2);

}  // namespace grassvol
