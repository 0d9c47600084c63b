#pragma once

#include <vector>

namespace grassvol::special {

/// Gauss-Legendre rule on [-1, 1]. Rules are computed once per order and
/// cached for the life of the process; the cache is thread-safe.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Inverse of std::erf on (-1, 1); returns +-infinity at +-1.
double erfinv(double y);

/// Inverse of std::erfc on (0, 2); returns +-infinity at 0 and 2.
/// Accurate in the far tail where 1 - y is not representable.
double erfcinv(double y);

/// log of the Beta function for positive arguments.
double log_beta(double a, double b);

}  // namespace grassvol::special
