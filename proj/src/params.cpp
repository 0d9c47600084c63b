#include "grassvol/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grassvol/errors.hpp"

namespace grassvol {

Params Params::make(int n, int p, int q) {
  if (n < 2 || p < 1 || q < 1 || p > n - 1 || q > n - 1) {
    throw ParameterError("invalid dimensions (n, p, q) = (" + std::to_string(n) + ", " +
                         std::to_string(p) + ", " + std::to_string(q) +
                         "); need 1 <= p, q <= n - 1");
  }
  return Params{n, p, q};
}

std::string Params::to_string() const {
  return "(" + std::to_string(n) + ", " + std::to_string(p) + ", " + std::to_string(q) + ")";
}

Params canonicalize(const Params& params) {
  Params out = Params::make(params.n, params.p, params.q);
  if (out.p + out.q > out.n) {
    out.p = out.n - out.p;
    out.q = out.n - out.q;
  }
  if (out.p > out.q) std::swap(out.p, out.q);
  return out;
}

int max_radius_sq(const Params& params) {
  return std::min({params.p, params.q, params.n - params.p, params.n - params.q});
}

double log_grassmannian_volume(int n, int q) {
  if (n < 2 || q < 1 || q > n - 1) {
    throw ParameterError("grassmannian_volume: need 1 <= q <= n - 1");
  }
  double acc = static_cast<double>(q) * (n - q) * std::log(std::numbers::pi);
  for (int i = 1; i <= q; ++i) {
    acc += std::lgamma(static_cast<double>(q - i + 1)) - std::lgamma(static_cast<double>(n - i + 1));
  }
  return acc;
}

double grassmannian_volume(int n, int q) { return std::exp(log_grassmannian_volume(n, q)); }

}  // namespace grassvol
