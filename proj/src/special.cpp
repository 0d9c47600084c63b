#include "grassvol/special.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "grassvol/errors.hpp"

namespace grassvol::special {

namespace {

GaussRule build_gauss_legendre(int order) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_order.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

// Halley step for erfc(x) = y. With u = f/f', f''/f' = -2x.
double halley_erfc(double x, double y) {
  for (int iter = 0; iter < 6; ++iter) {
    const double f = std::erfc(x) - y;
    const double fp = -2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
    if (fp == 0.0) break;
    const double u = f / fp;
    const double step = u / (1.0 + x * u);
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// Small y: start from erfc(x) ~ exp(-x^2) / (x sqrt(pi)) and run Newton on
// log erfc, which stays representable down to subnormal y.
double erfcinv_tail(double y) {
  const double L = -std::log(y * std::sqrt(std::numbers::pi));
  double x = std::sqrt(L);
  for (int i = 0; i < 4; ++i) x = std::sqrt(L - std::log(x));
  const double log_y = std::log(y);
  for (int iter = 0; iter < 8; ++iter) {
    const double e = std::erfc(x);
    if (e == 0.0) break;
    const double g = std::log(e) - log_y;
    const double gp = -2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x) / e;
    const double step = g / gp;
    x -= step;
    if (std::abs(step) <= 1e-16 * x) break;
  }
  return x;
}

// Giles' single-precision approximation, written in terms of w = -log(y(2-y))
// so that it stays meaningful when erfc is tiny.
double erfcinv_guess(double y) {
  const double w = -std::log(y * (2.0 - y));
  const double s = 1.0 - y;  // erf value; only used as a factor
  double p;
  if (w < 6.25) {
    const double t = w - 3.125;
    p = -3.6444120640178196996e-21;
    p = -1.685059138182016589e-19 + p * t;
    p = 1.2858480715256400167e-18 + p * t;
    p = 1.115787767802518096e-17 + p * t;
    p = -1.333171662854620906e-16 + p * t;
    p = 2.0972767875968561637e-17 + p * t;
    p = 6.6376381343583238325e-15 + p * t;
    p = -4.0545662729752068639e-14 + p * t;
    p = -8.1519341976054721522e-14 + p * t;
    p = 2.6335093153082322977e-12 + p * t;
    p = -1.2975133253453532498e-11 + p * t;
    p = -5.4154120542946279317e-11 + p * t;
    p = 1.051212273321532285e-09 + p * t;
    p = -4.1126339803469836976e-09 + p * t;
    p = -2.9070369957882005086e-08 + p * t;
    p = 4.2347877827932403518e-07 + p * t;
    p = -1.3654692000834678645e-06 + p * t;
    p = -1.3882523362786468719e-05 + p * t;
    p = 0.0001867342080340571352 + p * t;
    p = -0.00074070253416626697512 + p * t;
    p = -0.0060336708714301490533 + p * t;
    p = 0.24015818242558961693 + p * t;
    p = 1.6536545626831027356 + p * t;
  } else if (w < 16.0) {
    const double t = std::sqrt(w) - 3.25;
    p = 2.2137376921775787049e-09;
    p = 9.0756561938885390979e-08 + p * t;
    p = -2.7517406297064545428e-07 + p * t;
    p = 1.8239629214389227755e-08 + p * t;
    p = 1.5027403968909827627e-06 + p * t;
    p = -4.013867526981545969e-06 + p * t;
    p = 2.9234449089955446044e-06 + p * t;
    p = 1.2475304481671778723e-05 + p * t;
    p = -4.7318229009055733981e-05 + p * t;
    p = 6.8284851459573175448e-05 + p * t;
    p = 2.4031110387097893999e-05 + p * t;
    p = -0.0003550375203628474796 + p * t;
    p = 0.00095328937973738049703 + p * t;
    p = -0.0016882755560235047313 + p * t;
    p = 0.0024914420961078508066 + p * t;
    p = -0.0037512085075692412107 + p * t;
    p = 0.005370914553590063617 + p * t;
    p = 1.0052589676941592334 + p * t;
    p = 3.0838856104922207635 + p * t;
  } else {
    const double t = std::sqrt(w) - 5.0;
    p = -2.7109920616438573243e-11;
    p = -2.5556418169965252055e-10 + p * t;
    p = 1.5076572693500548083e-09 + p * t;
    p = -3.7894654401267369937e-09 + p * t;
    p = 7.6157012080783393804e-09 + p * t;
    p = -1.4960026627149240478e-08 + p * t;
    p = 2.9147953450901080826e-08 + p * t;
    p = -6.7711997758452339498e-08 + p * t;
    p = 2.2900482228026654717e-07 + p * t;
    p = -9.9298272942317002539e-07 + p * t;
    p = 4.5260625972231537039e-06 + p * t;
    p = -1.9681778105531670567e-05 + p * t;
    p = 7.5995277030017761139e-05 + p * t;
    p = -0.00021503011930044477347 + p * t;
    p = -0.00013871931833623122026 + p * t;
    p = 1.0103004648645343977 + p * t;
    p = 4.8499064014085844221 + p * t;
  }
  return p * s;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw ParameterError("Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussRule>(build_gauss_legendre(order));
  return *slot;
}

double erfcinv(double y) {
  if (std::isnan(y) || y < 0.0 || y > 2.0) return std::numeric_limits<double>::quiet_NaN();
  if (y == 0.0) return std::numeric_limits<double>::infinity();
  if (y == 2.0) return -std::numeric_limits<double>::infinity();
  if (y > 1.0) return -erfcinv(2.0 - y);
  if (y == 1.0) return 0.0;
  if (y < 1e-10) return erfcinv_tail(y);
  // For y <= 1 the guess's factor (1 - y) loses digits only near y = 1, where
  // Halley's iteration recovers them.
  return halley_erfc(erfcinv_guess(y), y);
}

double erfinv(double y) {
  if (std::isnan(y) || y < -1.0 || y > 1.0) return std::numeric_limits<double>::quiet_NaN();
  if (y == 1.0) return std::numeric_limits<double>::infinity();
  if (y == -1.0) return -std::numeric_limits<double>::infinity();
  if (y < 0.0) return -erfinv(-y);
  if (y == 0.0) return 0.0;
  double x = erfcinv_guess(1.0 - y);
  // Newton/Halley on erf directly keeps relative accuracy for small y.
  for (int iter = 0; iter < 6; ++iter) {
    const double f = std::erf(x) - y;
    const double fp = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
    const double u = f / fp;
    const double step = u / (1.0 + x * u);
    x -= step;
    if (std::abs(step) <= 1e-16 * std::abs(x)) break;
  }
  return x;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace grassvol::special
