#include "grassvol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "grassvol/errors.hpp"
#include "grassvol/special.hpp"

namespace grassvol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxLevel = 3;

struct Estimate {
  double value = 0.0;
  double rounding = 0.0;
};

// Integral over s in [lo, hi] of f(s), split into `pieces` Gauss panels.
template <class F>
cplx gauss_panels(F&& f, double lo, double hi, int pieces, const special::GaussRule& rule) {
  cplx acc = 0.0;
  const double width = (hi - lo) / pieces;
  for (int k = 0; k < pieces; ++k) {
    const double a = lo + k * width;
    const double half = 0.5 * width;
    const double mid = a + half;
    cplx panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    acc += half * panel;
  }
  return acc;
}

// Integral from V to infinity of F_k(nu) e^{i omega nu}, with
// F_k(nu) = (i/nu) Q_k(1/(i nu)), along the ray nu = V (1 + i sigma s) on
// which the oscillation turns into decay.
cplx tail_integral(const JacobiDeterminant& det, int k, double omega, double V, int refine,
                   const special::GaussRule& rule) {
  if (std::abs(omega) < 1e-12) omega = 0.0;
  const double sigma = omega < 0.0 ? -1.0 : 1.0;
  const double c = std::abs(omega) * V;
  const cplx dir(0.0, sigma);

  auto G = [&](double s) -> cplx {
    const cplx nu = V * (1.0 + dir * s);
    const cplx w = 1.0 / (cplx(0.0, 1.0) * nu);
    const auto q = det.frequency_components(w);
    const cplx F = cplx(0.0, 1.0) / nu * q[static_cast<std::size_t>(k)];
    return F * std::exp(-c * s);
  };

  cplx integral = 0.0;
  if (c >= 40.0) {
    integral = gauss_panels(G, 0.0, 40.0 / c, 4 * refine, rule);
  } else {
    const int near_pieces = std::max(1, static_cast<int>(std::ceil(c / 10.0))) * 2 * refine;
    integral = gauss_panels(G, 0.0, 1.0, near_pieces, rule);
    // s in [1, inf) via s = 1/u, u in (0, 1], geometric panels toward u = 0.
    auto Gu = [&](double u) -> cplx { return G(1.0 / u) / (u * u); };
    double hi = 1.0;
    while (hi > 1e-14) {
      const double lo = 0.5 * hi;
      integral += gauss_panels(Gu, lo, hi, refine, rule);
      hi = lo;
    }
  }
  return dir * V * std::polar(1.0, omega * V) * integral;
}

Estimate integrate(const JacobiDeterminant& det, double t, double V, int base_panels, int level,
                   const QuadratureConfig& cfg) {
  const auto& rule = special::gauss_legendre(cfg.panel_order);
  const int refine = 1 << level;
  const int panels = base_panels * refine;
  const double width = V / panels;

  double main = 0.0;
  double rounding = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double half = 0.5 * width;
    const double mid = k * width + half;
    double panel = 0.0;
    double panel_round = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double nu = mid + half * rule.nodes[i];
      double derr = 0.0;
      const cplx D = det.evaluate(nu, &derr);
      // Re[(i/nu)(1 - e^{i t nu}) D], written without cancellation near 0.
      const double s = std::sin(0.5 * t * nu);
      const double sin_tn = std::sin(t * nu);
      const double one_minus_cos = 2.0 * s * s;
      const double h = (sin_tn * D.real() - one_minus_cos * D.imag()) / nu;
      panel += rule.weights[i] * h;
      panel_round += rule.weights[i] * std::abs(2.0 * s / nu) * derr;
    }
    main += half * panel;
    rounding += half * panel_round;
  }

  cplx tail = 0.0;
  const int p = det.params().p;
  for (int k = 0; k <= p; ++k) {
    tail += tail_integral(det, k, -static_cast<double>(k), V, refine, rule);
    tail -= tail_integral(det, k, t - k, V, refine, rule);
  }
  return {(main + tail.real()) / kPi, rounding / kPi};
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ParameterError("tolerances must be positive");
  if (panel_order < 4) throw ParameterError("panel_order must be >= 4");
  if (!(nu_max_cap > 0.0)) throw ParameterError("nu_max_cap must be positive");
}

QuadratureResult volume_quadrature_detailed(const JacobiDeterminant& det, double r,
                                            const QuadratureConfig& cfg) {
  cfg.validate();
  const Params& P = det.params();
  if (!std::isfinite(r) || r < 0.0) throw ParameterError("radius must be finite and >= 0");
  const double t = r * r;
  const int tmax = max_radius_sq(P);
  if (t > tmax + 1e-12) {
    throw ParameterError("r^2 = " + std::to_string(t) + " exceeds the largest squared distance " +
                         std::to_string(tmax) + " for " + P.to_string());
  }
  if (t == 0.0) return {0.0, 0.0, 0.0};
  // sqrt(tmax)^2 may round just below tmax.
  if (t >= tmax * (1.0 - 8 * std::numeric_limits<double>::epsilon())) return {1.0, 0.0, 0.0};

  const double period = 2.0 * kPi / (t + P.p);
  const double v_min = std::max(2.0 * P.n + 20.0, det.parts_threshold());
  const int base_panels = static_cast<int>(std::ceil(v_min / period));
  const double V = base_panels * period;
  if (V > cfg.nu_max_cap) {
    throw AccuracyError("finite integration range " + std::to_string(V) + " exceeds nu_max_cap",
                        std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::infinity());
  }

  Estimate prev = integrate(det, t, V, base_panels, 0, cfg);
  double err = std::numeric_limits<double>::infinity();
  Estimate cur = prev;
  for (int level = 1; level <= kMaxLevel; ++level) {
    cur = integrate(det, t, V, base_panels, level, cfg);
    err = std::abs(cur.value - prev.value) + cur.rounding;
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(cur.value));
    if (err <= tol) break;
    if (level == kMaxLevel) {
      throw AccuracyError("quadrature for " + P.to_string() + " at r^2 = " + std::to_string(t) +
                              " reached only " + std::to_string(err),
                          std::clamp(cur.value, 0.0, 1.0), err);
    }
    prev = cur;
  }
  return {std::clamp(cur.value, 0.0, 1.0), err, V};
}

QuadratureResult volume_quadrature_detailed(const Params& params, double r,
                                            const QuadratureConfig& cfg) {
  const Params canon = canonicalize(params);
  return volume_quadrature_detailed(JacobiDeterminant(canon), r, cfg);
}

double volume_quadrature(const Params& params, double r, const QuadratureConfig& cfg) {
  return volume_quadrature_detailed(params, r, cfg).mu;
}

}  // namespace grassvol
