#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grassvol/monte_carlo.hpp"
#include "grassvol/params.hpp"
#include "grassvol/quadrature.hpp"
#include "json.hpp"

namespace grassvol {

enum class VolumeMethod { quadrature, closed, rmt, finite, mc };

std::string method_name(VolumeMethod m);
VolumeMethod parse_volume_method(const std::string& name);

/// Order used by `--method all`.
std::vector<VolumeMethod> all_volume_methods();

using VolumeFn = std::function<double(const Params&, double)>;

/// A deterministic volume function for bounds and comparisons. Monte Carlo is
/// rejected here because it needs a grid and seed.
VolumeFn volume_function(VolumeMethod m, const QuadratureConfig& cfg = {});

/// 1 - inner(n, p, n-q) at radius sqrt(p - r^2).
double volume_complement(const Params& params, double r, const VolumeFn& inner);

struct VolumePoint {
  double r = 0.0;
  double r_sq = 0.0;
  double mu = 0.0;
  double abs_err_est = 0.0;
  std::optional<double> stderr_;  // Monte Carlo only
};

struct VolumeCurve {
  Params params;
  VolumeMethod method = VolumeMethod::quadrature;
  std::vector<VolumePoint> points;
  nlohmann::json config = nlohmann::json::object();

  /// Columns r, r_sq, mu, method, abs_err_est[, stderr].
  std::string to_csv(bool header = true, bool with_stderr = false) const;
  nlohmann::json to_json() const;
};

struct CurveOptions {
  QuadratureConfig quadrature;
  MonteCarloOptions mc;
};

/// Evaluates the method on every grid radius. Canonicalizes internally but
/// records the triple as given.
VolumeCurve volume_curve(const Params& params, const std::vector<double>& r_grid,
                         VolumeMethod method, const CurveOptions& opts = {});

/// Formats with 12 significant digits.
std::string format_number(double x);

}  // namespace grassvol
