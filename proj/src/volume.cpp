#include "grassvol/volume.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "grassvol/asymptotic.hpp"
#include "grassvol/closed_form.hpp"
#include "grassvol/errors.hpp"

namespace grassvol {

std::string method_name(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::quadrature:
      return "quadrature";
    case VolumeMethod::closed:
      return "closed";
    case VolumeMethod::rmt:
      return "rmt";
    case VolumeMethod::finite:
      return "finite";
    case VolumeMethod::mc:
      return "mc";
  }
  return "unknown";
}

VolumeMethod parse_volume_method(const std::string& name) {
  for (VolumeMethod m : all_volume_methods()) {
    if (method_name(m) == name) return m;
  }
  throw ParameterError("unknown volume method '" + name + "'");
}

std::vector<VolumeMethod> all_volume_methods() {
  return {VolumeMethod::closed, VolumeMethod::quadrature, VolumeMethod::finite, VolumeMethod::rmt,
          VolumeMethod::mc};
}

VolumeFn volume_function(VolumeMethod m, const QuadratureConfig& cfg) {
  switch (m) {
    case VolumeMethod::quadrature:
      return [cfg](const Params& p, double r) { return volume_quadrature(p, r, cfg); };
    case VolumeMethod::closed:
      return [](const Params& p, double r) { return volume_closed_form(p, r); };
    case VolumeMethod::rmt:
      return [](const Params& p, double r) { return volume_rmt(p, r); };
    case VolumeMethod::finite:
      return [](const Params& p, double r) { return volume_finite(p, r); };
    case VolumeMethod::mc:
      break;
  }
  throw ParameterError("method '" + method_name(m) + "' cannot be used as a volume function");
}

double volume_complement(const Params& params, double r, const VolumeFn& inner) {
  const Params c = canonicalize(params);
  const double t = r * r;
  if (!std::isfinite(r) || r < 0.0 || t > c.p + 1e-12) {
    throw ParameterError("volume_complement needs 0 <= r^2 <= p");
  }
  const Params other = Params::make(c.n, c.p, c.n - c.q);
  return 1.0 - inner(other, std::sqrt(std::max(0.0, c.p - t)));
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string VolumeCurve::to_csv(bool header, bool with_stderr) const {
  std::ostringstream os;
  if (header) os << "r,r_sq,mu,method,abs_err_est" << (with_stderr ? ",stderr" : "") << "\n";
  for (const auto& pt : points) {
    os << format_number(pt.r) << ',' << format_number(pt.r_sq) << ',' << format_number(pt.mu) << ','
       << method_name(method) << ',' << format_number(pt.abs_err_est);
    if (with_stderr) os << ',' << (pt.stderr_ ? format_number(*pt.stderr_) : "");
    os << "\n";
  }
  return os.str();
}

nlohmann::json VolumeCurve::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& pt : points) {
    nlohmann::json row = {{"r", pt.r}, {"r_sq", pt.r_sq}, {"mu", pt.mu}, {"abs_err_est", pt.abs_err_est}};
    if (pt.stderr_) row["stderr"] = *pt.stderr_;
    rows.push_back(std::move(row));
  }
  return {{"n", params.n}, {"p", params.p}, {"q", params.q},
          {"method", method_name(method)}, {"config", config}, {"points", rows}};
}

VolumeCurve volume_curve(const Params& params, const std::vector<double>& r_grid,
                         VolumeMethod method, const CurveOptions& opts) {
  const Params given = Params::make(params.n, params.p, params.q);
  const Params c = canonicalize(given);
  VolumeCurve curve;
  curve.params = given;
  curve.method = method;
  switch (method) {
    case VolumeMethod::quadrature: {
      curve.config = {{"abs_tol", opts.quadrature.abs_tol},
                      {"rel_tol", opts.quadrature.rel_tol},
                      {"nu_max_cap", opts.quadrature.nu_max_cap},
                      {"panel_order", opts.quadrature.panel_order}};
      const JacobiDeterminant det(c);
      for (double r : r_grid) {
        const auto res = volume_quadrature_detailed(det, r, opts.quadrature);
        curve.points.push_back({r, r * r, res.mu, res.abs_err_est, std::nullopt});
      }
      break;
    }
    case VolumeMethod::closed: {
      const auto& cf = ClosedFormVolume::lookup(c);
      for (double r : r_grid) curve.points.push_back({r, r * r, cf.evaluate(r), 0.0, std::nullopt});
      break;
    }
    case VolumeMethod::rmt:
    case VolumeMethod::finite: {
      const VolumeFn f = volume_function(method);
      for (double r : r_grid) curve.points.push_back({r, r * r, f(c, r), 0.0, std::nullopt});
      break;
    }
    case VolumeMethod::mc: {
      curve.config = {{"samples", opts.mc.samples}, {"seed", opts.mc.seed}, {"threads", opts.mc.threads}};
      for (const auto& e : estimate_volume(c, r_grid, opts.mc)) {
        curve.points.push_back({e.r, e.r * e.r, e.mu_hat, 3.0 * e.stderr_, e.stderr_});
      }
      break;
    }
  }
  return curve;
}

}  // namespace grassvol
