#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "grassvol/asymptotic.hpp"
#include "grassvol/closed_form.hpp"
#include "grassvol/coding.hpp"
#include "grassvol/errors.hpp"
#include "grassvol/kernels.hpp"
#include "grassvol/volume.hpp"
#include "json.hpp"

#ifndef GRASSVOL_VERSION
#define GRASSVOL_VERSION "0.0.0"
#endif

namespace grassvol::cli {

namespace {

using nlohmann::json;

struct Common {
  bool as_json = false;
  std::string out_path;
  std::string manifest_path;
  int threads = 1;
};

// Result of one subcommand: text for the output channel plus manifest fields.
struct Outcome {
  std::string body;
  json details = json::object();
  int code = kOk;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ParameterError("grid must be lo:hi:steps, got '" + text + "'");
  double lo = 0.0, hi = 0.0;
  int steps = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    steps = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw ParameterError("grid must be lo:hi:steps, got '" + text + "'");
  }
  if (steps < 1 || !(hi >= lo)) throw ParameterError("grid needs steps >= 1 and hi >= lo");
  std::vector<double> g;
  for (int i = 0; i < steps; ++i) g.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  return g;
}

std::pair<int, int> parse_int_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ParameterError("range must be lo:hi, got '" + text + "'");
  }
}

std::string fmt(double x) { return format_number(x); }

// ---------------------------------------------------------------- volume

struct VolumeArgs {
  int n = 0, p = 0, q = 0;
  std::optional<double> r;
  std::string grid;
  std::string method = "quadrature";
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  int panel_order = 32;
};

Outcome cmd_volume(const VolumeArgs& a, const Common& c) {
  const Params params = Params::make(a.n, a.p, a.q);
  if (a.r.has_value() == !a.grid.empty()) throw ParameterError("give exactly one of --r and --grid");
  const std::vector<double> grid = a.r ? std::vector<double>{*a.r} : parse_grid(a.grid);
  const int tmax = max_radius_sq(params);
  for (double r : grid) {
    if (!(r >= 0.0) || r * r > tmax + 1e-12) {
      throw ParameterError("r = " + fmt(r) + " gives r^2 outside [0, " + std::to_string(tmax) + "]");
    }
  }

  std::vector<VolumeMethod> methods;
  const bool all = a.method == "all";
  if (all) {
    methods = all_volume_methods();
  } else {
    methods = {parse_volume_method(a.method)};
  }

  CurveOptions opts;
  if (a.tol) {
    opts.quadrature.abs_tol = *a.tol;
    opts.quadrature.rel_tol = *a.tol;
  }
  opts.quadrature.panel_order = a.panel_order;
  opts.quadrature.validate();
  opts.mc = {a.samples, a.seed, c.threads};

  Outcome res;
  std::vector<VolumeCurve> curves;
  json skipped = json::array();
  double worst_err = 0.0;
  for (VolumeMethod m : methods) {
    if (m == VolumeMethod::closed && all && !ClosedFormVolume::is_tabulated(params)) {
      skipped.push_back(method_name(m));
      continue;
    }
    if (m == VolumeMethod::quadrature) {
      // Per point, so an accuracy failure still yields the other rows.
      VolumeCurve curve;
      curve.params = params;
      curve.method = m;
      curve.config = {{"abs_tol", opts.quadrature.abs_tol},
                      {"rel_tol", opts.quadrature.rel_tol},
                      {"nu_max_cap", opts.quadrature.nu_max_cap},
                      {"panel_order", opts.quadrature.panel_order}};
      const JacobiDeterminant det(canonicalize(params));
      for (double r : grid) {
        try {
          const auto q = volume_quadrature_detailed(det, r, opts.quadrature);
          curve.points.push_back({r, r * r, q.mu, q.abs_err_est, std::nullopt});
          worst_err = std::max(worst_err, q.abs_err_est);
        } catch (const AccuracyError& e) {
          curve.points.push_back({r, r * r, e.best_estimate(), e.achieved_tolerance(), std::nullopt});
          worst_err = std::max(worst_err, e.achieved_tolerance());
          res.code = kAccuracy;
        }
      }
      curves.push_back(std::move(curve));
    } else {
      curves.push_back(volume_curve(params, grid, m, opts));
    }
  }

  const bool with_stderr = std::any_of(methods.begin(), methods.end(),
                                       [](VolumeMethod m) { return m == VolumeMethod::mc; });
  if (c.as_json) {
    json doc = {{"command", "volume"}, {"n", a.n}, {"p", a.p}, {"q", a.q}, {"curves", json::array()}};
    for (const auto& cv : curves) doc["curves"].push_back(cv.to_json());
    res.body = doc.dump(2) + "\n";
  } else {
    for (std::size_t i = 0; i < curves.size(); ++i) res.body += curves[i].to_csv(i == 0, with_stderr);
  }
  res.details = {{"achieved_abs_err", worst_err}, {"skipped_methods", skipped}};
  return res;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  int n = 0, p = 0, q = 0;
  double delta = 0.0;
  std::string bound = "gv";
  std::string method = "quadrature";
  std::optional<double> tol;
};

Outcome cmd_bounds(const BoundsArgs& a, const Common& c) {
  const Params params = Params::make(a.n, a.p, a.q);
  QuadratureConfig qc;
  if (a.tol) qc.abs_tol = qc.rel_tol = *a.tol;
  const VolumeMethod vm = parse_volume_method(a.method);
  const VolumeFn vol = volume_function(vm, qc);
  std::vector<std::string> kinds;
  if (a.bound == "both") {
    kinds = {"gv", "hamming"};
  } else if (a.bound == "gv" || a.bound == "hamming") {
    kinds = {a.bound};
  } else {
    throw ParameterError("unknown bound '" + a.bound + "'");
  }
  Outcome res;
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,p,q,bound,delta,method,size,bits\n";
  for (const auto& k : kinds) {
    const double size = k == "gv" ? gv_bound(params, a.delta, vol) : hamming_bound(params, a.delta, vol);
    const double bits = std::log2(size);
    csv << a.n << ',' << a.p << ',' << a.q << ',' << k << ',' << fmt(a.delta) << ',' << a.method
        << ',' << fmt(size) << ',' << fmt(bits) << "\n";
    rows.push_back({{"n", a.n}, {"p", a.p}, {"q", a.q}, {"bound", k}, {"delta", a.delta},
                    {"method", a.method}, {"size", size}, {"bits", bits}});
  }
  res.body = c.as_json ? json{{"command", "bounds"}, {"rows", rows}}.dump(2) + "\n" : csv.str();
  return res;
}

// ---------------------------------------------------------------- distortion

struct DistortionArgs {
  int n = 0, p = 0;
  std::string bits = "1:8";
  std::string method = "all";
  std::uint64_t samples = 20000;
  int trials = 4;
  int iters = 20;
  std::uint64_t seed = 1;
};

Outcome cmd_distortion(const DistortionArgs& a, const Common& c) {
  const Params params = Params::make(a.n, a.p, a.p);
  const auto [lo, hi] = parse_int_range(a.bits);
  if (lo < 0 || hi < lo || hi > 24) throw ParameterError("bits range must satisfy 0 <= lo <= hi <= 24");
  std::vector<DistortionMethod> methods;
  if (a.method == "all") {
    methods = {DistortionMethod::bound, DistortionMethod::random, DistortionMethod::lloyd};
  } else if (a.method == "bound") {
    methods = {DistortionMethod::bound};
  } else if (a.method == "random") {
    methods = {DistortionMethod::random};
  } else if (a.method == "lloyd") {
    methods = {DistortionMethod::lloyd};
  } else {
    throw ParameterError("unknown distortion method '" + a.method + "'");
  }
  if (a.samples < 1 || a.trials < 1 || a.iters < 0) throw ParameterError("invalid simulation sizes");

  struct Row {
    DistortionReport rep;
    bool clamped = false;
  };
  std::vector<Row> rows;
  std::map<std::uint64_t, double> best_sim;
  for (DistortionMethod m : methods) {
    for (int b = lo; b <= hi; ++b) {
      const std::uint64_t N = std::uint64_t{1} << b;
      Row row;
      if (m == DistortionMethod::bound) {
        const auto db = distortion_lower_bound_detailed(params, static_cast<double>(N));
        row.rep.N = N;
        row.rep.bits = b;
        row.rep.distortion = db.value;
        row.rep.method = m;
        row.clamped = db.clamped;
      } else if (m == DistortionMethod::random) {
        row.rep = random_code_distortion(params, N, a.samples, a.trials, a.seed, c.threads);
      } else {
        if (N > a.samples) throw ParameterError("Lloyd needs at least N training samples");
        row.rep = lloyd_quantizer(params, N, {a.samples, a.iters, a.seed, 0, c.threads}).report;
      }
      if (m != DistortionMethod::bound) {
        auto it = best_sim.find(N);
        if (it == best_sim.end() || row.rep.distortion < it->second) best_sim[N] = row.rep.distortion;
      }
      rows.push_back(std::move(row));
    }
  }

  // The bound is flagged invalid where it is known to fail: n = 2, the
  // clamped N = 1 branch, and wherever a simulated code in this run beats it.
  auto bound_valid = [&](const Row& r) {
    if (params.n == 2 || r.clamped) return false;
    const auto it = best_sim.find(r.rep.N);
    return it == best_sim.end() || r.rep.distortion <= it->second;
  };

  Outcome res;
  json jrows = json::array();
  std::ostringstream csv;
  csv << "N,bits,distortion,stderr,method,bound_valid\n";
  for (const auto& r : rows) {
    const bool is_bound = r.rep.method == DistortionMethod::bound;
    csv << r.rep.N << ',' << fmt(r.rep.bits) << ',' << fmt(r.rep.distortion) << ','
        << fmt(r.rep.stderr_) << ',' << distortion_method_name(r.rep.method) << ','
        << (is_bound ? (bound_valid(r) ? "true" : "false") : "") << "\n";
    json jr = {{"N", r.rep.N}, {"bits", r.rep.bits}, {"distortion", r.rep.distortion},
               {"stderr", r.rep.stderr_}, {"method", distortion_method_name(r.rep.method)}};
    if (is_bound) jr["bound_valid"] = bound_valid(r);
    if (r.rep.method == DistortionMethod::lloyd) jr["training_trajectory"] = r.rep.training_trajectory;
    jrows.push_back(std::move(jr));
  }
  res.body = c.as_json ? json{{"command", "distortion"}, {"n", a.n}, {"p", a.p}, {"rows", jrows}}.dump(2) + "\n"
                       : csv.str();
  return res;
}

// ---------------------------------------------------------------- hellinger

struct HellingerArgs {
  int a = 0, b = 0, pmax = 30;
};

Outcome cmd_hellinger(const HellingerArgs& h, const Common& c) {
  if (h.a < 0 || h.b < 0 || h.pmax < 1) throw ParameterError("need a, b >= 0 and pmax >= 1");
  Outcome res;
  json rows = json::array();
  std::ostringstream csv;
  csv << "p,a,b,H\n";
  for (int p = 1; p <= h.pmax; ++p) {
    const int n = 2 * p + h.a + h.b;
    const int q = p + h.a;
    if (q >= n) continue;  // only when a + b = 0 and p = q = n would be required
    const Params P = Params::make(n, p, q);
    const double H = hellinger_gaussians(rmt_surrogate(P), finite_surrogate(P));
    csv << p << ',' << h.a << ',' << h.b << ',' << fmt(H) << "\n";
    rows.push_back({{"p", p}, {"a", h.a}, {"b", h.b}, {"H", H}});
  }
  res.body = c.as_json ? json{{"command", "hellinger"}, {"rows", rows}}.dump(2) + "\n" : csv.str();
  return res;
}

// ---------------------------------------------------------------- driver

void add_common(CLI::App* sub, Common& c) {
  sub->add_flag("--json", c.as_json, "Emit JSON instead of CSV");
  sub->add_option("--out", c.out_path, "Write results to this file instead of stdout");
  sub->add_option("--manifest", c.manifest_path, "Write the run manifest here instead of stderr");
  sub->add_option("--threads", c.threads, "Worker threads for Monte Carlo and Lloyd (1 = bit-exact)")
      ->check(CLI::Range(1, 256));
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Drops output-routing options so a replay does not inherit them.
std::vector<std::string> strip_routing(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& s = args[i];
    if (s == "--out" || s == "--manifest" || s == "--replay") {
      ++i;
      continue;
    }
    if (s.rfind("--out=", 0) == 0 || s.rfind("--manifest=", 0) == 0 || s.rfind("--replay=", 0) == 0) continue;
    out.push_back(s);
  }
  return out;
}

int run_parsed(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               int depth);

int replay(const std::string& path, const std::vector<std::string>& extra, std::ostream& out,
           std::ostream& err, int depth) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot read manifest " << path << "\n";
    return kInvalid;
  }
  json m;
  try {
    in >> m;
  } catch (const std::exception& e) {
    err << "error: malformed manifest: " << e.what() << "\n";
    return kInvalid;
  }
  if (!m.contains("argv") || !m["argv"].is_array()) {
    err << "error: manifest has no argv\n";
    return kInvalid;
  }
  std::vector<std::string> args = strip_routing(m["argv"].get<std::vector<std::string>>());
  args.insert(args.end(), extra.begin(), extra.end());
  return run_parsed(args, out, err, depth + 1);
}

int run_parsed(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               int depth) {
  CLI::App app{"Normalized volumes of metric balls in complex Grassmannians"};
  app.set_version_flag("--version", version());
  std::string replay_path;
  std::string replay_out;
  std::string replay_manifest;
  app.add_option("--replay", replay_path, "Re-run the command recorded in a manifest file");
  app.add_option("--out", replay_out, "With --replay: write results here");
  app.add_option("--manifest", replay_manifest, "With --replay: write the new manifest here");
  app.require_subcommand(0, 1);

  Common common;
  VolumeArgs va;
  auto* vol = app.add_subcommand("volume", "Ball volume on a radius grid");
  vol->add_option("--n", va.n, "Ambient dimension")->required();
  vol->add_option("--p", va.p, "Center dimension")->required();
  vol->add_option("--q", va.q, "Ball element dimension")->required();
  vol->add_option("--r", va.r, "Single radius");
  vol->add_option("--grid", va.grid, "Radius grid lo:hi:steps");
  vol->add_option("--method", va.method, "quadrature|closed|rmt|finite|mc|all")
      ->check(CLI::IsMember({"quadrature", "closed", "rmt", "finite", "mc", "all"}));
  vol->add_option("--samples", va.samples, "Monte Carlo samples");
  vol->add_option("--seed", va.seed, "Monte Carlo seed");
  vol->add_option("--tol", va.tol, "Quadrature absolute and relative tolerance");
  vol->add_option("--panel-order", va.panel_order, "Gauss-Legendre nodes per panel");
  add_common(vol, common);

  BoundsArgs ba;
  auto* bnd = app.add_subcommand("bounds", "Gilbert-Varshamov / Hamming code-size bounds");
  bnd->add_option("--n", ba.n)->required();
  bnd->add_option("--p", ba.p)->required();
  bnd->add_option("--q", ba.q)->required();
  bnd->add_option("--delta", ba.delta, "Minimum distance")->required();
  bnd->add_option("--bound", ba.bound, "gv|hamming|both")->check(CLI::IsMember({"gv", "hamming", "both"}));
  bnd->add_option("--method", ba.method, "quadrature|closed|rmt|finite")
      ->check(CLI::IsMember({"quadrature", "closed", "rmt", "finite"}));
  bnd->add_option("--tol", ba.tol, "Quadrature tolerance");
  add_common(bnd, common);

  DistortionArgs da;
  auto* dis = app.add_subcommand("distortion", "Distortion versus rate, q = p");
  dis->add_option("--n", da.n)->required();
  dis->add_option("--p", da.p)->required();
  dis->add_option("--bits", da.bits, "Rate range lo:hi in bits; N = 2^bits");
  dis->add_option("--method", da.method, "bound|random|lloyd|all")
      ->check(CLI::IsMember({"bound", "random", "lloyd", "all"}));
  dis->add_option("--samples", da.samples, "Source / training samples");
  dis->add_option("--trials", da.trials, "Random codebooks per rate");
  dis->add_option("--iters", da.iters, "Lloyd iterations");
  dis->add_option("--seed", da.seed, "Seed");
  add_common(dis, common);

  HellingerArgs ha;
  auto* hel = app.add_subcommand("hellinger", "Hellinger distance between the Gaussian surrogates");
  hel->add_option("--a", ha.a, "q - p")->required();
  hel->add_option("--b", ha.b, "n - p - q")->required();
  hel->add_option("--pmax", ha.pmax, "Largest p");
  add_common(hel, common);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }

  if (!replay_path.empty()) {
    if (depth > 0) {
      err << "error: nested replay\n";
      return kInvalid;
    }
    std::vector<std::string> extra;
    if (!replay_out.empty()) extra = {"--out", replay_out};
    if (!replay_manifest.empty()) {
      extra.push_back("--manifest");
      extra.push_back(replay_manifest);
    }
    return replay(replay_path, extra, out, err, depth);
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kInvalid;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  Outcome res;
  std::string command = app.get_subcommands().front()->get_name();
  std::string error_text;
  try {
    if (command == "volume") res = cmd_volume(va, common);
    else if (command == "bounds") res = cmd_bounds(ba, common);
    else if (command == "distortion") res = cmd_distortion(da, common);
    else res = cmd_hellinger(ha, common);
  } catch (const ParameterError& e) {
    res.code = kInvalid;
    error_text = e.what();
  } catch (const NotTabulatedError& e) {
    res.code = kInvalid;
    error_text = e.what();
  } catch (const UnsupportedSizeError& e) {
    res.code = kInvalid;
    error_text = e.what();
  } catch (const AccuracyError& e) {
    res.code = kAccuracy;
    error_text = e.what();
    res.details["achieved_abs_err"] = e.achieved_tolerance();
  } catch (const std::exception& e) {
    res.code = kInternal;
    error_text = e.what();
  }
  if (!error_text.empty()) err << "error: " << error_text << "\n";

  if (!res.body.empty()) {
    if (common.out_path.empty()) {
      out << res.body;
    } else {
      std::ofstream f(common.out_path, std::ios::binary);
      if (!f) {
        err << "error: cannot write " << common.out_path << "\n";
        return kInvalid;
      }
      f << res.body;
    }
  }

  json options;
  if (command == "volume") {
    options = {{"n", va.n}, {"p", va.p}, {"q", va.q}, {"method", va.method}, {"samples", va.samples},
               {"seed", va.seed}, {"panel_order", va.panel_order}};
    options["r"] = va.r ? json(*va.r) : json(nullptr);
    options["grid"] = va.grid.empty() ? json(nullptr) : json(va.grid);
    options["tol"] = va.tol ? json(*va.tol) : json(nullptr);
  } else if (command == "bounds") {
    options = {{"n", ba.n}, {"p", ba.p}, {"q", ba.q}, {"delta", ba.delta}, {"bound", ba.bound},
               {"method", ba.method}};
    options["tol"] = ba.tol ? json(*ba.tol) : json(nullptr);
  } else if (command == "distortion") {
    options = {{"n", da.n}, {"p", da.p}, {"bits", da.bits}, {"method", da.method},
               {"samples", da.samples}, {"trials", da.trials}, {"iters", da.iters}, {"seed", da.seed}};
  } else {
    options = {{"a", ha.a}, {"b", ha.b}, {"pmax", ha.pmax}};
  }
  options["json"] = common.as_json;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"tool", "grassvol"},
                   {"version", version()},
                   {"command", command},
                   {"argv", args},
                   {"options", options},
                   {"threads", common.threads},
                   {"kernel_backend", std::string(kernels::backend_name(kernels::active_backend()))},
                   {"started_utc", started},
                   {"wall_clock_s", wall},
                   {"exit_code", res.code},
                   {"details", res.details}};
  if (!error_text.empty()) manifest["error"] = error_text;
  if (common.manifest_path.empty()) {
    err << manifest.dump() << "\n";
  } else {
    std::ofstream f(common.manifest_path);
    f << manifest.dump(2) << "\n";
  }
  return res.code;
}

}  // namespace

std::string version() { return GRASSVOL_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_parsed(args, out, err, 0);
}

}  // namespace grassvol::cli
