// Acceptance suite: one status line per criterion. Exit status is nonzero
// only when some criterion prints FAIL.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "grassvol/asymptotic.hpp"
#include "grassvol/closed_form.hpp"
#include "grassvol/coding.hpp"
#include "grassvol/jacobi.hpp"
#include "grassvol/monte_carlo.hpp"
#include "grassvol/quadrature.hpp"
#include "grassvol/subspace.hpp"
#include "grassvol/volume.hpp"

using namespace grassvol;

namespace {

enum class Status { pass, fail, unattainable };

struct Line {
  int id;
  Status status;
  std::string title;
  std::string detail;
};

std::vector<Line> g_lines;

void report(int id, Status s, const std::string& title, const std::string& detail) {
  const char* tag = s == Status::pass ? "PASS" : s == Status::fail ? "FAIL" : "UNATTAINABLE";
  std::printf("[%s] criterion %d: %s | %s\n", tag, id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  g_lines.push_back({id, s, title, detail});
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> radius_grid(const Params& prm, int points) {
  std::vector<double> g;
  const double rmax = std::sqrt(double(max_radius_sq(prm)));
  for (int i = 0; i < points; ++i) g.push_back(rmax * i / (points - 1));
  return g;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const Params& prm : ClosedFormVolume::tabulated()) {
    for (double r : radius_grid(prm, 21)) {
      worst = std::max(worst, std::abs(volume_quadrature(prm, r) - volume_closed_form(prm, r)));
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-6 && secs <= 60 ? Status::pass : Status::fail,
         "closed form vs quadrature on 21-point grids, six triples",
         fmt("max |diff| = %.3g (limit 1e-6), %.1f s (limit 60 s)", worst, secs));
}

void criterion2() {
  const Params prm = Params::make(8, 4, 4);
  const double mu = volume_quadrature(prm, 1.0);
  // Exact value of the ball volume from the simplex integral of the
  // eigenvalue density (rational arithmetic, computed offline).
  const double exact = 1.0 / 24024.0;
  const double bits = std::log2(gv_bound(prm, 1.0, volume_function(VolumeMethod::quadrature)));
  const bool literal = std::abs(mu - 4.2e-7) <= 0.05 * 4.2e-7;
  const bool percent_reading = std::abs(mu - 4.2e-5) <= 0.05 * 4.2e-5;
  const bool bits_ok = std::abs(bits - 14.5) <= 0.1;
  const bool exact_ok = std::abs(mu - exact) <= 1e-10;
  const std::string detail =
      fmt("mu = %.10g (exact 1/24024 = %.10g); target 4.2e-7 +-5%%: %s; 4.2e-5 +-5%%: %s; "
          "GV bits = %.4f (14.5 +- 0.1): %s",
          mu, exact, literal ? "met" : "not met", percent_reading ? "met" : "not met", bits,
          bits_ok ? "met" : "not met");
  Status s = Status::fail;
  if (literal && bits_ok) {
    s = Status::pass;
  } else if (!literal && exact_ok && percent_reading && bits_ok) {
    // 4.2e-7 contradicts both the exact value and the quoted 14.5 bits
    // (1/4.2e-7 is 21.2 bits), so only the consistent reading can be met.
    s = Status::unattainable;
  }
  report(2, s, "small ball at (8,4,4), r = 1, and its GV size", detail);
}

void criterion3() {
  const auto& cf = ClosedFormVolume::lookup(Params::make(4, 2, 2));
  const Rational half = rat(1, 2);
  auto lower = [&](const Rational& t) { return half * t * t * t * t; };
  auto upper = [&](const Rational& t) {
    const Rational u = 2 - t;
    return Rational(1 - half * u * u * u * u);
  };
  bool ok = true;
  std::string detail;
  const std::pair<const char*, Rational> pts[] = {
      {"0.5", rat(1, 4)}, {"1", rat(1)}, {"1.2", rat(36, 25)}, {"sqrt2", rat(2)}};
  for (const auto& [name, t] : pts) {
    const Rational got = cf.evaluate_exact(t);
    const Rational want = t <= 1 ? lower(t) : upper(t);
    ok = ok && got == want;
    detail += std::string(name) + " -> " + to_string(got) + (got == want ? " ok; " : " MISMATCH; ");
  }
  const bool cont = lower(rat(1)) == half && upper(rat(1)) == half && cf.evaluate_exact(rat(1)) == half;
  ok = ok && cont && cf.continuity_defect() == 0;
  detail += std::string("both branches at r=1 give 1/2: ") + (cont ? "yes" : "no");
  report(3, ok ? Status::pass : Status::fail, "(4,2,2) piecewise law, exact rational evaluation", detail);
}

void criterion4() {
  const VolumeFn quad = volume_function(VolumeMethod::quadrature);
  double sym = 0.0;
  for (auto [a, b] : {std::pair{Params::make(5, 2, 2), Params::make(5, 2, 3)},
                      std::pair{Params::make(6, 2, 2), Params::make(6, 2, 4)}}) {
    for (int i = 0; i <= 10; ++i) {
      const double r = std::sqrt(double(a.p)) * i / 10.0;
      const double lhs = quad(a, r);
      const double rhs = 1.0 - quad(b, std::sqrt(std::max(0.0, a.p - r * r)));
      sym = std::max(sym, std::abs(lhs - rhs));
    }
  }
  double comp = 0.0;
  std::uint64_t seed = 1;
  for (const Params& prm : {Params::make(4, 2, 2), Params::make(5, 2, 2), Params::make(5, 2, 3),
                            Params::make(6, 2, 2), Params::make(6, 2, 4), Params::make(6, 2, 3),
                            Params::make(6, 3, 3), Params::make(8, 4, 4)}) {
    for (int k = 0; k < 100; ++k) {
      const auto P = sample_haar(prm.n, prm.p, seed++);
      const auto Q = sample_haar(prm.n, prm.q, seed++);
      const double s = chordal_distance_sq(P, Q) + chordal_distance_sq(P, orthogonal_complement(Q));
      comp = std::max(comp, std::abs(s - prm.p));
    }
  }
  report(4, sym <= 1e-6 && comp <= 1e-10 ? Status::pass : Status::fail,
         "complement symmetry of volumes and of distances",
         fmt("volume residual %.3g (limit 1e-6); distance residual %.3g over 800 pairs (limit 1e-10)",
             sym, comp));
}

// Direct two-dimensional composite Simpson integration of the Jacobi
// partition function, normalized by its value at nu = 0.
std::complex<double> simpson_partition(const Params& prm, double nu, int m) {
  const int a = prm.q - prm.p, b = prm.n - prm.p - prm.q;
  const double h = 1.0 / m;
  std::vector<double> x(m + 1), w(m + 1), wt(m + 1);
  std::vector<std::complex<double>> ph(m + 1);
  for (int i = 0; i <= m; ++i) {
    x[i] = i * h;
    w[i] = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    wt[i] = std::pow(x[i], b) * std::pow(1.0 - x[i], a);
    ph[i] = std::exp(std::complex<double>(0.0, -nu * x[i]));
  }
  std::complex<double> num = 0.0;
  double den = 0.0;
  for (int i = 0; i <= m; ++i) {
    std::complex<double> rnum = 0.0;
    double rden = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double d = x[i] - x[j];
      const double f = w[j] * wt[j] * d * d;
      rnum += f * ph[j];
      rden += f;
    }
    num += w[i] * wt[i] * ph[i] * rnum;
    den += w[i] * wt[i] * rden;
  }
  return num / den;
}

void criterion5() {
  double worst = 0.0;
  for (const Params& prm : {Params::make(4, 2, 2), Params::make(5, 2, 3)}) {
    const JacobiDeterminant D(prm);
    for (double nu : {0.5, 1.0, 5.0, 20.0}) {
      worst = std::max(worst, std::abs(D(nu) - simpson_partition(prm, nu, 2000)));
    }
  }
  report(5, worst <= 1e-6 ? Status::pass : Status::fail,
         "determinant vs direct 2-D integration, (4,2,2) and (5,2,3)",
         fmt("max |diff| = %.3g over nu in {0.5, 1, 5, 20} (limit 1e-6)", worst));
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  int triples = 0, mismatches = 0;
  for (int n = 2; n <= 12; ++n) {
    for (int p = 1; 2 * p <= n; ++p) {
      for (int q = p; p + q <= n; ++q) {
        const Params prm = Params::make(n, p, q);
        const auto rec = cumulants_recursive(prm, 3);
        const auto cl = cumulants_closed_exact(prm);
        if (rec[0] != cl.kappa1 || rec[1] != cl.kappa2 || rec[2] != cl.kappa3) ++mismatches;
        ++triples;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(6, mismatches == 0 && secs <= 10 ? Status::pass : Status::fail,
         "cumulant recursion equals closed forms exactly, n <= 12",
         fmt("%d triples, %d mismatches, %.2f s (limit 10 s)", triples, mismatches, secs));
}

void criterion7() {
  const auto c = cumulants_closed_exact(Params::make(200, 100, 100));
  const double v = to_double(c.kappa2);
  const bool lim = c.kappa1 == 0 && std::abs(v - 1.0 / 16) <= 2e-6;
  std::vector<double> H;
  for (int p : {5, 10, 20, 30}) {
    const Params prm = Params::make(2 * p + 6, p, p + 3);
    H.push_back(hellinger_gaussians(rmt_surrogate(prm), finite_surrogate(prm)));
  }
  bool dec = true;
  for (std::size_t i = 1; i < H.size(); ++i) dec = dec && H[i] < H[i - 1];
  report(7, lim && dec ? Status::pass : Status::fail, "large-dimension limits and Hellinger trend",
         fmt("p=100, a=b=0: kappa1 = %s, V[Y] = %.9f; H(a=b=3) at p=5,10,20,30: %.5f %.5f %.5f %.5f",
             to_string(c.kappa1).c_str(), v, H[0], H[1], H[2], H[3]));
}

void criterion8() {
  bool ok = true;
  std::string detail;
  for (const Params& prm : {Params::make(6, 3, 3), Params::make(8, 4, 4)}) {
    const JacobiDeterminant det(prm);
    double e_fin = 0.0, e_rmt = 0.0;
    for (double r : radius_grid(prm, 41)) {
      const double exact = volume_quadrature_detailed(det, r).mu;
      e_fin = std::max(e_fin, std::abs(volume_finite(prm, r) - exact));
      e_rmt = std::max(e_rmt, std::abs(volume_rmt(prm, r) - exact));
    }
    ok = ok && e_fin < e_rmt;
    if (prm.n == 8) ok = ok && e_fin <= 0.02;
    detail += fmt("%s finite %.4f vs rmt %.4f; ", prm.to_string().c_str(), e_fin, e_rmt);
  }
  report(8, ok ? Status::pass : Status::fail, "finite-size approximation beats the RMT limit",
         detail + "limit 0.02 for (8,4,4)");
}

void criterion9() {
  MonteCarloOptions o;
  o.samples = 100000;
  o.seed = 1;
  int points = 0, outside = 0;
  double worst_z = 0.0;
  for (const Params& prm : ClosedFormVolume::tabulated()) {
    const JacobiDeterminant det(prm);
    for (const auto& e : estimate_volume(prm, radius_grid(prm, 21), o)) {
      const double exact = volume_quadrature_detailed(det, e.r).mu;
      // Use the larger of the estimated and the true binomial standard error
      // so that empty or full bins with tiny exact mass are not judged on 0.
      const double se = std::max(e.stderr_, std::sqrt(exact * (1 - exact) / double(o.samples)));
      const double diff = std::abs(e.mu_hat - exact);
      ++points;
      if (diff > 3 * se + 1e-12) ++outside;
      if (se > 0) worst_z = std::max(worst_z, diff / se);
    }
  }
  std::string detail = fmt("%d grid points, %d outside 3 sigma (max %.2f sigma); ", points, outside, worst_z);
  bool ok = outside == 0;
  const struct {
    Params prm;
    double mean, var;
  } mom[] = {{Params::make(4, 2, 2), 1.0, 1.0 / 15}, {Params::make(5, 2, 3), 0.8, 0.06}};
  for (const auto& m : mom) {
    const auto d = sample_distances_sq(m.prm, 1000000, 2);
    double s1 = 0, s2 = 0;
    for (double x : d) s1 += x;
    const double mean = s1 / d.size();
    double m4 = 0;
    for (double x : d) {
      s2 += (x - mean) * (x - mean);
      m4 += std::pow(x - mean, 4);
    }
    const double var = s2 / (d.size() - 1);
    m4 /= d.size();
    const double zm = std::abs(mean - m.mean) / std::sqrt(m.var / d.size());
    const double zv = std::abs(var - m.var) / std::sqrt((m4 - var * var) / d.size());
    ok = ok && zm <= 3 && zv <= 3;
    detail += fmt("%s mean %.5f (%.2f sigma) var %.5f (%.2f sigma); ", m.prm.to_string().c_str(), mean, zm,
                  var, zv);
  }
  report(9, ok ? Status::pass : Status::fail, "Monte Carlo agrees with exact volumes and moments", detail);
}

void criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  const Params prm = Params::make(8, 4, 4);
  bool ok = true;
  std::string detail;
  for (std::uint64_t N : {4, 16, 64, 256}) {
    const double bound = distortion_lower_bound(prm, double(N));
    LloydOptions o;
    o.training_samples = 20000;
    o.iterations = 30;
    o.seed = 1;
    const auto l = lloyd_quantizer(prm, N, o);
    const auto r = random_code_distortion(prm, N, 20000, 4, 1);
    const auto& t = l.report.training_trajectory;
    bool mono = true;
    for (std::size_t i = 1; i < t.size(); ++i) mono = mono && t[i] <= t[i - 1];
    const bool order = bound <= l.report.distortion && l.report.distortion <= r.distortion + 3 * r.stderr_;
    ok = ok && mono && order;
    detail += fmt("N=%llu bound %.4f lloyd %.4f random %.4f+-%.4f%s; ", (unsigned long long)N, bound,
                  l.report.distortion, r.distortion, r.stderr_, mono ? "" : " (trajectory increased)");
  }
  const Params tiny = Params::make(2, 1, 1);
  for (std::uint64_t N : {2, 4}) {
    LloydOptions o;
    o.training_samples = 20000;
    o.seed = 1;
    const double sim = lloyd_quantizer(tiny, N, o).report.distortion;
    const double bound = distortion_lower_bound(tiny, double(N));
    ok = ok && bound > sim;
    detail += fmt("(2,1,1) N=%llu bound %.4f > lloyd %.4f; ", (unsigned long long)N, bound, sim);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs <= 300;
  report(10, ok ? Status::pass : Status::fail, "distortion ordering and the small-case violation",
         detail + fmt("%.1f s (limit 300 s)", secs));
}

void criterion11() {
  const auto dir = std::filesystem::temp_directory_path() / "grassvol_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> args = {"volume", "--n", "5", "--p", "2", "--q", "3", "--grid",
                                         "0:1.4142:15", "--method", "all", "--samples", "20000", "--seed", "7"};
  auto run_once = [&](std::vector<std::string> a, const std::string& tag) {
    a.insert(a.end(), {"--out", (dir / (tag + ".csv")).string(), "--manifest", (dir / (tag + ".json")).string()});
    std::ostringstream out, err;
    const int code = cli::run(a, out, err);
    std::ifstream f(dir / (tag + ".csv"), std::ios::binary);
    return std::pair{code, std::string(std::istreambuf_iterator<char>(f), {})};
  };
  const auto a = run_once(args, "a");
  const auto b = run_once(args, "b");
  std::ostringstream out, err;
  const int rc = cli::run({"--replay", (dir / "a.json").string(), "--out", (dir / "c.csv").string(),
                           "--manifest", (dir / "c.json").string()},
                          out, err);
  std::ifstream f(dir / "c.csv", std::ios::binary);
  const std::string c(std::istreambuf_iterator<char>(f), {});
  std::filesystem::remove_all(dir);
  const bool ok = a.first == 0 && b.first == 0 && rc == 0 && !a.second.empty() && a.second == b.second &&
                  a.second == c;
  report(11, ok ? Status::pass : Status::fail, "repeated and replayed CLI runs are byte-identical",
         fmt("%zu bytes; rerun %s; replay %s", a.second.size(), a.second == b.second ? "identical" : "differs",
             a.second == c ? "identical" : "differs"));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), Status::fail, "exception", e.what());
    }
  }
  int fails = 0, unattainable = 0;
  for (const auto& l : g_lines) {
    fails += l.status == Status::fail;
    unattainable += l.status == Status::unattainable;
  }
  std::printf("summary: %zu criteria, %d failed, %d unattainable as stated\n", g_lines.size(), fails,
              unattainable);
  return fails == 0 ? 0 : 1;
}
