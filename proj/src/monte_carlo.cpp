#include "grassvol/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "grassvol/errors.hpp"
#include "grassvol/kernels.hpp"
#include "grassvol/random.hpp"
#include "grassvol/subspace.hpp"

namespace grassvol {

namespace {

void fill_distances(const Params& P, std::uint64_t seed, bool general, double* out,
                    std::uint64_t count) {
  HaarSampler sampler(P.n, P.q, seed);
  const auto& kt = kernels::active();
  const SubspaceBasis center = SubspaceBasis::leading(P.n, P.p);
  Eigen::MatrixXcd Q;
  for (std::uint64_t i = 0; i < count; ++i) {
    sampler.next(Q);
    if (general) {
      const Eigen::VectorXd c = principal_cosines(center, SubspaceBasis(Q));
      out[i] = std::max(0.0, std::min(P.p, P.q) - c.squaredNorm());
    } else {
      // With P0 = first p axes, P0^H Q is the top p rows of Q.
      double s = 0.0;
      for (int j = 0; j < P.q; ++j) {
        s += kt.sum_sq(reinterpret_cast<const double*>(Q.col(j).data()), 2 * static_cast<std::size_t>(P.p));
      }
      out[i] = std::max(0.0, std::min(P.p, P.q) - s);
    }
  }
}

void check_r_grid(const Params& c, const std::vector<double>& r_grid) {
  for (double r : r_grid) {
    if (!std::isfinite(r) || r < 0.0 || r * r > max_radius_sq(c) + 1e-12) {
      throw ParameterError("grid radius " + std::to_string(r) + " outside [0, sqrt(" +
                           std::to_string(max_radius_sq(c)) + ")]");
    }
  }
}

}  // namespace

std::vector<double> sample_distances_sq(const Params& params, std::uint64_t samples,
                                        std::uint64_t seed, int threads, bool general_path) {
  const Params c = canonicalize(params);
  if (threads < 1) throw ParameterError("threads must be >= 1");
  std::vector<double> d(samples);
  if (threads == 1 || samples < 2) {
    fill_distances(c, seed, general_path, d.data(), samples);
    return d;
  }
  const auto workers = static_cast<std::uint64_t>(threads);
  std::vector<std::thread> pool;
  std::uint64_t begin = 0;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t count = samples / workers + (w < samples % workers ? 1 : 0);
    pool.emplace_back(fill_distances, c, derive_seed(seed, w), general_path, d.data() + begin, count);
    begin += count;
  }
  for (auto& t : pool) t.join();
  return d;
}

std::vector<VolumeEstimate> estimate_volume(const Params& params, const std::vector<double>& r_grid,
                                            const MonteCarloOptions& opts) {
  const Params c = canonicalize(params);
  check_r_grid(c, r_grid);
  if (opts.samples < 1) throw ParameterError("samples must be >= 1");
  std::vector<double> d = sample_distances_sq(c, opts.samples, opts.seed, opts.threads);
  std::sort(d.begin(), d.end());
  const int tmax = max_radius_sq(c);
  std::vector<VolumeEstimate> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    const double t = r * r;
    // The full ball holds every sample even when rounding pushes d^2 above tmax.
    const auto hits = t >= tmax ? d.size()
                                : static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), t) - d.begin());
    const double mu = static_cast<double>(hits) / static_cast<double>(d.size());
    out.push_back({r, mu, std::sqrt(mu * (1.0 - mu) / static_cast<double>(d.size())), opts.samples,
                   opts.seed});
  }
  return out;
}

MomentEstimate empirical_moments(const Params& params, const MonteCarloOptions& opts) {
  if (opts.samples < 2) throw ParameterError("empirical_moments needs at least 2 samples");
  const std::vector<double> d = sample_distances_sq(params, opts.samples, opts.seed, opts.threads);
  // Welford in sample order; the order is fixed for a given thread count.
  double mean = 0.0, m2 = 0.0;
  std::uint64_t k = 0;
  for (double x : d) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  return {mean, m2 / static_cast<double>(k - 1), k};
}

}  // namespace grassvol
