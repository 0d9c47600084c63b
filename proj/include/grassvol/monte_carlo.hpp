#pragma once

#include <cstdint>
#include <vector>

#include "grassvol/params.hpp"

namespace grassvol {

struct VolumeEstimate {
  double r = 0.0;
  double mu_hat = 0.0;
  double stderr_ = 0.0;  // sqrt(mu_hat (1 - mu_hat) / samples)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct MonteCarloOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  /// 1 is the bit-exact reference path; more threads split the samples over
  /// derived seeds, which changes the stream but not the distribution.
  int threads = 1;
};

/// Fraction of Haar-random q-planes within distance r of a fixed p-plane,
/// for every r of the grid from a single sample sweep. Canonicalizes the triple.
std::vector<VolumeEstimate> estimate_volume(const Params& params, const std::vector<double>& r_grid,
                                            const MonteCarloOptions& opts);

struct MomentEstimate {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::uint64_t samples = 0;
};

/// Sample mean and variance of the squared chordal distance.
MomentEstimate empirical_moments(const Params& params, const MonteCarloOptions& opts);

/// Raw squared distances d_c^2(P0, Q_i) for P0 spanned by the first p axes.
/// `general_path` uses principal angles from the full overlap instead of the
/// leading-rows shortcut; both must agree to rounding.
std::vector<double> sample_distances_sq(const Params& params, std::uint64_t samples,
                                        std::uint64_t seed, int threads = 1,
                                        bool general_path = false);

}  // namespace grassvol
