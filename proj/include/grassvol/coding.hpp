#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grassvol/params.hpp"
#include "grassvol/subspace.hpp"
#include "grassvol/volume.hpp"
#include "json.hpp"

namespace grassvol {

/// Ordered codewords in G(n, p) with their projector embeddings.
class Codebook {
 public:
  explicit Codebook(std::vector<SubspaceBasis> codewords);

  int n() const noexcept { return n_; }
  int p() const noexcept { return p_; }
  std::size_t size() const noexcept { return codewords_.size(); }
  const std::vector<SubspaceBasis>& codewords() const noexcept { return codewords_; }
  /// Row-major size() x n^2 matrix of projector embeddings.
  const std::vector<double>& embeddings() const noexcept { return emb_; }

  /// Metadata is copied verbatim into the JSON document.
  nlohmann::json to_json(const nlohmann::json& metadata = nlohmann::json::object()) const;
  static Codebook from_json(const nlohmann::json& j);

 private:
  int n_;
  int p_;
  std::vector<SubspaceBasis> codewords_;
  std::vector<double> emb_;
};

/// Index of the nearest codeword under d_c; the lowest index wins ties.
std::size_t quantize(const Codebook& code, const SubspaceBasis& Q);

/// Nearest index and squared distance for an embedded source of dimension q.
struct Assignment {
  std::size_t index;
  double distance_sq;
};
Assignment quantize_embedded(const Codebook& code, const double* embedding, int q,
                             double* scratch);

/// Lower bound 1/mu(B(delta)) on the size of a code with minimum distance
/// delta (p = q). Returns +infinity when the ball has zero volume.
double gv_bound(const Params& params, double delta, const VolumeFn& volume);
/// Upper bound 1/mu(B(delta/2)).
double hamming_bound(const Params& params, double delta, const VolumeFn& volume);

struct DistortionBound {
  double value;
  /// True when erfinv's argument fell to -1 or below and its term was set to 0.
  bool clamped;
};

/// beta - N sqrt(k2/(2 pi)) (exp(-erfinv(t)^2) - exp(-beta^2/(2 k2))),
/// t = erf(beta/sqrt(2 k2)) - 2/N. Real N >= 1 is accepted.
DistortionBound distortion_lower_bound_detailed(const Params& params, double N);
double distortion_lower_bound(const Params& params, double N);

enum class DistortionMethod { bound, random, lloyd };
std::string distortion_method_name(DistortionMethod m);

struct DistortionReport {
  std::uint64_t N = 1;
  double bits = 0.0;
  double distortion = 0.0;
  /// Standard error of `distortion` (0 for the bound).
  double stderr_ = 0.0;
  DistortionMethod method = DistortionMethod::bound;
  std::uint64_t samples = 0;
  int trials = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  /// Training distortion after each Lloyd iteration (first entry: initial code).
  std::vector<double> training_trajectory;
};

/// Mean over `trials` Haar codebooks (dimension p) of the average distance
/// from `source_samples` Haar sources (dimension q) to the nearest codeword.
DistortionReport random_code_distortion(const Params& params, std::uint64_t N,
                                        std::uint64_t source_samples, int trials,
                                        std::uint64_t seed, int threads = 1);

struct LloydOptions {
  std::uint64_t training_samples = 20000;
  int iterations = 30;
  std::uint64_t seed = 1;
  /// Fresh samples for the reported distortion; 0 means training_samples.
  std::uint64_t holdout_samples = 0;
  int threads = 1;
};

struct LloydResult {
  Codebook codebook;
  DistortionReport report;  // distortion is the held-out value
};

/// Lloyd iteration on a fixed Haar training set (q = p only). Centroid of a
/// cell: span of the top p eigenvectors of the summed projectors.
LloydResult lloyd_quantizer(const Params& params, std::uint64_t N, const LloydOptions& opts);

/// Centroid of a set of p-planes given as summed embeddings.
SubspaceBasis chordal_centroid(const std::vector<double>& summed_embedding, int n, int p);

/// Average squared distance from `samples` Haar q-planes to their nearest codeword.
double code_distortion(const Codebook& code, int q, std::uint64_t samples, std::uint64_t seed,
                       double* stderr_out = nullptr);

struct CdfPoint {
  double z;
  double F;
  double stderr_;
};

/// Empirical CDF of the quantization error min_k d_c^2(C_k, Q) over Haar
/// q-planes Q (q defaults to the codeword dimension).
std::vector<CdfPoint> error_cdf(const Codebook& code, const std::vector<double>& z_grid,
                                std::uint64_t samples, std::uint64_t seed, int q = 0);

}  // namespace grassvol
