#include "grassvol/coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "grassvol/errors.hpp"
#include "grassvol/kernels.hpp"
#include "grassvol/random.hpp"
#include "grassvol/special.hpp"

namespace grassvol {

namespace {

constexpr std::uint64_t kHoldoutSalt = 0x9E3779B97F4A7C15ULL;

std::size_t emb_len(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

// Splits [0, total) into `parts` contiguous ranges, larger ones first.
std::pair<std::uint64_t, std::uint64_t> chunk(std::uint64_t total, int parts, int index) {
  const auto P = static_cast<std::uint64_t>(parts);
  const auto i = static_cast<std::uint64_t>(index);
  const std::uint64_t base = total / P, extra = total % P;
  const std::uint64_t begin = i * base + std::min(i, extra);
  return {begin, begin + base + (i < extra ? 1 : 0)};
}

template <class Fn>
void run_workers(int threads, Fn&& fn) {
  if (threads <= 1) {
    fn(0);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(fn, w);
  for (auto& t : pool) t.join();
}

// Sum of min distances from `count` Haar q-planes drawn from `seed`.
void distortion_sum(const Codebook& code, int q, std::uint64_t count, std::uint64_t seed,
                    double& sum, double& sum_sq) {
  HaarSampler sampler(code.n(), q, seed);
  std::vector<double> emb(emb_len(code.n()));
  std::vector<double> scratch(code.size());
  Eigen::MatrixXcd Q;
  sum = 0.0;
  sum_sq = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    sampler.next(Q);
    projector_embedding(Q, emb.data());
    const double d = quantize_embedded(code, emb.data(), q, scratch.data()).distance_sq;
    sum += d;
    sum_sq += d * d;
  }
}

void check_threads(int threads) {
  if (threads < 1) throw ParameterError("threads must be >= 1");
}

}  // namespace

Codebook::Codebook(std::vector<SubspaceBasis> codewords) : codewords_(std::move(codewords)) {
  if (codewords_.empty()) throw ParameterError("codebook must contain at least one codeword");
  n_ = codewords_.front().n();
  p_ = codewords_.front().k();
  const std::size_t L = emb_len(n_);
  emb_.resize(codewords_.size() * L);
  for (std::size_t i = 0; i < codewords_.size(); ++i) {
    if (codewords_[i].n() != n_ || codewords_[i].k() != p_) {
      throw ParameterError("codewords must share (n, p)");
    }
    projector_embedding(codewords_[i].matrix(), emb_.data() + i * L);
  }
}

nlohmann::json Codebook::to_json(const nlohmann::json& metadata) const {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& c : codewords_) words.push_back(c.to_json());
  return {{"n", n_}, {"p", p_}, {"N", codewords_.size()}, {"metadata", metadata}, {"codewords", words}};
}

Codebook Codebook::from_json(const nlohmann::json& j) {
  std::vector<SubspaceBasis> words;
  for (const auto& w : j.at("codewords")) words.push_back(SubspaceBasis::from_json(w));
  Codebook code(std::move(words));
  if (j.contains("n") && j.at("n").get<int>() != code.n()) throw ParameterError("codebook n mismatch");
  if (j.contains("p") && j.at("p").get<int>() != code.p()) throw ParameterError("codebook p mismatch");
  return code;
}

Assignment quantize_embedded(const Codebook& code, const double* embedding, int q, double* scratch) {
  const std::size_t L = emb_len(code.n());
  kernels::active().dot_rows(code.embeddings().data(), code.size(), L, embedding, scratch);
  std::size_t best = 0;
  for (std::size_t k = 1; k < code.size(); ++k) {
    if (scratch[k] > scratch[best]) best = k;
  }
  return {best, std::max(0.0, std::min(code.p(), q) - scratch[best])};
}

std::size_t quantize(const Codebook& code, const SubspaceBasis& Q) {
  if (Q.n() != code.n()) throw ParameterError("source and codebook ambient dimensions differ");
  const std::vector<double> emb = projector_embedding(Q);
  std::vector<double> scratch(code.size());
  return quantize_embedded(code, emb.data(), Q.k(), scratch.data()).index;
}

double gv_bound(const Params& params, double delta, const VolumeFn& volume) {
  if (params.p != params.q) throw ParameterError("packing bounds need p = q");
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  const double mu = volume(params, delta);
  return mu > 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity();
}

double hamming_bound(const Params& params, double delta, const VolumeFn& volume) {
  if (params.p != params.q) throw ParameterError("packing bounds need p = q");
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  const double half = std::min(0.5 * delta, std::sqrt(static_cast<double>(max_radius_sq(params))));
  const double mu = volume(params, half);
  return mu > 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity();
}

DistortionBound distortion_lower_bound_detailed(const Params& params, double N) {
  if (!(N >= 1.0) || !std::isfinite(N)) throw ParameterError("N must be a finite value >= 1");
  const Params cp = canonicalize(Params::make(params.n, params.p, params.q));
  const double n = cp.n, p = cp.p, q = cp.q;
  const double beta = p * (n - q) / n;
  const double k2 = p * q * (n - p) * (n - q) / (n * n * (n * n - 1.0));
  const double x0 = beta / std::sqrt(2.0 * k2);
  // erfinv(erf(x0) - 2/N) = erfcinv(erfc(x0) + 2/N), which keeps digits when
  // erf(x0) is close to 1.
  const double c = std::erfc(x0) + 2.0 / N;
  bool clamped = false;
  double first = 0.0;
  if (c < 2.0) {
    const double y = special::erfcinv(c);
    first = std::exp(-y * y);
  } else {
    clamped = true;
  }
  const double value = beta - N * std::sqrt(k2 / (2.0 * std::numbers::pi)) * (first - std::exp(-x0 * x0));
  return {std::max(0.0, value), clamped};
}

double distortion_lower_bound(const Params& params, double N) {
  return distortion_lower_bound_detailed(params, N).value;
}

std::string distortion_method_name(DistortionMethod m) {
  switch (m) {
    case DistortionMethod::bound:
      return "bound";
    case DistortionMethod::random:
      return "random";
    case DistortionMethod::lloyd:
      return "lloyd";
  }
  return "unknown";
}

double code_distortion(const Codebook& code, int q, std::uint64_t samples, std::uint64_t seed,
                       double* stderr_out) {
  if (samples < 1) throw ParameterError("samples must be >= 1");
  double sum = 0.0, sum_sq = 0.0;
  distortion_sum(code, q, samples, seed, sum, sum_sq);
  const double s = static_cast<double>(samples);
  const double mean = sum / s;
  if (stderr_out != nullptr) {
    const double var = samples > 1 ? std::max(0.0, (sum_sq - s * mean * mean) / (s - 1.0)) : 0.0;
    *stderr_out = std::sqrt(var / s);
  }
  return mean;
}

DistortionReport random_code_distortion(const Params& params, std::uint64_t N,
                                        std::uint64_t source_samples, int trials,
                                        std::uint64_t seed, int threads) {
  const Params P = Params::make(params.n, params.p, params.q);
  if (N < 1 || source_samples < 1 || trials < 1) {
    throw ParameterError("N, source_samples and trials must be >= 1");
  }
  check_threads(threads);
  std::vector<double> trial_means;
  double pooled_sum = 0.0, pooled_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    HaarSampler cw(P.n, P.p, derive_seed(seed, 2 * static_cast<std::uint64_t>(t)));
    std::vector<SubspaceBasis> words;
    words.reserve(N);
    for (std::uint64_t k = 0; k < N; ++k) words.push_back(cw.next());
    const Codebook code(std::move(words));
    const std::uint64_t source_seed = derive_seed(seed, 2 * static_cast<std::uint64_t>(t) + 1);

    std::vector<double> sums(static_cast<std::size_t>(threads)), sqs(sums.size());
    run_workers(threads, [&](int w) {
      const auto [b, e] = chunk(source_samples, threads, w);
      const std::uint64_t s = threads == 1 ? source_seed : derive_seed(source_seed, static_cast<std::uint64_t>(w));
      distortion_sum(code, P.q, e - b, s, sums[static_cast<std::size_t>(w)], sqs[static_cast<std::size_t>(w)]);
    });
    const double sum = std::accumulate(sums.begin(), sums.end(), 0.0);
    pooled_sum += sum;
    pooled_sq += std::accumulate(sqs.begin(), sqs.end(), 0.0);
    trial_means.push_back(sum / static_cast<double>(source_samples));
  }
  DistortionReport rep;
  rep.N = N;
  rep.bits = std::log2(static_cast<double>(N));
  rep.method = DistortionMethod::random;
  rep.samples = source_samples;
  rep.trials = trials;
  rep.seed = seed;
  const double mean = std::accumulate(trial_means.begin(), trial_means.end(), 0.0) / trials;
  rep.distortion = mean;
  if (trials > 1) {
    double v = 0.0;
    for (double m : trial_means) v += (m - mean) * (m - mean);
    rep.stderr_ = std::sqrt(v / (trials - 1) / trials);
  } else {
    const double s = static_cast<double>(source_samples);
    const double var = s > 1 ? std::max(0.0, (pooled_sq - s * mean * mean) / (s - 1.0)) : 0.0;
    rep.stderr_ = std::sqrt(var / s);
  }
  return rep;
}

SubspaceBasis chordal_centroid(const std::vector<double>& summed_embedding, int n, int p) {
  const Eigen::MatrixXcd S = hermitian_from_embedding(summed_embedding.data(), n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
  if (es.info() != Eigen::Success) throw InvariantError("eigendecomposition failed in centroid update");
  // Eigenvalues ascend; keep the p largest, largest first.
  Eigen::MatrixXcd basis(n, p);
  for (int j = 0; j < p; ++j) basis.col(j) = es.eigenvectors().col(n - 1 - j);
  return SubspaceBasis(std::move(basis));
}

LloydResult lloyd_quantizer(const Params& params, std::uint64_t N, const LloydOptions& opts) {
  const Params P = Params::make(params.n, params.p, params.q);
  if (P.p != P.q) {
    throw ParameterError("Lloyd quantizer is implemented for q = p only");
  }
  if (N < 1) throw ParameterError("N must be >= 1");
  if (opts.training_samples < N) throw ParameterError("need at least N training samples");
  if (opts.iterations < 0) throw ParameterError("iterations must be >= 0");
  check_threads(opts.threads);

  const int n = P.n, p = P.p;
  const std::size_t L = emb_len(n);
  const std::uint64_t T = opts.training_samples;

  std::vector<SubspaceBasis> training;
  training.reserve(T);
  std::vector<double> train_emb(T * L);
  {
    HaarSampler sampler(n, p, derive_seed(opts.seed, 0));
    for (std::uint64_t i = 0; i < T; ++i) {
      training.push_back(sampler.next());
      projector_embedding(training.back().matrix(), train_emb.data() + i * L);
    }
  }

  std::vector<SubspaceBasis> words(training.begin(), training.begin() + static_cast<std::ptrdiff_t>(N));
  Codebook code(words);

  std::vector<std::size_t> assign(T);
  std::vector<double> dist(T);
  const int threads = opts.threads;
  struct Acc {
    std::vector<double> sums;
    std::vector<std::uint64_t> counts;
    double distortion = 0.0;
  };
  std::vector<Acc> acc(static_cast<std::size_t>(threads));

  DistortionReport rep;
  rep.N = N;
  rep.bits = std::log2(static_cast<double>(N));
  rep.method = DistortionMethod::lloyd;
  rep.samples = T;
  rep.trials = 1;
  rep.seed = opts.seed;

  std::vector<std::size_t> prev_assign;
  int iter = 0;
  for (;; ++iter) {
    run_workers(threads, [&](int w) {
      Acc& a = acc[static_cast<std::size_t>(w)];
      a.sums.assign(N * L, 0.0);
      a.counts.assign(N, 0);
      a.distortion = 0.0;
      std::vector<double> scratch(N);
      const auto [b, e] = chunk(T, threads, w);
      for (std::uint64_t i = b; i < e; ++i) {
        const double* x = train_emb.data() + i * L;
        const Assignment as = quantize_embedded(code, x, p, scratch.data());
        assign[i] = as.index;
        dist[i] = as.distance_sq;
        a.distortion += as.distance_sq;
        ++a.counts[as.index];
        double* dst = a.sums.data() + as.index * L;
        for (std::size_t k = 0; k < L; ++k) dst[k] += x[k];
      }
    });
    // Merge in worker order so the result depends only on the thread count.
    for (int w = 1; w < threads; ++w) {
      Acc& a = acc[static_cast<std::size_t>(w)];
      for (std::size_t k = 0; k < N * L; ++k) acc[0].sums[k] += a.sums[k];
      for (std::size_t k = 0; k < N; ++k) acc[0].counts[k] += a.counts[k];
      acc[0].distortion += a.distortion;
    }
    rep.training_trajectory.push_back(acc[0].distortion / static_cast<double>(T));
    if (iter == opts.iterations) break;
    if (!prev_assign.empty() && prev_assign == assign &&
        std::find(acc[0].counts.begin(), acc[0].counts.end(), 0u) == acc[0].counts.end()) {
      break;  // fixed point: further updates reproduce the same codebook
    }
    prev_assign = assign;

    // Empty cells take the training points farthest from their codewords.
    std::vector<std::uint64_t> order;
    for (std::size_t k = 0; k < N; ++k) {
      if (acc[0].counts[k] != 0) {
        std::vector<double> cell(acc[0].sums.begin() + static_cast<std::ptrdiff_t>(k * L),
                                 acc[0].sums.begin() + static_cast<std::ptrdiff_t>((k + 1) * L));
        words[k] = chordal_centroid(cell, n, p);
        continue;
      }
      if (order.empty()) {
        order.resize(T);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint64_t x, std::uint64_t y) { return dist[x] > dist[y]; });
        order.erase(order.begin() + static_cast<std::ptrdiff_t>(std::min<std::uint64_t>(T, N)),
                    order.end());
        std::reverse(order.begin(), order.end());
      }
      words[k] = training[order.back()];
      order.pop_back();
    }
    code = Codebook(words);
  }
  rep.iterations = iter;

  const std::uint64_t holdout = opts.holdout_samples ? opts.holdout_samples : T;
  double se = 0.0;
  rep.distortion = code_distortion(code, p, holdout, opts.seed ^ kHoldoutSalt, &se);
  rep.stderr_ = se;
  return {std::move(code), std::move(rep)};
}

std::vector<CdfPoint> error_cdf(const Codebook& code, const std::vector<double>& z_grid,
                                std::uint64_t samples, std::uint64_t seed, int q) {
  if (q == 0) q = code.p();
  if (q < 1 || q >= code.n()) throw ParameterError("source dimension must be in [1, n-1]");
  if (samples < 1) throw ParameterError("samples must be >= 1");
  const double zmax = std::min(code.p(), q);
  for (double z : z_grid) {
    if (!(z >= 0.0) || z > zmax + 1e-12) throw ParameterError("z outside [0, min(p, q)]");
  }
  HaarSampler sampler(code.n(), q, seed);
  std::vector<double> emb(emb_len(code.n()));
  std::vector<double> scratch(code.size());
  std::vector<double> d(samples);
  Eigen::MatrixXcd Q;
  for (std::uint64_t i = 0; i < samples; ++i) {
    sampler.next(Q);
    projector_embedding(Q, emb.data());
    d[i] = quantize_embedded(code, emb.data(), q, scratch.data()).distance_sq;
  }
  std::sort(d.begin(), d.end());
  std::vector<CdfPoint> out;
  for (double z : z_grid) {
    const auto hits = z >= zmax ? d.size()
                                : static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), z) - d.begin());
    const double F = static_cast<double>(hits) / static_cast<double>(samples);
    out.push_back({z, F, std::sqrt(F * (1.0 - F) / static_cast<double>(samples))});
  }
  return out;
}

}  // namespace grassvol
