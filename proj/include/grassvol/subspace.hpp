#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "grassvol/random.hpp"
#include "json.hpp"

namespace grassvol {

/// A point of G(n, k): an n x k complex matrix with orthonormal columns.
/// Immutable after construction.
class SubspaceBasis {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Validates ||M^H M - I||_F <= kTolerance; throws ParameterError otherwise.
  explicit SubspaceBasis(Eigen::MatrixXcd matrix);

  /// Span of the given coordinate axes (0-based column indices of I_n).
  static SubspaceBasis coordinate(int n, const std::vector<int>& axes);
  /// Span of the first k coordinate axes.
  static SubspaceBasis leading(int n, int k);

  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  int n() const noexcept { return static_cast<int>(m_.rows()); }
  int k() const noexcept { return static_cast<int>(m_.cols()); }

  /// {n, k, re, im} with re/im in row-major order.
  nlohmann::json to_json() const;
  static SubspaceBasis from_json(const nlohmann::json& j);

 private:
  struct Unchecked {};
  SubspaceBasis(Eigen::MatrixXcd matrix, Unchecked) : m_(std::move(matrix)) {}
  friend class HaarSampler;

  Eigen::MatrixXcd m_;
};

/// Draws Haar-distributed points of G(n, k) from one generator stream.
/// Gaussian matrix, then Gram-Schmidt with one reorthogonalisation pass; the
/// implied triangular factor has a positive real diagonal.
class HaarSampler {
 public:
  HaarSampler(int n, int k, std::uint64_t seed);

  /// Overwrites `out` (resized to n x k) with the next sample.
  void next(Eigen::MatrixXcd& out);
  SubspaceBasis next();

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }

 private:
  int n_;
  int k_;
  Xoshiro256pp rng_;
};

SubspaceBasis sample_haar(int n, int k, std::uint64_t seed);

/// Principal angles in [0, pi/2], ascending; length min(p, q).
std::vector<double> principal_angles(const SubspaceBasis& P, const SubspaceBasis& Q);

/// Singular values of P^H Q clamped to [0, 1], descending.
Eigen::VectorXd principal_cosines(const SubspaceBasis& P, const SubspaceBasis& Q);

enum class DistanceVariant { dc, dc_sharp, dc_star, dc_fivepointed };

/// Squared chordal distance. With S = ||P^H Q||_F^2:
///   dc             min(p,q) - S
///   dc_sharp       max(p,q) - S
///   dc_star        p + q - 2S   (= ||PP^H - QQ^H||_F^2)
///   dc_fivepointed K1 - K2 S    (distance between detraced, rescaled projectors)
double chordal_distance_sq(const SubspaceBasis& P, const SubspaceBasis& Q,
                           DistanceVariant variant = DistanceVariant::dc);

/// Squared distance for S = ||P^H Q||_F^2 already known.
double chordal_distance_sq_from_overlap(double S, int n, int p, int q, DistanceVariant variant);

/// Basis of the orthogonal complement, n x (n - k).
SubspaceBasis orthogonal_complement(const SubspaceBasis& P);

/// Real vector v of length n^2 with v(P) . v(Q) = tr(PP^H QQ^H) = ||P^H Q||_F^2.
/// Layout: diagonal of PP^H, then sqrt(2) Re and sqrt(2) Im of the strict
/// upper triangle in row-major order.
std::vector<double> projector_embedding(const SubspaceBasis& P);
void projector_embedding(const Eigen::MatrixXcd& P, double* out);

/// Inverse of projector_embedding for an arbitrary real vector: the Hermitian
/// n x n matrix whose embedding is v.
Eigen::MatrixXcd hermitian_from_embedding(const double* v, int n);

}  // namespace grassvol
