#include "grassvol/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "grassvol/errors.hpp"
#include "grassvol/kernels.hpp"

namespace grassvol {

namespace {

double orthonormality_defect(const Eigen::MatrixXcd& m) {
  const auto k = m.cols();
  return (m.adjoint() * m - Eigen::MatrixXcd::Identity(k, k)).norm();
}

void require_same_ambient(const SubspaceBasis& P, const SubspaceBasis& Q) {
  if (P.n() != Q.n()) {
    throw ParameterError("ambient dimension mismatch: " + std::to_string(P.n()) + " vs " +
                         std::to_string(Q.n()));
  }
}

}  // namespace

SubspaceBasis::SubspaceBasis(Eigen::MatrixXcd matrix) : m_(std::move(matrix)) {
  if (m_.rows() < 1 || m_.cols() < 1 || m_.cols() > m_.rows()) {
    throw ParameterError("subspace basis must be n x k with 1 <= k <= n");
  }
  const double defect = orthonormality_defect(m_);
  if (!(defect <= kTolerance)) {
    throw ParameterError("basis is not semi-unitary: ||M^H M - I||_F = " + std::to_string(defect));
  }
}

SubspaceBasis SubspaceBasis::coordinate(int n, const std::vector<int>& axes) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    if (axes[j] < 0 || axes[j] >= n) throw ParameterError("coordinate axis out of range");
    m(axes[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return SubspaceBasis(std::move(m));
}

SubspaceBasis SubspaceBasis::leading(int n, int k) {
  if (n < 1 || k < 1 || k > n) throw ParameterError("need 1 <= k <= n");
  return SubspaceBasis(Eigen::MatrixXcd::Identity(n, k), Unchecked{});
}

nlohmann::json SubspaceBasis::to_json() const {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m_.size()));
  im.reserve(static_cast<std::size_t>(m_.size()));
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      re.push_back(m_(i, j).real());
      im.push_back(m_(i, j).imag());
    }
  }
  return {{"n", n()}, {"k", k()}, {"re", re}, {"im", im}};
}

SubspaceBasis SubspaceBasis::from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int k = j.at("k").get<int>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (n < 1 || k < 1 || re.size() != static_cast<std::size_t>(n) * k || im.size() != re.size()) {
    throw ParameterError("malformed subspace JSON");
  }
  Eigen::MatrixXcd m(n, k);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < k; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * k + c;
      m(r, c) = {re[idx], im[idx]};
    }
  }
  return SubspaceBasis(std::move(m));
}

HaarSampler::HaarSampler(int n, int k, std::uint64_t seed) : n_(n), k_(k), rng_(seed) {
  if (n < 1 || k < 1 || k > n) {
    throw ParameterError("sample_haar: need 1 <= k <= n, got n=" + std::to_string(n) +
                         ", k=" + std::to_string(k));
  }
}

void HaarSampler::next(Eigen::MatrixXcd& out) {
  out.resize(n_, k_);
  for (int j = 0; j < k_; ++j) {
    for (int i = 0; i < n_; ++i) out(i, j) = rng_.complex_normal();
  }
  const auto& kt = kernels::active();
  const auto len = static_cast<std::size_t>(n_);
  for (int j = 0; j < k_; ++j) {
    auto* v = reinterpret_cast<double*>(out.col(j).data());
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const auto* u = reinterpret_cast<const double*>(out.col(i).data());
        kt.caxpy_sub(kt.cdot(u, v, len), u, v, len);
      }
    }
    const double norm = std::sqrt(kt.sum_sq(v, 2 * len));
    // A Gaussian column lies in the span of the previous ones with probability 0.
    if (!(norm > 0.0)) throw InvariantError("degenerate Gaussian sample in Haar sampler");
    out.col(j) /= norm;
  }
}

SubspaceBasis HaarSampler::next() {
  Eigen::MatrixXcd m;
  next(m);
  return SubspaceBasis(std::move(m), SubspaceBasis::Unchecked{});
}

SubspaceBasis sample_haar(int n, int k, std::uint64_t seed) { return HaarSampler(n, k, seed).next(); }

Eigen::VectorXd principal_cosines(const SubspaceBasis& P, const SubspaceBasis& Q) {
  require_same_ambient(P, Q);
  const Eigen::MatrixXcd overlap = P.matrix().adjoint() * Q.matrix();
  Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(overlap).singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::clamp(s(i), 0.0, 1.0);
  return s;
}

std::vector<double> principal_angles(const SubspaceBasis& P, const SubspaceBasis& Q) {
  const Eigen::VectorXd c = principal_cosines(P, Q);
  std::vector<double> angles(static_cast<std::size_t>(c.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) angles[static_cast<std::size_t>(i)] = std::acos(c(i));
  std::sort(angles.begin(), angles.end());
  return angles;
}

double chordal_distance_sq_from_overlap(double S, int n, int p, int q, DistanceVariant variant) {
  switch (variant) {
    case DistanceVariant::dc:
      return std::max(0.0, std::min(p, q) - S);
    case DistanceVariant::dc_sharp:
      return std::max(0.0, std::max(p, q) - S);
    case DistanceVariant::dc_star:
      return std::max(0.0, p + q - 2.0 * S);
    case DistanceVariant::dc_fivepointed: {
      if (p >= n || q >= n) {
        throw ParameterError("dc_fivepointed is undefined when p = n or q = n");
      }
      const double pq = static_cast<double>(p) * q;
      const double co = static_cast<double>(n - p) * (n - q);
      const double k1 = 2.0 + 2.0 * std::sqrt(pq / co);
      const double k2 = 2.0 * n / std::sqrt(pq * co);
      return std::max(0.0, k1 - k2 * S);
    }
  }
  throw ParameterError("unknown distance variant");
}

double chordal_distance_sq(const SubspaceBasis& P, const SubspaceBasis& Q, DistanceVariant variant) {
  require_same_ambient(P, Q);
  // ||P^H Q||_F^2 is the sum of squared singular values; no SVD needed.
  const double S = (P.matrix().adjoint() * Q.matrix()).squaredNorm();
  return chordal_distance_sq_from_overlap(S, P.n(), P.k(), Q.k(), variant);
}

SubspaceBasis orthogonal_complement(const SubspaceBasis& P) {
  const int n = P.n();
  const int k = P.k();
  if (k >= n) throw ParameterError("orthogonal complement of the whole space is empty");
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(P.matrix());
  Eigen::MatrixXcd full = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  return SubspaceBasis(full.rightCols(n - k));
}

void projector_embedding(const Eigen::MatrixXcd& P, double* out) {
  const auto n = P.rows();
  const Eigen::MatrixXcd proj = P * P.adjoint();
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < n; ++i) out[idx++] = proj(i, i).real();
  const std::size_t upper = static_cast<std::size_t>(n * (n - 1) / 2);
  std::size_t u = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++u) {
      out[idx + u] = std::numbers::sqrt2 * proj(i, j).real();
      out[idx + upper + u] = std::numbers::sqrt2 * proj(i, j).imag();
    }
  }
}

std::vector<double> projector_embedding(const SubspaceBasis& P) {
  std::vector<double> v(static_cast<std::size_t>(P.n()) * P.n());
  projector_embedding(P.matrix(), v.data());
  return v;
}

Eigen::MatrixXcd hermitian_from_embedding(const double* v, int n) {
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = v[i];
  const std::size_t upper = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::size_t u = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++u) {
      const std::complex<double> z(v[n + u], v[n + upper + u]);
      h(i, j) = z / std::numbers::sqrt2;
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

}  // namespace grassvol
