#include "grassvol/jacobi.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "grassvol/errors.hpp"
#include "grassvol/special.hpp"

namespace grassvol {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Largest n for which the parts coefficients (up to (n-2)!) stay finite.
constexpr int kMaxExactN = 160;
// Entry expansions whose rounding bound exceeds this multiple of eps * B fall
// back to Gauss-Legendre.
constexpr double kEntryLossLimit = 64.0;

double factorial(int k) { return std::tgamma(static_cast<double>(k) + 1.0); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double beta_fn(int alpha, int beta) { return std::exp(special::log_beta(alpha, beta)); }

EntryValue entry_series(int alpha, int beta, double nu, double B) {
  const cplx step(0.0, -nu);
  cplx term = B;
  cplx sum = term;
  double abs_sum = B;
  for (int k = 0; k < 2000; ++k) {
    term *= step * (static_cast<double>(alpha + k) / (alpha + beta + k) / (k + 1.0));
    sum += term;
    const double at = std::abs(term);
    abs_sum += at;
    if (k > std::abs(nu) && at <= 1e-18 * abs_sum) break;
  }
  return {sum, 4.0 * kEps * abs_sum, EntryBranch::series};
}

EntryValue entry_parts(const PartsExpansion& pe, double nu) {
  const cplx w = 1.0 / cplx(0.0, nu);
  const cplx z = std::polar(1.0, -nu);
  cplx sum = 0.0;
  double abs_sum = 0.0;
  cplx wp = w;
  const double aw = std::abs(w);
  double awp = aw;
  for (std::size_t l = 0; l < pe.a.size(); ++l) {
    sum += (pe.a[l] - z * pe.b[l]) * wp;
    abs_sum += (std::abs(pe.a[l]) + std::abs(pe.b[l])) * awp;
    wp *= w;
    awp *= aw;
  }
  return {sum, 4.0 * kEps * abs_sum, EntryBranch::parts};
}

EntryValue entry_gauss(int alpha, int beta, double nu, double B) {
  const int K = alpha + beta - 2;
  const int order = static_cast<int>(std::ceil((K + 1) / 2.0 + std::abs(nu) / 2.0)) + 20;
  const auto& rule = special::gauss_legendre(order);
  cplx sum = 0.0;
  for (int i = 0; i < order; ++i) {
    const double x = 0.5 * (rule.nodes[static_cast<std::size_t>(i)] + 1.0);
    const double f = std::pow(x, alpha - 1) * std::pow(1.0 - x, beta - 1);
    sum += rule.weights[static_cast<std::size_t>(i)] * f * std::polar(1.0, -nu * x);
  }
  return {0.5 * sum, 8.0 * kEps * B, EntryBranch::gauss};
}

EntryValue entry_dispatch(int alpha, int beta, double nu, const PartsExpansion* pe) {
  const double B = beta_fn(alpha, beta);
  if (nu == 0.0) return {B, kEps * B, EntryBranch::series};
  EntryValue best{0.0, std::numeric_limits<double>::infinity(), EntryBranch::gauss};
  if (std::abs(nu) < alpha + beta + 40) best = entry_series(alpha, beta, nu, B);
  if (best.err_bound > kEntryLossLimit * kEps * B) {
    PartsExpansion local;
    if (pe == nullptr) {
      local = parts_expansion(alpha, beta);
      pe = &local;
    }
    const EntryValue parts = entry_parts(*pe, nu);
    if (std::isfinite(parts.err_bound) && parts.err_bound < best.err_bound) best = parts;
  }
  if (best.err_bound > kEntryLossLimit * kEps * B) best = entry_gauss(alpha, beta, nu, B);
  return best;
}

// Polynomial in w of the parts expansion without the boundary phase:
// A(w) = sum a_l w^{l+1}, Bp(w) = sum b_l w^{l+1}.
void parts_polynomials(const PartsExpansion& pe, cplx w, cplx& A, cplx& Bp) {
  A = 0.0;
  Bp = 0.0;
  for (std::size_t l = pe.a.size(); l-- > 0;) {
    A = (A + pe.a[l]) * w;
    Bp = (Bp + pe.b[l]) * w;
  }
}

}  // namespace

PartsExpansion parts_expansion(int alpha, int beta) {
  if (alpha < 1 || beta < 1) throw ParameterError("det_entry: alpha, beta must be >= 1");
  const int K = alpha + beta - 2;
  PartsExpansion pe;
  pe.a.assign(static_cast<std::size_t>(K + 1), 0.0);
  pe.b.assign(static_cast<std::size_t>(K + 1), 0.0);
  for (int l = 0; l <= K; ++l) {
    const int ja = l - alpha + 1;
    if (ja >= 0 && ja <= beta - 1) {
      pe.a[static_cast<std::size_t>(l)] = factorial(l) * binomial(beta - 1, ja) * (ja % 2 ? -1.0 : 1.0);
    }
    const int jb = l - beta + 1;
    if (jb >= 0 && jb <= alpha - 1) {
      const double sign = ((l + jb) % 2) ? -1.0 : 1.0;
      pe.b[static_cast<std::size_t>(l)] = sign * factorial(l) * binomial(alpha - 1, jb);
    }
  }
  return pe;
}

EntryValue det_entry_detailed(int alpha, int beta, double nu) {
  if (alpha < 1 || beta < 1) throw ParameterError("det_entry: alpha, beta must be >= 1");
  return entry_dispatch(alpha, beta, nu, nullptr);
}

cplx det_entry(int alpha, int beta, double nu) { return det_entry_detailed(alpha, beta, nu).value; }

double log_jacobi_normalization(const Params& params) {
  const int n = params.n, p = params.p, q = params.q;
  double acc = 0.0;
  for (int j = 1; j <= p; ++j) {
    acc += std::lgamma(n - j + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - q - j + 1.0) -
           std::lgamma(q - j + 1.0);
  }
  return acc;
}

JacobiDeterminant::JacobiDeterminant(const Params& params)
    : params_(Params::make(params.n, params.p, params.q)) {
  if (!params_.is_canonical()) {
    throw ParameterError("JacobiDeterminant needs canonical parameters, got " + params_.to_string());
  }
  if (params_.p > kMaxExactP) {
    throw UnsupportedSizeError("exact determinant supports p <= " + std::to_string(kMaxExactP) +
                               ", got p = " + std::to_string(params_.p));
  }
  if (params_.n > kMaxExactN) {
    throw UnsupportedSizeError("exact determinant supports n <= " + std::to_string(kMaxExactN));
  }
  p_ = params_.p;
  beta_ = params_.a() + 1;
  alpha0_ = params_.b() + 1;

  parts_.reserve(static_cast<std::size_t>(2 * p_ - 1));
  for (int s = 0; s < 2 * p_ - 1; ++s) parts_.push_back(parts_expansion(alpha0_ + s, beta_));

  Eigen::MatrixXcd m0(p_, p_);
  for (int i = 0; i < p_; ++i) {
    for (int j = 0; j < p_; ++j) m0(i, j) = beta_fn(alpha0_ + i + j, beta_);
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m0);
  det_m0_ = lu.determinant();
  const Eigen::MatrixXcd inv = lu.inverse();
  auto norm1 = [](const Eigen::MatrixXcd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); };
  cond_m0_ = norm1(m0) * norm1(inv);

  log_norm_defect_ = std::lgamma(p_ + 1.0) + log_jacobi_normalization(params_) +
                     std::log(std::abs(det_m0_));
  if (cond_m0_ * kEps < 1e-9 && std::abs(log_norm_defect_) > 1e-6) {
    throw InvariantError("determinant normalisation check failed for " + params_.to_string() +
                         ": log|p! v det M(0)| = " + std::to_string(log_norm_defect_));
  }

  // Parts expansion is trusted once its rounding bound is within the entry
  // loss limit for every distinct entry.
  double v = 1.0;
  for (;;) {
    bool ok = true;
    for (int s = 0; s < 2 * p_ - 1 && ok; ++s) {
      const double B = beta_fn(alpha0_ + s, beta_);
      const auto& pe = parts_[static_cast<std::size_t>(s)];
      double bound = 0.0;
      double vp = 1.0 / v;
      for (std::size_t l = 0; l < pe.a.size(); ++l) {
        bound += (std::abs(pe.a[l]) + std::abs(pe.b[l])) * vp;
        vp /= v;
      }
      ok = 4.0 * bound <= kEntryLossLimit * B;
    }
    if (ok) break;
    v *= 1.25;
  }
  parts_threshold_ = v;
}

cplx JacobiDeterminant::det_of_entries(const std::vector<cplx>& hankel) const {
  Eigen::MatrixXcd m(p_, p_);
  for (int i = 0; i < p_; ++i) {
    for (int j = 0; j < p_; ++j) m(i, j) = hankel[static_cast<std::size_t>(i + j)];
  }
  if (p_ == 1) return m(0, 0);
  if (p_ == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

cplx JacobiDeterminant::evaluate(double nu, double* err_bound) const {
  std::vector<cplx> h(static_cast<std::size_t>(2 * p_ - 1));
  double rel_entry_err = 0.0;
  for (int s = 0; s < 2 * p_ - 1; ++s) {
    const int alpha = alpha0_ + s;
    const EntryValue e = entry_dispatch(alpha, beta_, nu, &parts_[static_cast<std::size_t>(s)]);
    h[static_cast<std::size_t>(s)] = e.value;
    rel_entry_err = std::max(rel_entry_err, e.err_bound / beta_fn(alpha, beta_));
  }
  const cplx d = det_of_entries(h) / det_m0_;
  if (err_bound != nullptr) {
    *err_bound = cond_m0_ * (rel_entry_err + p_ * kEps) * std::max(1.0, std::abs(d));
  }
  return d;
}

cplx JacobiDeterminant::operator()(double nu) const { return evaluate(nu, nullptr); }

std::vector<cplx> JacobiDeterminant::frequency_components(cplx w) const {
  const int np = p_ + 1;
  std::vector<cplx> A(static_cast<std::size_t>(2 * p_ - 1));
  std::vector<cplx> Bp(A.size());
  for (std::size_t s = 0; s < A.size(); ++s) parts_polynomials(parts_[s], w, A[s], Bp[s]);

  std::vector<cplx> samples(static_cast<std::size_t>(np));
  std::vector<cplx> h(A.size());
  for (int j = 0; j < np; ++j) {
    const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * j / np);
    for (std::size_t s = 0; s < h.size(); ++s) h[s] = A[s] - z * Bp[s];
    samples[static_cast<std::size_t>(j)] = det_of_entries(h);
  }
  // det(A - z B) is a polynomial of degree p in z; recover its coefficients.
  std::vector<cplx> q(static_cast<std::size_t>(np));
  for (int k = 0; k < np; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j < np; ++j) {
      acc += samples[static_cast<std::size_t>(j)] *
             std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) * k / np);
    }
    q[static_cast<std::size_t>(k)] = acc / static_cast<double>(np) / det_m0_;
  }
  return q;
}

cplx JacobiDeterminant::evaluate_half_dimension_form(double nu) const {
  if (params_.p != params_.q || 2 * params_.p != params_.n) {
    throw ParameterError("half-dimension form needs p = q = n/2, got " + params_.to_string());
  }
  if (nu == 0.0) return 1.0;
  const cplx inu(0.0, nu);
  const cplx phase = std::polar(1.0, -nu);
  std::vector<cplx> e(static_cast<std::size_t>(2 * p_ - 1));
  for (int m = 0; m < 2 * p_ - 1; ++m) {
    // Gamma(m+1) (1 - e^{-i nu} sum_{k<=m} (i nu)^k / k!)
    cplx val;
    if (std::abs(nu) <= m + 10.0) {
      // Tail of the exponential series; avoids cancellation for small nu.
      cplx term = 1.0;
      for (int k = 1; k <= m; ++k) term *= inu / static_cast<double>(k);
      cplx tail = 0.0;
      for (int k = m + 1; k < m + 400; ++k) {
        term *= inu / static_cast<double>(k);
        tail += term;
        if (std::abs(term) <= 1e-18 * std::abs(tail)) break;
      }
      val = factorial(m) * phase * tail;
    } else {
      cplx partial = 0.0;
      cplx term = 1.0;
      for (int k = 0; k <= m; ++k) {
        if (k > 0) term *= inu / static_cast<double>(k);
        partial += term;
      }
      val = factorial(m) * (1.0 - phase * partial);
    }
    e[static_cast<std::size_t>(m)] = val;
  }
  const double log_pref = std::lgamma(p_ + 1.0) + log_jacobi_normalization(params_);
  return std::exp(log_pref) * det_of_entries(e) / std::pow(inu, p_ * p_);
}

}  // namespace grassvol
