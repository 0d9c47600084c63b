#include "grassvol/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "grassvol/errors.hpp"

namespace grassvol {

namespace {

using Series = std::vector<Rational>;

Series mul(const Series& a, const Series& b, std::size_t len) {
  Series out(len, Rational(0));
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Series deriv(const Series& a) {
  Series out(a.size(), Rational(0));
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * static_cast<long long>(i);
  return out;
}

Series shift_up(const Series& a) {  // nu * a
  Series out(a.size(), Rational(0));
  for (std::size_t i = 0; i + 1 < a.size(); ++i) out[i + 1] = a[i];
  return out;
}

Series lin(const Series& a, const Rational& ca, const Series& b, const Rational& cb) {
  Series out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
  return out;
}

Rational pow2(int j) {
  Rational r = 1;
  for (int i = 0; i < j; ++i) r *= 2;
  return r;
}

Rational factorial(int k) {
  Rational r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// Coefficient of nu^order in the ODE residual
//   (2 nu s'')^2 - (s - nu s' + 2n s')^2 - 4 (s - nu s' - p(p+b)) ((2 s')^2 - 2a s')
// for the sigma built from `kappa` (kappa[j-1] = kappa_j).
Rational residual(const Params& P, const std::vector<Rational>& kappa, int order) {
  const std::size_t len = static_cast<std::size_t>(order + 3);
  const Rational pp = Rational(P.p) * (P.p + P.b());
  Series s(len, Rational(0));
  s[0] = pp;
  for (std::size_t j = 1; j <= kappa.size() && j < len; ++j) {
    const int jj = static_cast<int>(j);
    const Rational sign = (jj % 2) ? -1 : 1;
    s[j] += kappa[j - 1] * sign / (pow2(jj) * factorial(jj - 1));
  }
  s[1] -= Rational(P.p, 4);

  const Series s1 = deriv(s);
  const Series s2 = deriv(s1);
  const Series nus1 = shift_up(s1);
  const Series lhs_f = lin(shift_up(s2), 2, Series(len, Rational(0)), 0);
  const Series lhs = mul(lhs_f, lhs_f, len);

  Series t1 = lin(s, 1, nus1, -1);
  t1 = lin(t1, 1, s1, 2 * P.n);
  const Series rhs1 = mul(t1, t1, len);

  Series t2 = lin(s, 1, nus1, -1);
  t2[0] -= pp;
  const Series s1sq = mul(s1, s1, len);
  const Series t3 = lin(s1sq, 4, s1, -2 * P.a());
  const Series rhs2 = mul(t2, t3, len);

  const auto o = static_cast<std::size_t>(order);
  return lhs[o] - rhs1[o] - 4 * rhs2[o];
}

// Residual at `order` as a quadratic A x^2 + B x + C in kappa_k = x.
void quadratic_in(const Params& P, std::vector<Rational> kappa, std::size_t k_index, int order,
                  Rational& A, Rational& B, Rational& C) {
  kappa[k_index] = 0;
  C = residual(P, kappa, order);
  kappa[k_index] = 1;
  const Rational rp = residual(P, kappa, order);
  kappa[k_index] = -1;
  const Rational rm = residual(P, kappa, order);
  A = (rp + rm) / 2 - C;
  B = (rp - rm) / 2;
}

// Truncated power series inverse, a[0] != 0.
Series inverse(const Series& a) {
  Series out(a.size(), Rational(0));
  out[0] = 1 / a[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    Rational acc = 0;
    for (std::size_t j = 1; j <= k; ++j) acc += a[j] * out[k - j];
    out[k] = -acc / a[0];
  }
  return out;
}

// log(a) for a[0] = 1, from (log a)' = a' / a.
Series log_series(const Series& a) {
  const Series d = mul(deriv(a), inverse(a), a.size());
  Series out(a.size(), Rational(0));
  for (std::size_t k = 1; k < a.size(); ++k) out[k] = d[k - 1] / static_cast<long long>(k);
  return out;
}

// B(u, v) for positive integers.
Rational beta_int(int u, int v) { return factorial(u - 1) * factorial(v - 1) / factorial(u + v - 1); }

double erf_diff_half(double x_hi, double x_lo) {
  // 1/2 (erf(x_hi) - erf(x_lo)); use erfc on the same side to keep digits.
  if (x_lo >= 0.0) return 0.5 * (std::erfc(x_lo) - std::erfc(x_hi));
  if (x_hi <= 0.0) return 0.5 * (std::erfc(-x_hi) - std::erfc(-x_lo));
  return 0.5 * (std::erf(x_hi) - std::erf(x_lo));
}

double checked_t(const Params& c, double r) {
  if (!std::isfinite(r) || r < 0.0) throw ParameterError("radius must be finite and >= 0");
  const double t = r * r;
  if (t > max_radius_sq(c) + 1e-12) {
    throw ParameterError("r^2 = " + std::to_string(t) + " exceeds the largest squared distance " +
                         std::to_string(max_radius_sq(c)) + " for " + c.to_string());
  }
  return t;
}

}  // namespace

Cumulants ExactCumulants::to_double() const {
  return {grassvol::to_double(kappa1), grassvol::to_double(kappa2), grassvol::to_double(kappa3)};
}

ExactCumulants cumulants_closed_exact(const Params& params) {
  const Params c = canonicalize(params);
  const Rational n = c.n, p = c.p, q = c.q;
  ExactCumulants k;
  k.kappa1 = p * (n - 2 * q) / (2 * n);
  k.kappa2 = p * q * (n - p) * (n - q) / (n * n * (n * n - 1));
  const Rational den = n * n * n * (n * n * n * n - 5 * n * n + 4);
  // At n = 2 the denominator vanishes together with the factor (n - 2p).
  k.kappa3 = den == 0 ? Rational(0)
                      : -2 * p * q * (n - 2 * p) * (n - 2 * q) * (n - p) * (n - q) / den;
  return k;
}

Cumulants cumulants_closed(const Params& params) { return cumulants_closed_exact(params).to_double(); }

Rational mean_distance_sq_exact(const Params& params) {
  const Params c = canonicalize(params);
  return Rational(c.p) * (c.n - c.q) / c.n;
}

double mean_distance_sq(const Params& params) { return to_double(mean_distance_sq_exact(params)); }

std::vector<Rational> cumulants_taylor(const Params& params, int max_order) {
  if (max_order < 1 || max_order > kMaxCumulantOrder) {
    throw ParameterError("max_order must be in [1, " + std::to_string(kMaxCumulantOrder) + "]");
  }
  const Params P = canonicalize(params);
  if (P.p > kMaxTaylorP) {
    throw UnsupportedSizeError("Taylor cumulants support p <= " + std::to_string(kMaxTaylorP));
  }
  const int p = P.p, a = P.a(), b = P.b();
  const std::size_t len = static_cast<std::size_t>(max_order + 1);
  // Entry (i, j) as a series in s = -i nu: sum_m B(i+j+b+m+1, a+1) s^m / m!.
  std::vector<std::vector<Series>> M(static_cast<std::size_t>(p), std::vector<Series>(static_cast<std::size_t>(p)));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      Series e(len);
      for (std::size_t m = 0; m < len; ++m) {
        e[m] = beta_int(i + j + b + static_cast<int>(m) + 1, a + 1) / factorial(static_cast<int>(m));
      }
      M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(e);
    }
  }
  // M(0) is a positive definite Hankel matrix, so elimination needs no pivoting.
  Series det(len, Rational(0));
  det[0] = 1;
  for (std::size_t k = 0; k < M.size(); ++k) {
    det = mul(det, M[k][k], len);
    const Series inv = inverse(M[k][k]);
    for (std::size_t i = k + 1; i < M.size(); ++i) {
      const Series f = mul(M[i][k], inv, len);
      for (std::size_t j = k; j < M.size(); ++j) {
        const Series t = mul(f, M[k][j], len);
        for (std::size_t m = 0; m < len; ++m) M[i][j][m] -= t[m];
      }
    }
  }
  const Rational d0 = det[0];
  for (auto& c : det) c /= d0;
  const Series lg = log_series(det);
  std::vector<Rational> kappa(static_cast<std::size_t>(max_order));
  for (int j = 1; j <= max_order; ++j) kappa[static_cast<std::size_t>(j - 1)] = lg[static_cast<std::size_t>(j)] * factorial(j);
  kappa[0] -= Rational(p, 2);
  return kappa;
}

std::vector<Rational> cumulants_recursive(const Params& params, int max_order) {
  if (max_order < 1 || max_order > kMaxCumulantOrder) {
    throw ParameterError("max_order must be in [1, " + std::to_string(kMaxCumulantOrder) + "]");
  }
  const Params P = canonicalize(params);
  std::vector<Rational> kappa(static_cast<std::size_t>(max_order), Rational(0));
  Rational A, B, C;

  // Order 0: double root in kappa_1.
  quadratic_in(P, kappa, 0, 0, A, B, C);
  if (A == 0 || B * B - 4 * A * C != 0) {
    throw InvariantError("order-0 equation does not have a double root for " + P.to_string());
  }
  kappa[0] = -B / (2 * A);

  // Order 1 carries no information once kappa_1 is fixed.
  if (max_order >= 2) {
    std::vector<Rational> probe = kappa;
    for (const Rational& trial : {Rational(0), Rational(1), Rational(-3, 7)}) {
      probe[1] = trial;
      if (residual(P, probe, 1) != 0) {
        throw InvariantError("order-1 equation is not identically satisfied for " + P.to_string());
      }
    }
  }
  if (max_order == 1) return kappa;

  // Order 2: roots {0, kappa_2}; the variance is the nonzero one.
  quadratic_in(P, kappa, 1, 2, A, B, C);
  if (A == 0 || C != 0) {
    throw InvariantError("order-2 equation has an unexpected form for " + P.to_string());
  }
  kappa[1] = -B / A;

  for (int k = 3; k <= max_order; ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    quadratic_in(P, kappa, idx, k, A, B, C);
    if (A != 0) {
      throw InvariantError("order-" + std::to_string(k) + " equation is not linear for " +
                           P.to_string());
    }
    if (B == 0) {
      // The equation leaves kappa_k free (this happens at k = n + 1); take it
      // from the Taylor expansion of the determinant.
      if (C != 0) {
        throw InvariantError("order-" + std::to_string(k) + " equation is inconsistent for " +
                             P.to_string());
      }
      kappa[idx] = cumulants_taylor(P, k)[idx];
      continue;
    }
    kappa[idx] = -C / B;
  }
  return kappa;
}

double volume_rmt(const Params& params, double r) {
  const Params c = canonicalize(params);
  const double t = checked_t(c, r);
  const double alpha = (c.n + 2.0 * c.p - 2.0 * c.q) / 4.0;
  const double s = 2.0 * std::numbers::sqrt2;
  return erf_diff_half(s * alpha, s * (alpha - t));
}

double volume_finite(const Params& params, double r) {
  const Params c = canonicalize(params);
  const double t = checked_t(c, r);
  const double beta = mean_distance_sq(c);
  const double k2 = cumulants_closed(c).kappa2;
  const double s = std::sqrt(2.0 * k2);
  return erf_diff_half(beta / s, (beta - t) / s);
}

GaussianSurrogate rmt_surrogate(const Params& params) {
  const Params c = canonicalize(params);
  return {(c.n - 2.0 * c.q) / 4.0, 1.0 / 16.0, SurrogateKind::rmt};
}

GaussianSurrogate finite_surrogate(const Params& params) {
  const Cumulants k = cumulants_closed(params);
  return {k.kappa1, k.kappa2, SurrogateKind::finite};
}

double hellinger_gaussians(const GaussianSurrogate& s1, const GaussianSurrogate& s2) {
  if (!(s1.variance > 0.0) || !(s2.variance > 0.0)) {
    throw ParameterError("Hellinger distance needs positive variances");
  }
  const double sd1 = std::sqrt(s1.variance);
  const double sd2 = std::sqrt(s2.variance);
  const double sum = s1.variance + s2.variance;
  const double dm = s1.mean - s2.mean;
  // 1 - BC = (1 - r) / (1 + sqrt r) - sqrt(r) expm1(-x), with
  // r = 2 sd1 sd2 / sum and 1 - r = (sd1 - sd2)^2 / sum, avoids cancellation.
  const double r = 2.0 * sd1 * sd2 / sum;
  const double one_minus_r = (sd1 - sd2) * (sd1 - sd2) / sum;
  const double gap = one_minus_r / (1.0 + std::sqrt(r)) - std::sqrt(r) * std::expm1(-0.25 * dm * dm / sum);
  return std::sqrt(std::max(0.0, gap));
}

}  // namespace grassvol
