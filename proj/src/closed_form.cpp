#include "grassvol/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "grassvol/errors.hpp"

namespace grassvol {

namespace {

using Poly = std::vector<Rational>;

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

void add_into(Poly& acc, const Poly& x) {
  if (acc.size() < x.size()) acc.resize(x.size(), Rational(0));
  for (std::size_t i = 0; i < x.size(); ++i) acc[i] += x[i];
}

Rational horner(const Poly& c, const Rational& t) {
  Rational acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

Poly P(std::initializer_list<Rational> c) { return Poly(c); }

std::map<std::tuple<int, int, int>, ClosedFormVolume> build_table() {
  using T = ClosedFormVolume::Term;
  std::map<std::tuple<int, int, int>, ClosedFormVolume> table;
  auto add = [&](int n, int p, int q, Poly base, std::vector<T> terms) {
    table.emplace(std::make_tuple(n, p, q),
                  ClosedFormVolume(Params::make(n, p, q), std::move(base), std::move(terms)));
  };

  add(4, 2, 2, P({rat(-7, 2), 8, -6, 2}), {T{P({rat(-7, 2), 1, rat(-1, 2)}), 1, 3, -1}});

  add(5, 2, 2, P({rat(17, 2), rat(-144, 5), 36, -20, rat(9, 2)}),
      {T{P({rat(-17, 2), rat(33, 10), rat(-3, 5), rat(-1, 5)}), 1, 4, -1}});

  add(5, 2, 3, P({rat(-59, 10), rat(96, 5), -24, 16, rat(-9, 2)}),
      {T{P({rat(59, 10), rat(-3, 2), rat(9, 5), rat(-1, 5)}), 1, 0, 3}});

  add(6, 2, 2, P({rat(-31, 2), rat(480, 7), -120, 104, -45, 8}),
      {T{P({rat(-31, 2), rat(46, 7), rat(-5, 7), rat(-2, 7), rat(-1, 14)}), 1, 5, -1}});

  add(6, 2, 3, P({rat(263, 14), rat(-576, 7), 144, -128, 60, -12}),
      {T{P({rat(263, 14), rat(-50, 7), rat(19, 7), rat(6, 7), rat(-3, 14)}), 1, 5, -1}});

  add(6, 3, 3,
      P({rat(-6547, 28), rat(19683, 28), rat(-6561, 7), 729, rat(-729, 2), rat(243, 2), -27,
         rat(27, 7), rat(-9, 28), rat(1, 42)}),
      {T{P({6}), 1, 7, -1}, T{P({-9}), 1, 0, 5}, T{P({rat(-18, 7)}), 1, 0, 7},
       T{P({rat(-1, 28)}), 1, 0, 9}, T{P({6}), 2, 7, -1}, T{P({9}), 2, 0, 5},
       T{P({rat(18, 7)}), 2, 0, 7}, T{P({rat(1, 28)}), 2, 0, 9}});
  return table;
}

const std::map<std::tuple<int, int, int>, ClosedFormVolume>& table() {
  static const auto t = build_table();
  return t;
}

}  // namespace

ClosedFormVolume::ClosedFormVolume(Params params, std::vector<Rational> base, std::vector<Term> terms)
    : params_(params) {
  const int tmax = max_radius_sq(params_);
  for (int lo = 0; lo < tmax; ++lo) {
    Poly acc = base;
    for (const auto& term : terms) {
      // On (lo, lo+1), |t-k| = s (t-k) with s = +-1, so the term is
      // Q(t) s^f (t-k)^{e+f}.
      const int s = lo >= term.k ? 1 : -1;
      const int power = term.e + term.f;
      if (power < 0) throw InvariantError("closed-form term with negative net power");
      Poly shifted{Rational(1)};
      for (int i = 0; i < power; ++i) shifted = mul(shifted, Poly{Rational(-term.k), Rational(1)});
      Poly piece = mul(term.poly, shifted);
      if (s < 0 && (std::abs(term.f) % 2 == 1)) {
        for (auto& c : piece) c = -c;
      }
      add_into(acc, piece);
    }
    while (acc.size() > 1 && acc.back() == 0) acc.pop_back();
    pieces_.push_back(Piece{lo, lo + 1, std::move(acc)});
  }
}

const ClosedFormVolume& ClosedFormVolume::lookup(const Params& params) {
  const Params c = canonicalize(params);
  const auto it = table().find({c.n, c.p, c.q});
  if (it == table().end()) {
    throw NotTabulatedError("no closed form tabulated for " + c.to_string());
  }
  return it->second;
}

bool ClosedFormVolume::is_tabulated(const Params& params) {
  const Params c = canonicalize(params);
  return table().count({c.n, c.p, c.q}) != 0;
}

std::vector<Params> ClosedFormVolume::tabulated() {
  std::vector<Params> out;
  for (const auto& [key, value] : table()) out.push_back(value.params());
  return out;
}

Rational ClosedFormVolume::evaluate_exact(const Rational& t) const {
  const int tmax = max_radius_sq(params_);
  if (t < 0 || t > tmax) {
    throw ParameterError("r^2 outside [0, " + std::to_string(tmax) + "] for " + params_.to_string());
  }
  for (const auto& piece : pieces_) {
    if (t <= piece.hi) return horner(piece.coeffs, t);
  }
  return horner(pieces_.back().coeffs, t);
}

double ClosedFormVolume::evaluate(double r) const {
  if (!std::isfinite(r) || r < 0.0) throw ParameterError("radius must be finite and >= 0");
  const double t = r * r;
  const int tmax = max_radius_sq(params_);
  if (t > tmax + 1e-12) {
    throw ParameterError("r^2 = " + std::to_string(t) + " exceeds the largest squared distance " +
                         std::to_string(tmax) + " for " + params_.to_string());
  }
  if (t >= tmax) return 1.0;
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(t), pieces_.size() - 1);
  // Exact evaluation at the binary value of t; the pieces cancel heavily in
  // floating point near t = 0.
  return std::clamp(to_double(horner(pieces_[idx].coeffs, Rational(t))), 0.0, 1.0);
}

Rational ClosedFormVolume::continuity_defect() const {
  Rational worst = 0;
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
    const Rational at = pieces_[i].hi;
    const Rational d = abs(horner(pieces_[i].coeffs, at) - horner(pieces_[i + 1].coeffs, at));
    if (d > worst) worst = d;
  }
  return worst;
}

double volume_closed_form(const Params& params, double r) {
  const Params c = canonicalize(params);
  return ClosedFormVolume::lookup(c).evaluate(r);
}

}  // namespace grassvol
