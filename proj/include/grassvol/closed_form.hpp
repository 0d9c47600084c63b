#pragma once

#include <optional>
#include <vector>

#include "grassvol/params.hpp"
#include "grassvol/rational.hpp"

namespace grassvol {

/// Piecewise-polynomial ball volume as a function of t = r^2.
class ClosedFormVolume {
 public:
  struct Piece {
    int lo;  // t in [lo, hi]
    int hi;
    std::vector<Rational> coeffs;  // ascending powers of t
  };

  /// Tabulated triples (after canonicalization): (4,2,2), (5,2,2), (5,2,3),
  /// (6,2,2), (6,2,3), (6,3,3). Throws NotTabulatedError otherwise.
  static const ClosedFormVolume& lookup(const Params& params);
  static bool is_tabulated(const Params& params);
  static std::vector<Params> tabulated();

  const Params& params() const noexcept { return params_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  /// Exact value at rational t in [0, max t]. At integer breakpoints both
  /// adjacent pieces agree; the left one is used.
  Rational evaluate_exact(const Rational& t) const;
  double evaluate(double r) const;

  /// Largest |left - right| over interior breakpoints (zero for a valid table).
  Rational continuity_defect() const;

  struct Term {
    std::vector<Rational> poly;  // Q(t)
    int k;                       // breakpoint
    int e;                       // (t-k)^e
    int f;                       // |t-k|^f
  };
  ClosedFormVolume(Params params, std::vector<Rational> base, std::vector<Term> terms);

 private:
  Params params_;
  std::vector<Piece> pieces_;
};

/// Closed-form volume, canonicalizing the triple first.
double volume_closed_form(const Params& params, double r);

}  // namespace grassvol
