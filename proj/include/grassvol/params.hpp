#pragma once

#include <string>

namespace grassvol {

/// Dimension triple for a ball of q-dimensional subspaces around a
/// p-dimensional center in C^n.
struct Params {
  int n = 0;
  int p = 0;
  int q = 0;

  /// Validates 1 <= p, q <= n-1 and returns the triple.
  static Params make(int n, int p, int q);

  int m() const noexcept { return p < q ? p : q; }
  /// Jacobi exponent on (1-x); equals q-p.
  int a() const noexcept { return q - p; }
  /// Jacobi exponent on x; equals n-p-q.
  int b() const noexcept { return n - p - q; }

  bool is_canonical() const noexcept { return p <= q && p + q <= n; }

  std::string to_string() const;

  friend bool operator==(const Params&, const Params&) = default;
};

/// Maps a triple to the representative with p <= q and p + q <= n. The
/// complement (n-p, n-q) is applied first when p + q > n, then (p, q) is
/// swapped when p > q. Ball volumes are invariant under both moves.
Params canonicalize(const Params& params);

/// Square of the largest chordal distance, min(p, q, n-p, n-q).
int max_radius_sq(const Params& params);

/// Riemannian volume of G(n, q) under the chordal metric normalisation,
/// pi^{q(n-q)} prod_{i=1}^{q} (q-i)!/(n-i)!.
double grassmannian_volume(int n, int q);

/// Natural log of grassmannian_volume; usable where the value itself
/// over- or underflows.
double log_grassmannian_volume(int n, int q);

}  // namespace grassvol
