#include <cmath>
#include <vector>

#include "doctest.h"
#include "grassvol/closed_form.hpp"
#include "grassvol/errors.hpp"
#include "grassvol/quadrature.hpp"
#include "grassvol/volume.hpp"

using namespace grassvol;

namespace {

std::vector<Params> canonical_triples(int max_n) {
  std::vector<Params> out;
  for (int n = 2; n <= max_n; ++n) {
    for (int p = 1; 2 * p <= n; ++p) {
      for (int q = p; p + q <= n; ++q) out.push_back(Params::make(n, p, q));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("quadrature reproduces the (4,2,2) piecewise law") {
  const Params prm = Params::make(4, 2, 2);
  CHECK(volume_quadrature(prm, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(volume_quadrature(prm, std::sqrt(2.0)) == 1.0);
  CHECK(volume_quadrature(prm, std::sqrt(1.5)) == doctest::Approx(0.96875).epsilon(1e-9));
  CHECK(volume_quadrature(prm, 0.5) == doctest::Approx(1.0 / 512).epsilon(1e-6));
  CHECK(volume_quadrature(prm, 0.0) == 0.0);
  for (double r = 0.05; r < 1.0; r += 0.1) {
    CHECK(std::abs(volume_quadrature(prm, r) - 0.5 * std::pow(r, 8)) <= 1e-9);
  }
}

TEST_CASE("quadrature matches tabulated closed forms") {
  for (const Params& prm : ClosedFormVolume::tabulated()) {
    CAPTURE(prm.to_string());
    const double rmax = std::sqrt(double(max_radius_sq(prm)));
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double r = rmax * i / 20.0;
      worst = std::max(worst, std::abs(volume_quadrature(prm, r) - volume_closed_form(prm, r)));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("small ball at (8,4,4) matches the exact simplex integral") {
  const auto res = volume_quadrature_detailed(Params::make(8, 4, 4), 1.0);
  CHECK(std::abs(res.mu - 1.0 / 24024.0) <= 1e-10);
  CHECK(res.abs_err_est <= 1e-8);
  CHECK(res.nu_split > 0.0);
}

TEST_CASE("quadrature is monotone with exact boundary values for n <= 8") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-9;
  for (const Params& prm : canonical_triples(8)) {
    CAPTURE(prm.to_string());
    const JacobiDeterminant det(prm);
    const double rmax = std::sqrt(double(max_radius_sq(prm)));
    double prev = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double r = rmax * i / 49.0;
      const double mu = volume_quadrature_detailed(det, r, cfg).mu;
      CHECK(mu >= prev - 1e-8);
      CHECK(mu >= 0.0);
      CHECK(mu <= 1.0);
      prev = mu;
    }
    CHECK(volume_quadrature_detailed(det, 0.0, cfg).mu == 0.0);
    CHECK(volume_quadrature_detailed(det, rmax, cfg).mu == 1.0);
  }
}

TEST_CASE("complement symmetry through quadrature") {
  const VolumeFn quad = volume_function(VolumeMethod::quadrature);
  const struct {
    int n, p, q;
  } pairs[] = {{5, 2, 2}, {6, 2, 2}, {7, 3, 3}, {5, 1, 2}, {8, 2, 3}};
  for (const auto& c : pairs) {
    const Params prm = Params::make(c.n, c.p, c.q);
    CAPTURE(prm.to_string());
    for (int i = 0; i <= 10; ++i) {
      const double r = std::sqrt(double(c.p)) * i / 10.0;
      CHECK(std::abs(volume_complement(prm, r, quad) - volume_quadrature(prm, r)) <= 1e-8);
    }
  }
  CHECK(volume_complement(Params::make(5, 2, 3), 1.2, quad) ==
        doctest::Approx(volume_quadrature(Params::make(5, 2, 3), 1.2)).epsilon(1e-8));
  CHECK(volume_complement(Params::make(6, 2, 3), 0.0, quad) == doctest::Approx(0.0));
}

TEST_CASE("non-canonical parameters map to their canonical representative") {
  CHECK(volume_quadrature(Params::make(5, 3, 2), 1.1) ==
        doctest::Approx(volume_quadrature(Params::make(5, 2, 3), 1.1)).epsilon(1e-12));
  CHECK(volume_quadrature(Params::make(6, 4, 4), 0.9) ==
        doctest::Approx(volume_quadrature(Params::make(6, 2, 2), 0.9)).epsilon(1e-12));
}

TEST_CASE("quadrature error paths") {
  const Params prm = Params::make(4, 2, 2);
  CHECK_THROWS_AS(volume_quadrature(prm, 1.5), ParameterError);
  CHECK_THROWS_AS(volume_quadrature(prm, -0.1), ParameterError);
  QuadratureConfig bad;
  bad.panel_order = 3;
  CHECK_THROWS_AS(volume_quadrature(prm, 1.0, bad), ParameterError);
  bad = {};
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(volume_quadrature(prm, 1.0, bad), ParameterError);
  CHECK_THROWS_AS(volume_quadrature(Params::make(30, 13, 13), 1.0), UnsupportedSizeError);

  QuadratureConfig tight;
  tight.abs_tol = 1e-19;
  tight.rel_tol = 1e-19;
  try {
    volume_quadrature(Params::make(6, 3, 3), 1.3, tight);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(e.best_estimate() == doctest::Approx(volume_closed_form(Params::make(6, 3, 3), 1.3)).epsilon(1e-9));
    CHECK(e.achieved_tolerance() > 1e-19);
  }
}
