#include <cmath>

#include "doctest.h"
#include "grassvol/errors.hpp"
#include "grassvol/volume.hpp"

using namespace grassvol;

TEST_CASE("method names round-trip in the documented order") {
  const auto all = all_volume_methods();
  REQUIRE(all.size() == 5);
  CHECK(method_name(all[0]) == "closed");
  CHECK(method_name(all[1]) == "quadrature");
  CHECK(method_name(all[2]) == "finite");
  CHECK(method_name(all[3]) == "rmt");
  CHECK(method_name(all[4]) == "mc");
  for (auto m : all) CHECK(parse_volume_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_volume_method("exact"), ParameterError);
  CHECK_THROWS_AS(volume_function(VolumeMethod::mc), ParameterError);
}

TEST_CASE("number formatting keeps twelve significant digits") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(4.1625041625041625e-5) == "4.1625041625e-05");
  CHECK(format_number(0.0) == "0");
}

TEST_CASE("curves serialize to CSV and JSON") {
  const auto curve = volume_curve(Params::make(4, 2, 2), {0.0, 1.0}, VolumeMethod::closed);
  CHECK(curve.to_csv() == "r,r_sq,mu,method,abs_err_est\n0,0,0,closed,0\n1,1,0.5,closed,0\n");
  CHECK(curve.to_csv(false).find("r,") == std::string::npos);
  const auto j = curve.to_json();
  CHECK(j["n"] == 4);
  CHECK(j["method"] == "closed");
  CHECK(j["points"].size() == 2);
  CHECK(j["points"][1]["mu"] == 0.5);
  CHECK_FALSE(j["points"][1].contains("stderr"));

  CurveOptions opts;
  opts.mc.samples = 500;
  const auto mc = volume_curve(Params::make(4, 2, 2), {0.5, 1.0}, VolumeMethod::mc, opts);
  CHECK(mc.to_csv(true, true).rfind("r,r_sq,mu,method,abs_err_est,stderr\n", 0) == 0);
  CHECK(mc.to_json()["points"][0].contains("stderr"));
  CHECK(mc.to_json()["config"]["samples"] == 500);

  const auto q = volume_curve(Params::make(5, 3, 2), {1.0}, VolumeMethod::quadrature);
  CHECK(q.params == Params::make(5, 3, 2));
  CHECK(q.points[0].mu == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(q.to_json()["config"]["panel_order"] == 32);
  CHECK_THROWS_AS(volume_curve(Params::make(8, 4, 4), {1.0}, VolumeMethod::closed), NotTabulatedError);
}

TEST_CASE("every method is monotone and reaches both boundaries") {
  const Params prm = Params::make(5, 2, 3);
  std::vector<double> grid;
  for (int i = 0; i <= 15; ++i) grid.push_back(std::sqrt(2.0) * i / 15.0);
  CurveOptions opts;
  opts.mc.samples = 20000;
  for (auto m : all_volume_methods()) {
    CAPTURE(method_name(m));
    const auto c = volume_curve(prm, grid, m, opts);
    CHECK(c.points.front().mu <= 1e-8);
    // The Gaussian approximations do not reach exactly 1 at the largest radius.
    const double top_tol = (m == VolumeMethod::rmt || m == VolumeMethod::finite) ? 0.01 : 1e-8;
    CHECK(c.points.back().mu >= 1.0 - top_tol);
    for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].mu >= c.points[i - 1].mu - 1e-8);
  }
}
