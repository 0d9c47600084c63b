#include <cmath>
#include <numbers>

#include "doctest.h"
#include "grassvol/closed_form.hpp"
#include "grassvol/coding.hpp"
#include "grassvol/errors.hpp"
#include "grassvol/random.hpp"
#include "grassvol/volume.hpp"

using namespace grassvol;

namespace {

Codebook random_code(int n, int p, std::size_t N, std::uint64_t seed) {
  HaarSampler s(n, p, seed);
  std::vector<SubspaceBasis> w;
  for (std::size_t i = 0; i < N; ++i) w.push_back(s.next());
  return Codebook(std::move(w));
}

}  // namespace

TEST_CASE("quantization picks the nearest codeword, lowest index on ties") {
  const auto single = random_code(4, 2, 1, 3);
  HaarSampler src(4, 2, 99);
  for (int i = 0; i < 20; ++i) CHECK(quantize(single, src.next()) == 0);

  const auto code = random_code(6, 2, 8, 5);
  for (std::size_t j = 0; j < code.size(); ++j) CHECK(quantize(code, code.codewords()[j]) == j);

  const auto c0 = SubspaceBasis::coordinate(4, {0, 1});
  const auto c1 = SubspaceBasis::coordinate(4, {2, 3});
  const Codebook dup({c1, c0, c0});
  CHECK(quantize(dup, c0) == 1);

  const Codebook orth({c0, c1});
  for (int i = 0; i < 500; ++i) {
    const auto Q = src.next();
    const double d0 = chordal_distance_sq(c0, Q), d1 = chordal_distance_sq(c1, Q);
    const std::size_t expect = d1 < d0 ? 1 : 0;
    if (std::abs(d0 - d1) > 1e-12) CHECK(quantize(orth, Q) == expect);
  }
  CHECK_THROWS_AS(Codebook(std::vector<SubspaceBasis>{}), ParameterError);
  CHECK_THROWS_AS(Codebook({c0, SubspaceBasis::leading(4, 1)}), ParameterError);
  CHECK_THROWS_AS(quantize(orth, SubspaceBasis::leading(5, 2)), ParameterError);
}

TEST_CASE("codebook JSON round trip") {
  const auto code = random_code(5, 2, 3, 1);
  const auto j = code.to_json({{"seed", 1}, {"iterations", 0}});
  CHECK(j["N"] == 3);
  CHECK(j["metadata"]["seed"] == 1);
  const auto back = Codebook::from_json(j);
  CHECK(back.embeddings() == code.embeddings());
  auto bad = j;
  bad["n"] = 6;
  CHECK_THROWS_AS(Codebook::from_json(bad), ParameterError);
}

TEST_CASE("packing bounds") {
  const VolumeFn closed = volume_function(VolumeMethod::closed);
  const VolumeFn quad = volume_function(VolumeMethod::quadrature);
  const Params g42 = Params::make(4, 2, 2);
  CHECK(gv_bound(g42, 1.0, closed) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gv_bound(g42, std::sqrt(2.0), closed) == 1.0);
  CHECK(hamming_bound(g42, 1.0, closed) == doctest::Approx(512.0).epsilon(1e-12));
  CHECK(hamming_bound(g42, 2 * std::sqrt(2.0), closed) == 1.0);
  const double gv = gv_bound(Params::make(8, 4, 4), 1.0, quad);
  CHECK(gv == doctest::Approx(24024.0).epsilon(1e-6));
  CHECK(std::abs(std::log2(gv) - 14.5) <= 0.1);
  for (double d : {0.3, 0.8, 1.2}) {
    CHECK(gv_bound(g42, d, quad) >= 1.0);
    CHECK(hamming_bound(g42, d, quad) >= 1.0);
  }
  CHECK_THROWS_AS(gv_bound(Params::make(5, 2, 3), 1.0, quad), ParameterError);
  CHECK_THROWS_AS(hamming_bound(g42, 0.0, quad), ParameterError);
  CHECK(std::isinf(gv_bound(g42, 1e-300, closed)));
}

TEST_CASE("distortion lower bound") {
  const auto one = distortion_lower_bound_detailed(Params::make(4, 2, 2), 1.0);
  CHECK(one.clamped);
  CHECK(one.value == doctest::Approx(1.0 + std::sqrt(1.0 / (30 * std::numbers::pi)) * std::exp(-7.5)).epsilon(1e-13));
  CHECK_FALSE(distortion_lower_bound_detailed(Params::make(8, 4, 4), 4.0).clamped);
  CHECK_THROWS_AS(distortion_lower_bound(Params::make(4, 2, 2), 0.5), ParameterError);

  for (int n = 2; n <= 16; ++n) {
    for (int p = 1; 2 * p <= n; ++p) {
      for (int q = p; p + q <= n; ++q) {
        const Params prm = Params::make(n, p, q);
        double prev = distortion_lower_bound(prm, 1.0);
        bool ok = true;
        for (int N = 2; N <= 65536; ++N) {
          const double v = distortion_lower_bound(prm, N);
          ok = ok && v <= prev + 1e-12 && v >= 0.0;
          prev = v;
        }
        CAPTURE(prm.to_string());
        CHECK(ok);
      }
    }
  }
  CHECK(distortion_lower_bound(Params::make(8, 4, 4), 1e12) < 0.2);
}

TEST_CASE("random codes") {
  const Params g42 = Params::make(4, 2, 2);
  const auto r1 = random_code_distortion(g42, 1, 20000, 4, 3);
  CHECK(std::abs(r1.distortion - 1.0) <= 3 * r1.stderr_);
  CHECK(r1.method == DistortionMethod::random);
  CHECK(r1.trials == 4);
  const auto r2 = random_code_distortion(Params::make(2, 1, 1), 2, 50000, 1, 3);
  CHECK(r2.distortion + 3 * r2.stderr_ < 0.5);
  const auto big = random_code_distortion(Params::make(8, 4, 4), 256, 5000, 2, 4);
  CHECK(big.distortion >= distortion_lower_bound(Params::make(8, 4, 4), 256));
  CHECK(big.bits == 8.0);
  // Unequal dimensions are allowed for random codes.
  CHECK_NOTHROW(random_code_distortion(Params::make(6, 2, 3), 4, 1000, 1, 1));
  const auto a = random_code_distortion(g42, 8, 3000, 2, 9, 2);
  const auto b = random_code_distortion(g42, 8, 3000, 2, 9, 2);
  CHECK(a.distortion == b.distortion);
}

TEST_CASE("Lloyd training is monotone and the centroid is optimal for N = 1") {
  LloydOptions o;
  o.training_samples = 4000;
  o.iterations = 5;
  o.seed = 21;
  const Params prm = Params::make(6, 2, 2);
  const auto res = lloyd_quantizer(prm, 1, o);
  const double trained = code_distortion(res.codebook, 2, o.training_samples, derive_seed(o.seed, 0));
  CHECK(trained == doctest::Approx(res.report.training_trajectory.back()).epsilon(1e-12));
  HaarSampler alt(6, 2, 12345);
  for (int i = 0; i < 100; ++i) {
    const Codebook c({alt.next()});
    CHECK(trained <= code_distortion(c, 2, o.training_samples, derive_seed(o.seed, 0)) + 1e-12);
  }
  CHECK(std::abs(res.report.distortion - 2.0 * 4 / 6) <= 4 * res.report.stderr_ + 0.02);

  o.iterations = 30;
  const auto r4 = lloyd_quantizer(prm, 16, o);
  const auto& traj = r4.report.training_trajectory;
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj[i] <= traj[i - 1] + 1e-12);
  CHECK(r4.report.iterations + 1 == static_cast<int>(traj.size()));

  LloydOptions bad = o;
  CHECK_THROWS_AS(lloyd_quantizer(Params::make(6, 2, 3), 4, o), ParameterError);
  bad.training_samples = 3;
  CHECK_THROWS_AS(lloyd_quantizer(prm, 4, bad), ParameterError);
}

TEST_CASE("Lloyd beats random codes") {
  LloydOptions o;
  o.training_samples = 20000;
  o.iterations = 30;
  o.seed = 2;
  const Params g42 = Params::make(4, 2, 2);
  const auto l = lloyd_quantizer(g42, 4, o);
  const auto r = random_code_distortion(g42, 4, 20000, 8, 2);
  CHECK(l.report.distortion <= r.distortion);
  // The large-dimension bound fails for the smallest case.
  const auto small = lloyd_quantizer(Params::make(2, 1, 1), 2, o);
  CHECK(distortion_lower_bound(Params::make(2, 1, 1), 2) > small.report.distortion);
}

TEST_CASE("parallel Lloyd matches the single-threaded trajectory") {
  LloydOptions o;
  o.training_samples = 6000;
  o.iterations = 12;
  o.seed = 8;
  const Params prm = Params::make(8, 4, 4);
  const auto a = lloyd_quantizer(prm, 16, o);
  o.threads = 3;
  const auto b = lloyd_quantizer(prm, 16, o);
  REQUIRE(a.report.training_trajectory.size() == b.report.training_trajectory.size());
  for (std::size_t i = 0; i < a.report.training_trajectory.size(); ++i) {
    CHECK(std::abs(a.report.training_trajectory[i] - b.report.training_trajectory[i]) <= 1e-9);
  }
}

TEST_CASE("error CDF") {
  const Params g42 = Params::make(4, 2, 2);
  const auto single = random_code(4, 2, 1, 17);
  std::vector<double> z;
  for (int i = 0; i <= 20; ++i) z.push_back(0.1 * i);
  const auto F1 = error_cdf(single, z, 50000, 4);
  CHECK(F1.back().F == 1.0);
  for (const auto& pt : F1) {
    CHECK(std::abs(pt.F - volume_closed_form(g42, std::sqrt(pt.z))) <= 3 * pt.stderr_ + 1e-12);
  }
  for (std::size_t i = 1; i < F1.size(); ++i) CHECK(F1[i].F >= F1[i - 1].F);

  LloydOptions o;
  o.training_samples = 5000;
  o.iterations = 10;
  const VolumeFn quad = volume_function(VolumeMethod::quadrature);
  const struct {
    Params prm;
    std::size_t N;
  } cases[] = {{g42, 4}, {Params::make(8, 4, 4), 16}};
  for (const auto& c : cases) {
    const Codebook lloyd = lloyd_quantizer(c.prm, c.N, o).codebook;
    const Codebook rnd = random_code(c.prm.n, c.prm.p, c.N, 5);
    std::vector<double> zz;
    for (int i = 0; i <= 10; ++i) zz.push_back(c.prm.p * i / 10.0);
    for (const Codebook* code : {&lloyd, &rnd}) {
      for (const auto& pt : error_cdf(*code, zz, 20000, 6)) {
        const double cap = std::min(1.0, c.N * quad(c.prm, std::sqrt(pt.z)));
        CHECK(pt.F <= cap + 3 * pt.stderr_ + 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(error_cdf(single, {2.5}, 10, 1), ParameterError);
}
