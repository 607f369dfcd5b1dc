#include <doctest.h>

#include <sstream>

#include "aniflow/anisotropy.hpp"
#include "aniflow/errors.hpp"
#include "support.hpp"

using namespace aniflow;
using testing::kPi;

TEST_SUITE("anisotropy") {

TEST_CASE("builtin families") {
  const auto iso = builtin_density("isotropic", {});
  for (double t : {-3.0, 0.0, 1.3}) {
    CHECK(iso(t).value == 1.0);
    CHECK(iso(t).d1 == 0.0);
    CHECK(iso(t).d2 == 0.0);
  }
  const double p[] = {1.0 / 9, 3, 0};
  const auto m3 = builtin_density("mfold", p);
  CHECK(m3(0).value == doctest::Approx(10.0 / 9).epsilon(1e-15));
  CHECK(m3(0).d1 == doctest::Approx(0.0));
  CHECK(m3(0).d2 == doctest::Approx(-1.0).epsilon(1e-15));

  const auto c2 = builtin_density("caseII", {});
  CHECK(c2.smoothness() == Smoothness::PiecewiseC2);
  CHECK(c2(kPi / 2).value == doctest::Approx(1.0).epsilon(1e-15));
  // n = (-sin, cos): n1 < 0 for theta in (0, pi) picks the 5/2 - 3/2 branch.
  for (double t = -3.1; t < 3.1; t += 0.1) {
    const double n1 = -std::sin(t), n2 = std::cos(t);
    const double w = n1 >= 0 ? 4.0 : 1.0;
    CHECK(c2.gamma(t) == doctest::Approx(std::sqrt(w * n1 * n1 + n2 * n2)).epsilon(1e-14));
  }

  const auto l4 = builtin_density("l4norm", {});
  CHECK(l4.gamma(kPi / 4) == doctest::Approx(std::pow(0.5, 0.25)).epsilon(1e-14));

  const double bad[] = {1.0, 3, 0};
  CHECK_THROWS_AS(builtin_density("mfold", bad), InvalidArgument);
  CHECK_THROWS_AS(builtin_density("nope", {}), InvalidArgument);
}

TEST_CASE("density spec strings") {
  CHECK(parse_density("iso").gamma(0.4) == 1.0);
  const auto d = parse_density("mfold:m=4,beta=0.0625,phase=0.1");
  CHECK(d.gamma(0.3) == doctest::Approx(1 + 0.0625 * std::cos(4 * 0.4)).epsilon(1e-15));
  // The canonical name parses back to the same density.
  const auto again = parse_density(d.name());
  for (double t = -3; t < 3; t += 0.37) CHECK(again.gamma(t) == d.gamma(t));
  CHECK(parse_density("case2").smoothness() == Smoothness::PiecewiseC2);
  CHECK_NOTHROW(parse_density("l4"));
  CHECK_THROWS_AS(parse_density("mfold:m=3"), InvalidArgument);
  CHECK_THROWS_AS(parse_density("mfold:m=3,beta=0.1,bogus=1"), InvalidArgument);
  CHECK_THROWS_AS(parse_density("mfold:m=3,beta=x"), InvalidArgument);
}

TEST_CASE("positivity, periodicity and derivatives") {
  testing::Rng rng(11);
  const std::vector<AnisotropyDensity> smooth = {isotropic_density(), mfold_density(3, 1.0 / 7), mfold_density(4, 0.3, 0.2),
                                                 mfold_density(6, -0.02), l4_density()};
  for (const auto& d : smooth) {
    for (int s = 0; s < 200; ++s) {
      const double t = rng.uniform(-kPi, kPi);
      CHECK(d.gamma(t) > 0);
      CHECK(std::abs(d.gamma(t) - d.gamma(t + 2 * kPi)) <= 1e-14);
      const double h = 1e-5;
      const double fd1 = (d.gamma(t + h) - d.gamma(t - h)) / (2 * h);
      const double fd2 = (d.dgamma(t + h) - d.dgamma(t - h)) / (2 * h);
      CHECK(std::abs(fd1 - d.dgamma(t)) <= 1e-6 * std::max(1.0, std::abs(d.dgamma(t))));
      CHECK(std::abs(fd2 - d.d2gamma(t)) <= 1e-6 * std::max(1.0, std::abs(d.d2gamma(t))));
    }
  }
  const auto c2 = case2_density();
  for (int s = 0; s < 200; ++s) {
    const double t = rng.uniform(0.01, kPi - 0.01) * (s % 2 ? 1 : -1);
    const double h = 1e-5;
    CHECK(c2.gamma(t) > 0);
    CHECK(std::abs((c2.gamma(t + h) - c2.gamma(t - h)) / (2 * h) - c2.dgamma(t)) <= 1e-6 * std::max(1.0, std::abs(c2.dgamma(t))));
  }
}

TEST_CASE("Cahn-Hoffman vector") {
  const auto iso = isotropic_density();
  CHECK((xi_vector(iso, 0) - Vec2(0, 1)).norm() <= 1e-15);
  const auto m3 = mfold_density(3, 1.0 / 9);
  CHECK((xi_vector(m3, 0) - Vec2(0, 10.0 / 9)).norm() <= 1e-15);
  const double t = kPi / 6;
  CHECK(m3.gamma(t) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m3.dgamma(t) == doctest::Approx(-1.0 / 3).epsilon(1e-15));
  const Vec2 expect = Vec2(-0.5, std::sqrt(3.0) / 2) + (1.0 / 3) * Vec2(std::sqrt(3.0) / 2, 0.5);
  CHECK((xi_vector(m3, t) - expect).norm() <= 1e-15);

  testing::Rng rng(5);
  for (int s = 0; s < 1000; ++s) {
    const auto d = testing::random_density(rng);
    const double th = rng.uniform(-kPi, kPi);
    const Vec2 xi = xi_vector(d, th);
    CHECK(std::abs(xi.dot(normal_of(th)) - d.gamma(th)) <= 1e-14);
    CHECK(std::abs(xi.dot(tangent_of(th)) + d.dgamma(th)) <= 1e-14);
  }
}

TEST_CASE("energy matrix forms and action identity") {
  const auto iso = isotropic_density();
  for (double alpha : {-3.0, 0.0, 0.5, 2.0}) {
    const Mat2 g = energy_matrix(iso, 0.7, {alpha, Stabilizer::constant(1 - alpha)});
    CHECK((g - Mat2::Identity()).norm() <= 1e-15);
  }
  const double beta = 0.2, alpha = 0.7, k = 1.3;
  const Mat2 g = energy_matrix(mfold_density(3, beta), 0, {alpha, Stabilizer::constant(k)});
  Mat2 expect;
  expect << 1 + beta, 0, 0, (1 + beta) * alpha + k;
  CHECK((g - expect).norm() <= 1e-15);

  testing::Rng rng(3);
  for (int s = 0; s < 10000; ++s) {
    const auto d = testing::random_density(rng);
    const double th = rng.uniform(-kPi, kPi);
    const double a = rng.uniform(-10, 10);
    const EnergyMatrixParams p{a, Stabilizer::constant(rng.uniform(-5, 10))};
    const Mat2 m = energy_matrix(d, th, p);
    const Vec2 act = m * tangent_of(th);
    const Vec2 want = d.gamma(th) * tangent_of(th) + d.dgamma(th) * normal_of(th);
    CHECK((act - want).norm() <= 1e-13);
    CHECK((m - energy_matrix_expanded(d, th, p)).norm() <= 1e-13);
  }
}

TEST_CASE("auxiliary functions") {
  const auto m3 = mfold_density(3, 1.0 / 9);
  for (double th : {-2.0, 0.3, 1.1}) {
    CHECK(aux_P(m3, 0, th, 0.4, 7) == doctest::Approx(m3.gamma(th)).epsilon(1e-15));
    CHECK(aux_Q(m3, 0, th, 0.4) == doctest::Approx(2 * m3.gamma(th)).epsilon(1e-15));
    CHECK(aux_Q(m3, kPi, th, 0.4) == doctest::Approx(m3.gamma(th - kPi) - m3.gamma(th)).epsilon(1e-14));
  }
  const auto iso = isotropic_density();
  CHECK(aux_P(iso, 1.0, 0.2, -3, 0) == doctest::Approx(1.0));
  CHECK(aux_Q(iso, kPi / 2, 0.2, 1) == doctest::Approx(1.0).epsilon(1e-15));
  // phi = pi/4, theta = pi/6, alpha = -1, a = 2: 1 + (-1)(-1/3)(1) + 2 (1/2).
  CHECK(aux_P(m3, kPi / 4, kPi / 6, -1, 2) == doctest::Approx(1 + 1.0 / 3 + 1).epsilon(1e-14));

  testing::Rng rng(8);
  for (int s = 0; s < 500; ++s) {
    const double phi = rng.uniform(-kPi, kPi), th = rng.uniform(-kPi, kPi), al = rng.uniform(-4, 4),
                 a = rng.uniform(0, 5);
    const double g = 1 + std::cos(3 * th) / 9, dg = -std::sin(3 * th) / 3;
    const double p = g + 0.5 * (al - 1) * dg * std::sin(2 * phi) + a * std::sin(phi) * std::sin(phi);
    const double q = 1 + std::cos(3 * (th - phi)) / 9 + g * std::cos(phi) + al * dg * std::sin(phi);
    CHECK(aux_P(m3, phi, th, al, a) == doctest::Approx(p).epsilon(1e-13));
    CHECK(aux_Q(m3, phi, th, al) == doctest::Approx(q).epsilon(1e-13));
  }
}

TEST_CASE("stability margin") {
  CHECK(stability_margin(isotropic_density()) == doctest::Approx(2.0).epsilon(1e-12));
  for (double beta : {1.0 / 9, 1.0 / 7, 0.3})
    CHECK(std::abs(stability_margin(mfold_density(3, beta)) - (2 - 4 * beta)) <= 1e-10);
  CHECK(std::abs(stability_margin(mfold_density(3, 0.5))) <= 1e-10);
  CHECK(std::abs(stability_margin(testing::critical_density())) <= 1e-10);
}

TEST_CASE("k0 on isotropic and nonexistent cases") {
  for (double alpha : {-5.0, -1.0, 0.0, 0.5, 3.0})
    for (double th : {-kPi, -1.0, 0.0, 2.0}) CHECK(std::abs(k0_at(isotropic_density(), th, alpha)) <= 1e-12);
  const auto bad = mfold_density(3, 0.6);
  // 2 + 4 beta cos(3 theta) < 0 at theta = pi/3.
  for (double alpha : {-1.0, 0.0, 2.0}) {
    const K0Result r = k0_search(bad, kPi / 3, alpha);
    CHECK_FALSE(r.finite());
    CHECK_FALSE(r.failed_condition.empty());
  }
  CHECK_THROWS_AS(k_min_table(bad, 0.0), NonexistentStabilizer);
  const auto crit = testing::critical_density();
  CHECK(k0_at(crit, 3 * kPi / 4, 0.0) == kInfiniteK0);
  CHECK(std::isfinite(k0_at(crit, 3 * kPi / 4, -1.0)));
}

TEST_CASE("k0 definition consistency and sharpness") {
  const std::vector<std::pair<AnisotropyDensity, double>> cases = {
      {mfold_density(3, 1.0 / 9), -1.0}, {mfold_density(3, 1.0 / 7), 0.0}, {mfold_density(4, 0.06), 1.0},
      {l4_density(), 2.5}, {mfold_density(3, 0.5), -1.0}};
  for (const auto& [d, alpha] : cases) {
    for (int j = 0; j < StabilizerTable::kNodes; j += 3) {
      const double th = StabilizerTable::node(j);
      const double k0 = k0_at(d, th, alpha);
      REQUIRE(std::isfinite(k0));
      auto min_gap = [&](double a) {
        double m = 1e300;
        for (int i = 0; i <= 20000; ++i) {
          const double phi = -kPi + 2 * kPi * i / 20000.0;
          const double q = aux_Q(d, phi, th, alpha);
          m = std::min(m, 4 * d.gamma(th) * aux_P(d, phi, th, alpha, a) - q * q);
        }
        return m;
      };
      CHECK(min_gap(k0) >= -1e-8);
      if (k0 > 1e-6) CHECK(min_gap(k0 * (1 - 1e-3) - 1e-6) < 0);
    }
  }
}

TEST_CASE("k0 against the brute-force oracle") {
  for (double beta : {1.0 / 9, 1.0 / 7, 0.5}) {
    const auto d = mfold_density(3, beta);
    const long double b = beta;
    auto g = [b](long double t) { return 1 + b * std::cos(3 * t); };
    auto dg = [b](long double t) { return -3 * b * std::sin(3 * t); };
    for (int j = 0; j < StabilizerTable::kNodes; j += 4) {
      const double th = StabilizerTable::node(j);
      const long double oracle = testing::brute_k0(g, dg, th, -1.0L, 200000);
      CHECK(std::abs(k0_at(d, th, -1.0) - static_cast<double>(oracle)) <= 1e-6);
    }
  }
}

TEST_CASE("k_min tables") {
  for (double alpha : {-2.0, 1.0, 2.0, 3.0}) {
    const StabilizerTable t = k_min_table(isotropic_density(), alpha);
    for (double v : t.values()) CHECK(std::abs(v - (1 - alpha)) <= 1e-12);
  }
  const StabilizerTable t = k_min_table(mfold_density(3, 1.0 / 9), -1.0);
  CHECK(t.values()[0] == t.values()[20]);
  for (double v : t.values()) CHECK(std::isfinite(v));
  CHECK(StabilizerTable::node(0) == -kPi);
  CHECK(StabilizerTable::node(20) == kPi);
  // Values bounded below by (1 - alpha) min gamma when the margin is positive.
  const auto d = mfold_density(3, 1.0 / 7);
  for (double alpha : {-1.0, 0.0, 1.0}) {
    const auto tab = k_min_table(d, alpha);
    for (double v : tab.values()) CHECK(v >= (1 - alpha) * (1 - 1.0 / 7) - 1e-10);
  }
}

TEST_CASE("stabilizer table interpolation and CSV") {
  std::array<double, StabilizerTable::kNodes> v{};
  for (int j = 0; j < StabilizerTable::kNodes; ++j) v[j] = j == 20 ? 0.0 : j;
  const StabilizerTable t(v);
  CHECK(t(StabilizerTable::node(3)) == doctest::Approx(3));
  CHECK(t(0.5 * (StabilizerTable::node(3) + StabilizerTable::node(4))) == doctest::Approx(3.5));
  CHECK(t(StabilizerTable::node(3) + 2 * kPi) == doctest::Approx(3));
  std::stringstream ss;
  t.write_csv(ss);
  int rows = 0;
  for (std::string line; std::getline(ss, line);) ++rows;
  CHECK(rows == 21);
  ss.clear();
  ss.seekg(0);
  CHECK(StabilizerTable::read_csv(ss).values() == t.values());
  std::array<double, StabilizerTable::kNodes> bad = v;
  bad[20] = 7;
  CHECK_THROWS_AS(StabilizerTable{bad}, InvalidArgument);
  std::stringstream short_csv("0,1\n1,2\n");
  CHECK_THROWS_AS(StabilizerTable::read_csv(short_csv), Error);
}

TEST_CASE("stabilizer validation") {
  const auto d = mfold_density(3, 1.0 / 7);
  const StabilizerTable kmin = k_min_table(d, 0.0);
  CHECK_NOTHROW(require_stabilized({0.0, Stabilizer(kmin)}, kmin));
  CHECK(stabilizer_deficit({0.0, Stabilizer(kmin)}, kmin) <= 0);
  CHECK_THROWS_AS(require_stabilized({0.0, Stabilizer::constant(-10)}, kmin), InvalidArgument);
  CHECK(stabilizer_deficit({0.0, Stabilizer::constant(-10)}, kmin) > 10);
}

TEST_CASE("upper bound") {
  const double a = kPi * kPi / 8;
  CHECK(k0_upper_bound(isotropic_density(), 0.3, -1, 2) == doctest::Approx((a * a + 4 * a) / 4).epsilon(1e-12));
  CHECK(k0_upper_bound(isotropic_density(), 0.3, -1, 2) == doctest::Approx(1.614).epsilon(1e-3));
  CHECK_THROWS_AS(k0_upper_bound(isotropic_density(), 0, 0, 0), InvalidArgument);
  for (double beta : {1.0 / 9, 1.0 / 7, 0.3}) {
    const auto d = mfold_density(3, beta);
    const double c = stability_margin(d);
    for (double alpha : {-1.0, 0.0, 1.0, 4.0})
      for (int j = 0; j < StabilizerTable::kNodes; ++j) {
        const double th = StabilizerTable::node(j);
        CHECK(k0_at(d, th, alpha) <= k0_upper_bound(d, th, alpha, c));
      }
  }
}

TEST_CASE("symmetric case gives finite k0 for stable densities") {
  testing::Rng rng(21);
  for (int s = 0; s < 12; ++s) {
    const auto d = testing::random_density(rng);
    if (stability_margin(d) < 0) continue;
    CHECK_NOTHROW(k_min_table(d, -1.0));
  }
}

}  // TEST_SUITE
