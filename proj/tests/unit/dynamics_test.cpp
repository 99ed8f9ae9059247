#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace thermo;
using thermo::test::deformed;
using thermo::test::f_deformed;
using thermo::test::Gen;

TEST_CASE("eval_map on the doubling map and the deformation") {
  auto d = MapModel::doubling();
  CHECK(eval_map(d, 0.3) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(eval_map(d, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_map(deformed(1), 0.25) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(eval_map(deformed(2), 0.25) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("inverse_deriv_norm") {
  auto d = MapModel::doubling();
  for (double x : {0.1, 0.3, 0.77}) CHECK(inverse_deriv_norm(d, x) == 0.5);
  auto m = deformed(1);
  const double pi = kTwoPi / 2;
  CHECK(inverse_deriv_norm(m, 0.5) == doctest::Approx(1.0 / (2.0 - 0.4 * pi)).epsilon(1e-14));
  CHECK(inverse_deriv_norm(m, 0.0) == doctest::Approx(1.0 / (2.0 + 0.4 * pi)).epsilon(1e-14));
  CHECK(inverse_deriv_norm(m, 0.5) == doctest::Approx(1.345239).epsilon(1e-6));
  CHECK(inverse_deriv_norm(m, 0.0) == doctest::Approx(0.307065).epsilon(1e-6));
}

TEST_CASE("inverse_deriv_norm rejects endpoints where the slope jumps") {
  LinearSpec sp{{0.0, 0.25, 1.0}, {0.0, 0.0}, {4.0, 4.0 / 3.0}};
  auto m = MapModel::piecewise_linear(sp);
  CHECK_THROWS_AS(inverse_deriv_norm(m, 0.25), BoundaryPointError);
  CHECK_THROWS_AS(inverse_deriv_norm(m, 0.0), BoundaryPointError);
  CHECK(inverse_deriv_norm(m, 0.5) == doctest::Approx(0.75));
}

TEST_CASE("inverse_branch") {
  auto d = MapModel::doubling();
  CHECK(inverse_branch(d, 0, 0.6) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(inverse_branch(d, 1, 0.6) == doctest::Approx(0.8).epsilon(1e-15));
  auto m = deformed(1);
  CHECK(std::abs(inverse_branch(m, 0, 0.7) - 0.25) < 1e-13);
  CHECK_THROWS_AS(inverse_branch(d, 5, 0.2), ModelError);
}

TEST_CASE("hyperbolic times of the doubling map") {
  auto d = MapModel::doubling();
  CHECK(hyperbolic_times(d, 0.3, 0.5, 5) == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(hyperbolic_times(d, 0.3, 0.7, 5).empty());
  CHECK(first_hyperbolic_time(d, 0.123, 0.5, 10) == 1);
  CHECK_FALSE(first_hyperbolic_time(d, 0.123, 0.8, 50).has_value());
}

TEST_CASE("first hyperbolic time from the contracting region") {
  auto t = first_hyperbolic_time(deformed(2), 0.48, 0.3, 100);
  REQUIRE(t.has_value());
  CHECK(*t >= 2);
}

// n is a c-hyperbolic time iff prod_{j=n-k}^{n-1} 1/|f'(x_j)| < e^{-ck} for k = 1..n
std::vector<int> brute_hyperbolic(const MapModel& m, double x, double c, int n_max) {
  std::vector<double> orbit{x};
  for (int i = 1; i < n_max; ++i) orbit.push_back(f_deformed(orbit.back()));
  std::vector<int> out;
  for (int n = 1; n <= n_max; ++n) {
    bool ok = true;
    for (int k = 1; k <= n && ok; ++k) {
      double prod = 1.0;
      for (int j = n - k; j < n; ++j) prod *= inverse_deriv_norm(m, orbit[std::size_t(j)]);
      ok = prod < std::exp(-c * k);
    }
    if (ok) out.push_back(n);
  }
  return out;
}

TEST_CASE("hyperbolic times match a brute-force product scan") {
  auto m = deformed(2);
  CHECK(hyperbolic_times(m, 0.1, 0.3, 20) == brute_hyperbolic(m, 0.1, 0.3, 20));
  Gen g(11);
  for (int trial = 0; trial < 40; ++trial) {
    double x = g.unit(), c = g.range(0.0, 0.6);
    CAPTURE(x);
    CAPTURE(c);
    CHECK(hyperbolic_times(m, x, c, 25) == brute_hyperbolic(m, x, c, 25));
  }
}

TEST_CASE("property: inverse branches invert the map") {
  Gen g(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = trial % 2 ? g.linear_map() : deformed(1 + trial % 3);
    for (int k = 0; k < 10; ++k) {
      double x = g.unit();
      std::size_t b = m.block_of(x);
      double y = eval_map(m, x);
      CHECK(circle_distance(inverse_branch(m, b, y), x) < 1e-12);
    }
  }
}

TEST_CASE("property: lifts are increasing on each block") {
  Gen g(5);
  auto m = deformed(3);
  for (std::size_t b = 0; b < m.size(); ++b) {
    const auto& bl = m.block(b);
    double prev = m.lift(b, bl.domain.lo);
    CHECK(prev == doctest::Approx(bl.image_lo).epsilon(1e-12));
    for (int i = 1; i <= 50; ++i) {
      double x = bl.domain.lo + bl.domain.length() * i / 50.0;
      double v = m.lift(b, x);
      CHECK(v > prev);
      prev = v;
    }
    CHECK(prev == doctest::Approx(bl.image_hi).epsilon(1e-12));
  }
}

TEST_CASE("orbit_from_itinerary realizes the itinerary") {
  auto m = deformed(2);
  Gen g(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> it{std::size_t(g.integer(0, 3))};
    for (int k = 1; k < 12; ++k) {
      const auto& succ = m.successors(it.back());
      it.push_back(succ[std::size_t(g.integer(0, int(succ.size()) - 1))]);
    }
    const auto& last = m.block(it.back()).domain;
    auto orbit = orbit_from_itinerary(m, it, last.lo + 0.5 * last.length());
    REQUIRE(orbit.size() == it.size());
    for (std::size_t k = 0; k < it.size(); ++k) CHECK(m.block_of(orbit[k]) == it[k]);
    for (std::size_t k = 0; k + 1 < it.size(); ++k)
      CHECK(circle_distance(eval_map(m, orbit[k]), orbit[k + 1]) < 1e-12);
  }
}

TEST_CASE("model construction errors") {
  LinearSpec bad{{0.0, 0.6, 0.4, 1.0}, {0.0, 0.0, 0.0}, {2.0, 2.0, 2.0}};
  CHECK_THROWS_AS(MapModel::piecewise_linear(bad), ModelError);
  CHECK(MapModel::doubling().is_markov());
  CHECK(MapModel::doubling({0}).q() == 1);
  CHECK(deformed(2).covering_time() >= 1);
}
