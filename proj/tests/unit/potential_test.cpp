#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace thermo;
using thermo::test::deformed;
using thermo::test::Gen;

TEST_CASE("birkhoff sums") {
  auto d = MapModel::doubling();
  CHECK(birkhoff_sum(d, Potential::constant(0.0), 0.37, 17) == 0.0);
  CHECK(birkhoff_sum(d, Potential::constant(0.3), 0.37, 9) == doctest::Approx(2.7));
  CHECK(birkhoff_sum(d, Potential::fourier(0.0, {1.0}), 0.25, 2) == doctest::Approx(-1.0));
}

TEST_CASE("property: birkhoff cocycle S_{n+m} = S_n + S_m o f^n") {
  Gen g(21);
  auto m = deformed(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto phi = g.fourier(3, 0.5);
    double x = g.unit();
    int n = g.integer(1, 12), k = g.integer(1, 12);
    double y = x;
    for (int i = 0; i < n; ++i) y = eval_map(m, y);
    CHECK(birkhoff_sum(m, phi, x, n + k) ==
          doctest::Approx(birkhoff_sum(m, phi, x, n) + birkhoff_sum(m, phi, y, k)).epsilon(1e-12));
  }
}

TEST_CASE("sup of birkhoff sums over constant potentials is exact") {
  CylinderTree tree(MapModel::doubling());
  tree.build_to(5);
  for (std::size_t i = 0; i < tree.count(5); i += 7) {
    CHECK(sup_birkhoff_on_cylinder(tree, Potential::constant(0.0), 5, i).bound == 0.0);
    CHECK(sup_birkhoff_on_cylinder(tree, Potential::constant(0.25), 5, i).bound ==
          doctest::Approx(1.25));
  }
}

double dense_extreme(const MapModel& m, const Potential& phi, Interval iv, int n, bool sup) {
  double best = sup ? -1e300 : 1e300;
  const int N = 10000;
  for (int i = 0; i < N; ++i) {
    double x = iv.lo + iv.length() * i / (N - 1);  // closure of the cylinder
    double v = birkhoff_sum(m, phi, x, n);
    best = sup ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

TEST_CASE("sup_birkhoff bound covers a dense sampling oracle") {
  CylinderTree tree(MapModel::doubling());
  tree.build_to(2);
  auto phi = Potential::fourier(0.0, {1.0});
  auto r = sup_birkhoff_on_cylinder(tree, phi, 2, 0);
  CHECK(tree.interval(2, 0).hi == doctest::Approx(0.25));
  CHECK(r.raw <= 2.0 + 1e-12);
  double oracle = dense_extreme(tree.model(), phi, tree.interval(2, 0), 2, true);
  CHECK(r.bound >= oracle - 1e-12);
  CHECK(r.raw <= oracle + 1e-9);
}

TEST_CASE("property: certified birkhoff bounds enclose dense samples") {
  Gen g(8);
  CylinderTree tree(deformed(2));
  tree.build_to(5);
  for (int trial = 0; trial < 12; ++trial) {
    auto phi = g.fourier(2, 0.4);
    int n = g.integer(1, 5);
    std::size_t i = std::size_t(g.integer(0, int(tree.count(n)) - 1));
    auto iv = tree.interval(n, i);
    CHECK(sup_birkhoff_on_cylinder(tree, phi, n, i).bound >=
          dense_extreme(tree.model(), phi, iv, n, true) - 1e-10);
    CHECK(inf_birkhoff_on_cylinder(tree, phi, n, i).bound <=
          dense_extreme(tree.model(), phi, iv, n, false) + 1e-10);
  }
}

TEST_CASE("essential oscillation") {
  CHECK(essential_oscillation(Observable::constant(3.0), {0.2, 0.4}) == 0.0);
  auto ind = Observable::indicator({{0.0, 0.5}});
  CHECK(essential_oscillation(ind, {0.0, 0.25}) == 0.0);
  CHECK(essential_oscillation(ind, {0.3, 0.6}) == 1.0);
  CHECK(essential_oscillation(ind, {0.6, 0.9}) == 0.0);
  CHECK(essential_oscillation(thermo::test::cos_obs(), {0.0, 0.5}) == doctest::Approx(2.0));
}

TEST_CASE("potential bounds") {
  Gen g(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto phi = g.fourier(4, 0.6);
    for (int i = 0; i < 200; ++i) {
      double x = g.unit();
      CHECK(phi(x) <= phi.sup() + 1e-12);
      CHECK(phi(x) >= phi.inf() - 1e-12);
    }
    Interval iv{0.1, 0.3};
    for (int i = 0; i <= 50; ++i) {
      double x = 0.1 + 0.2 * i / 51.0;
      CHECK(phi(x) <= phi.sup_on(iv) + 1e-12);
      CHECK(phi(x) >= phi.inf_on(iv) - 1e-12);
    }
  }
  auto b = Potential::bump(0.5, 0.5, 0.25, 0.5);
  CHECK(b(0.5) == doctest::Approx(0.5));
  CHECK(b(0.1) == 0.0);
  CHECK(b.shifted(1.0)(0.1) == doctest::Approx(1.0));
}

TEST_CASE("property: sup of S_{n+k} is at most the sum of the sups along the cylinder") {
  Gen g(15);
  CylinderTree tree(deformed(2));
  tree.build_to(8);
  for (int trial = 0; trial < 40; ++trial) {
    auto phi = g.fourier(2, 0.4);
    int n = g.integer(1, 4), k = g.integer(1, 4);
    std::size_t i = std::size_t(g.integer(0, int(tree.count(n + k)) - 1));
    double whole = sup_birkhoff_on_cylinder(tree, phi, n + k, i).raw;
    double head = sup_birkhoff_on_cylinder(tree, phi, n, tree.ancestor(n + k, i, n)).bound;
    double tail = sup_birkhoff_on_cylinder(tree, phi, k, tree.image(n + k, i, n)).bound;
    CHECK(whole <= head + tail + 1e-12);
  }
}

TEST_CASE("property: oscillation of a product") {
  Gen g(16);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = g.fourier(2, 0.5), b = g.fourier(2, 0.5);
    auto ga = Observable::function([a](double x) { return std::exp(a(x)); });
    auto gb = Observable::function([b](double x) { return std::exp(b(x)); });
    auto gab = Observable::function([a, b](double x) { return std::exp(a(x) + b(x)); });
    double lo = g.range(0.0, 0.9);
    Interval iv{lo, lo + g.range(0.001, 0.1)};
    double sup_a = 0.0, sup_b = 0.0;
    for (int i = 0; i <= 64; ++i) {
      double x = iv.lo + iv.length() * i / 64.0;
      sup_a = std::max(sup_a, ga(x));
      sup_b = std::max(sup_b, gb(x));
    }
    const int q = 65;
    CHECK(essential_oscillation(gab, iv, q) <=
          essential_oscillation(ga, iv, q) * sup_b + sup_a * essential_oscillation(gb, iv, q) + 1e-12);
  }
}
