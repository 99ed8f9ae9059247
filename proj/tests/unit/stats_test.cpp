#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace thermo;
using thermo::test::Gen;

TEST_CASE("linear fit recovers exact lines") {
  Gen g(1);
  for (int trial = 0; trial < 20; ++trial) {
    double a = g.range(-3, 3), b = g.range(-3, 3);
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back(g.range(-5, 5));
      y.push_back(a + b * x.back());
    }
    auto f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(b).epsilon(1e-10));
    CHECK(f.intercept == doctest::Approx(a).epsilon(1e-10));
    CHECK(f.r2 == doctest::Approx(1.0));
  }
}

TEST_CASE("summary statistics") {
  std::vector<double> v{1, 2, 3, 4};
  auto m = mean_se(v);
  CHECK(m.mean == 2.5);
  CHECK(m.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(median(v) == 2.5);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
}

TEST_CASE("kolmogorov-smirnov distances") {
  // the k/(N+1) normal quantiles sit within 1/N of the normal law
  const int N = 2000;
  std::vector<double> z;
  for (int k = 1; k <= N; ++k) {
    double p = double(k) / (N + 1), lo = -10, hi = 10;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    z.push_back(lo);
  }
  CHECK(ks_normal(z) < 1.0 / N);
  for (auto& x : z) x += 1.0;
  CHECK(ks_normal(z) == doctest::Approx(normal_cdf(0.5) - normal_cdf(-0.5)).epsilon(1e-2));
  std::vector<double> u{0.1, 0.2, 0.3};
  CHECK(ks_distance(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.7));
}

TEST_CASE("bootstrap intervals are seeded") {
  Gen g(2);
  auto v = g.vec(500, 0.0, 1.0);
  auto mean = [](std::span<const double> s) {
    double t = 0;
    for (double x : s) t += x;
    return t / double(s.size());
  };
  auto a = bootstrap_ci(v, mean, 200, 5), b = bootstrap_ci(v, mean, 200, 5);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.lo < mean(v));
  CHECK(mean(v) < a.hi);
}

TEST_CASE("parallel_for chunking does not depend on the worker count") {
  auto chunks = [](const char* threads) {
    setenv("THERMO_THREADS", threads, 1);
    std::mutex mu;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    parallel_for(10007, [&](std::size_t b, std::size_t e) {
      std::lock_guard lock(mu);
      seen.insert({b, e});
    }, 100);
    return seen;
  };
  auto one = chunks("1"), four = chunks("4");
  unsetenv("THERMO_THREADS");
  CHECK(one == four);
  CHECK(one.size() == 101);
  CHECK(one.rbegin()->second == 10007);
}

TEST_CASE("random streams") {
  CHECK(stream_tag("a") != stream_tag("b"));
  Rng a = make_stream(1, stream_tag("x"), 0), b = make_stream(1, stream_tag("x"), 0);
  Rng c = make_stream(1, stream_tag("x"), 1);
  auto va = a(), vb = b(), vc = c();
  CHECK(va == vb);
  CHECK(va != vc);
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    double u = uniform01(r);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("csv round trip") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CsvTable t({"a", "b", "c"});
  t.add_row({1, 0.5, "x,y"});
  t.add_row({true, std::string("q\"uote"), -2L});
  auto dir = std::filesystem::temp_directory_path() / "thermo_unit_csv";
  t.write(dir / "t.csv");
  auto rows = read_csv(dir / "t.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] == std::vector<std::string>{"1", "0.5", "x,y"});
  CHECK(rows[2] == std::vector<std::string>{"true", "q\"uote", "-2"});
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::filesystem::remove_all(dir);
}
