#include "fracham/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace fracham;

TEST_CASE("grid spacing and nodes") {
  const Grid1D g(-1.0, 3.0, 5);
  CHECK(g.h() == doctest::Approx(1.0));
  CHECK(g.t(0) == -1.0);
  CHECK(g.t(4) == doctest::Approx(3.0));
  const auto n = g.nodes();
  REQUIRE(n.size() == 5);
  CHECK(n[2] == doctest::Approx(1.0));
}

TEST_CASE("grid rejects degenerate input") {
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(2.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("aligned index finds lattice points only") {
  const Grid1D g(-8.0, 8.0, 2049);
  CHECK(g.aligned_index(0.0) == 1024);
  CHECK(g.aligned_index(1.0) == 1152);
  CHECK(g.aligned_index(-8.0) == 0);
  CHECK_THROWS_AS(g.aligned_index(0.5 / 128.0), std::invalid_argument);
  CHECK_THROWS_AS(g.aligned_index(9.0), std::invalid_argument);
}

TEST_CASE("grid function storage is node-major") {
  const Grid1D g(0.0, 1.0, 4);
  GridFunction u(g, 2);
  u(1, 0) = 3.0;
  u(1, 1) = 4.0;
  CHECK(u.values()[2] == 3.0);
  CHECK(u.values()[3] == 4.0);
  CHECK(u.magnitude(1) == doctest::Approx(5.0));
  CHECK(u.max_magnitude() == doctest::Approx(5.0));
  const auto c1 = u.component(1);
  CHECK(c1[1] == 4.0);
  const std::vector<double> v{1, 2, 3, 4};
  u.set_component(0, v);
  CHECK(u(3, 0) == 4.0);
  CHECK_THROWS(u.set_component(0, std::vector<double>{1, 2}));
}

TEST_CASE("grid function arithmetic and sampling") {
  const Grid1D g(0.0, 1.0, 11);
  const GridFunction a = GridFunction::sample(g, [](double t) { return t; });
  const GridFunction b = GridFunction::sample(g, [](double t) { return 1.0 - t; });
  const GridFunction s = a + b;
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    CHECK(s(i, 0) == doctest::Approx(1.0));
  const GridFunction d = 2.0 * (a - b);
  CHECK(d(10, 0) == doctest::Approx(2.0));
  CHECK(d.all_finite());
  GridFunction bad = a;
  bad(3, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(bad.all_finite());
  const GridFunction other(Grid1D(0.0, 2.0, 11), 1);
  CHECK_THROWS(a + other);
}
