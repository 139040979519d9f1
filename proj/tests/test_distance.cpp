#include <doctest.h>

#include <cmath>

#include "bnsens/distance.hpp"
#include "bnsens/engine.hpp"
#include "bnsens/error.hpp"
#include "testkit.hpp"

using namespace bnsens;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::syntax;
}

}  // namespace

TEST_CASE("query bounds closed form") {
  // p=0.3, d=1: lower = 0.3/e / (0.3/e + 0.7), upper = 0.3e / (0.3e + 0.7)
  const auto b = query_bounds(0.3, 1.0);
  CHECK(b.lower == doctest::Approx(0.3 / M_E / (0.3 / M_E + 0.7)));
  CHECK(b.upper == doctest::Approx(0.3 * M_E / (0.3 * M_E + 0.7)));
  CHECK(query_bounds(0.3, 0.0).lower == doctest::Approx(0.3));
  CHECK(query_bounds(0.3, 0.0).upper == doctest::Approx(0.3));
  CHECK(query_bounds(0.0, 5.0).upper == 0.0);
  CHECK(query_bounds(1.0, 5.0).lower == 1.0);
  CHECK(query_bounds(0.4, INFINITY).lower == 0.0);
  CHECK(query_bounds(0.4, INFINITY).upper == 1.0);
  CHECK(code_of([] { query_bounds(1.2, 1.0); }) == Errc::out_of_range);
  CHECK(code_of([] { query_bounds(0.2, -1.0); }) == Errc::out_of_range);
}

TEST_CASE("bound curve samples evenly") {
  const auto curve = bound_curve(0.5, 5);
  REQUIRE(curve.size() == 5);
  CHECK(curve[2].p == 0.5);
  CHECK(curve[2].upper == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))));
  for (const auto& pt : curve) CHECK(pt.lower <= pt.p);
  CHECK(code_of([] { bound_curve(0.5, 1); }) == Errc::out_of_range);
}

TEST_CASE("cpt distance is the largest log-odds change") {
  const auto net = testkit::fire();
  // Alarm rows: (t t) .5, (t f) .99, (f t) .85, (f f) .0001
  const std::vector<ParameterDelta> ds{{{"Alarm", "t", {{"Fire", "t"}, {"Tampering", "t"}}}, -0.2},
                                       {{"Alarm", "f", {{"Fire", "f"}, {"Tampering", "t"}}}, 0.1}};
  const double want = std::max(std::abs(std::log(0.3 / 0.7)), std::abs(std::log(0.75 / 0.25) - std::log(0.85 / 0.15)));
  CHECK(cpt_distance(net, "Alarm", ds) == doctest::Approx(want).epsilon(1e-12));
  CHECK(cpt_distance(net, "Alarm", {}) == 0.0);
  const std::vector<ParameterDelta> to_zero{{{"Fire", "t", {}}, -0.01}};
  CHECK(cpt_distance(net, "Fire", to_zero) == INFINITY);
  const std::vector<ParameterDelta> foreign{{{"Fire", "t", {}}, 0.01}};
  CHECK(code_of([&] { cpt_distance(net, "Alarm", foreign); }) == Errc::structure_mismatch);
}

TEST_CASE("rows with zero parent probability do not count") {
  auto net = testkit::fire();
  net = net.with_row(net.id("Tampering"), 0, std::vector<double>{0.0, 1.0});
  const std::vector<ParameterDelta> ds{{{"Alarm", "t", {{"Fire", "t"}, {"Tampering", "t"}}}, -0.4}};
  CHECK(cpt_distance(net, "Alarm", ds) == 0.0);
  CHECK(global_distance_brute(net, apply_deltas(net, ds)) == 0.0);
}

TEST_CASE("combined distance adds disjoint families and refuses overlaps") {
  const auto net = testkit::fire();
  const std::vector<ParameterDelta> ds{{{"Fire", "t", {}}, 0.01}, {{"Tampering", "t", {}}, -0.01}};
  const double want = std::log(0.02 / 0.98) - std::log(0.01 / 0.99) + std::log(0.02 / 0.98) - std::log(0.01 / 0.99);
  CHECK(combined_distance(net, ds) == doctest::Approx(want).epsilon(1e-12));
  CHECK(global_distance_brute(net, apply_deltas(net, ds)) == doctest::Approx(want).epsilon(1e-12));
  const std::vector<ParameterDelta> overlap{{{"Fire", "t", {}}, 0.01}, {{"Smoke", "t", {{"Fire", "t"}}}, -0.1}};
  CHECK(code_of([&] { combined_distance(net, overlap); }) == Errc::non_disjoint_families);
}

TEST_CASE("global distance edge cases") {
  const auto net = testkit::fire();
  CHECK(global_distance_brute(net, net) == 0.0);
  const std::vector<ParameterDelta> kill{{{"Fire", "t", {}}, -0.01}};
  CHECK(global_distance_brute(net, apply_deltas(net, kill)) == INFINITY);
  CHECK(code_of([&] { global_distance_brute(net, testkit::tiny2()); }) == Errc::structure_mismatch);
}

TEST_CASE("row-wise log-odds distance understates opposite moves in two rows") {
  // U uniform; theta_{x|u1}: .5 -> .9 and theta_{x|u2}: .9 -> .5 both move 2.197 in log-odds,
  // but the world ratios run from .2 (x'|u1) to 5 (x'|u2).
  BayesianNetwork net;
  net.add_variable("U", {"u1", "u2"});
  net.add_variable("X", {"x", "nx"});
  net.set_cpt("U", {}, {0.5, 0.5});
  net.set_cpt("X", {"U"}, {0.5, 0.5, 0.9, 0.1});
  const std::vector<ParameterDelta> ds{{{"X", "x", {{"U", "u1"}}}, 0.4}, {{"X", "x", {{"U", "u2"}}}, -0.4}};
  CHECK(cpt_distance(net, "X", ds) == doctest::Approx(std::log(9.0)));
  CHECK(global_distance_brute(net, apply_deltas(net, ds)) == doctest::Approx(std::log(25.0)));
}

TEST_CASE("single-CPT distance against enumeration on random networks") {
  testkit::Rng rng(31);
  testkit::NetShape shape;
  shape.max_vars = 8;
  for (int trial = 0; trial < 40; ++trial) {
    const auto net = testkit::random_network(rng, shape);
    const VarId x = rng() % net.size();
    std::vector<ParameterDelta> ds;
    for (std::size_t r = 0; r < net.cpt(x).rows(); ++r) {
      if (rng() % 2) continue;
      const double t = net.cpt(x).at(r, 0);
      ds.push_back({net.describe(Cell{x, r, 0}), testkit::uniform(rng, -t * 0.99, (1 - t) * 0.99)});
    }
    const auto after = apply_deltas(net, ds);
    const double d = cpt_distance(net, net.variable(x).name, ds);
    CHECK(d == doctest::Approx(testkit::brute_cpt_distance(net, after, x)).epsilon(1e-12));
    // One moved row: the two measures coincide. Several: the row-wise value is a lower bound.
    const double global = global_distance_brute(net, after);
    if (ds.size() == 1)
      CHECK(std::abs(d - global) <= 1e-9);
    else
      CHECK(d <= global + 1e-9);
  }
}
