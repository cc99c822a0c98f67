#include <doctest.h>

#include <cmath>
#include <random>

#include "impopt/cost.hpp"
#include "impopt/problems.hpp"
#include "support/oracles.hpp"

using namespace impopt;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec s1(double a) { return (Vec(1) << a).finished(); }

LagrangianSpec concave_spec() {
  LagrangianSpec l;
  l.name = "concave";
  l.L = [](const Vec&, const Vec& u) { return -u.squaredNorm(); };
  return l;
}

}  // namespace

TEST_CASE("extended reals") {
  CHECK(ExtendedReal(2.0).is_finite());
  CHECK(ExtendedReal::infinity().is_infinite());
  CHECK(ExtendedReal(1.0) == ExtendedReal(1.0));
}

TEST_CASE("lambda examples") {
  const LagrangianSpec h = builtin::norm_plus_one_lagrangian(2);
  CHECK(lambda_eval(h, Vec::Zero(3), 0.0, v2(0.6, 0.8)).value() == doctest::Approx(1.0));
  CHECK(lambda_eval(h, Vec::Zero(3), 0.6, v2(0.0, 0.8)).value() == doctest::Approx(1.0));

  const LagrangianSpec fuel = builtin::fuel_lagrangian(1);
  CHECK(lambda_eval(fuel, s1(0.0), 0.0, s1(-3.0)).value() == doctest::Approx(3.0));
  CHECK(lambda_from_lagrangian(fuel, s1(0.0), 0.0, s1(-3.0)).value() == doctest::Approx(3.0).epsilon(1e-9));

  const LagrangianSpec g2 = builtin::gap2_lagrangian(1.0);
  CHECK(lambda_eval(g2, v2(0.5, 0.0), 0.0, s1(1.0)).is_infinite());
  CHECK(lambda_from_lagrangian(g2, v2(0.5, 0.0), 0.0, s1(1.0)).is_infinite());
  CHECK(lambda_eval(g2, v2(0.0, 0.0), 0.0, s1(1.0)).value() == 0.0);

  CHECK_THROWS_AS(lambda_eval(fuel, s1(0.0), -0.1, s1(1.0)), Error);
}

TEST_CASE("closed forms agree with the generic evaluation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 1.0);
  const std::vector<std::pair<LagrangianSpec, int>> specs{{builtin::fuel_lagrangian(1), 1},
                                                          {builtin::norm_plus_one_lagrangian(2), 3},
                                                          {builtin::gap1_lagrangian(), 2},
                                                          {builtin::gap2_lagrangian(2.0), 2}};
  for (const auto& [spec, n] : specs) {
    LagrangianSpec generic = spec;
    generic.auxiliary = nullptr;
    const int k = spec.name == "norm-plus-one" ? 2 : 1;
    for (int i = 0; i < 500; ++i) {
      Vec y(n), w(k);
      for (int d = 0; d < n; ++d) y[d] = u(rng);
      for (int d = 0; d < k; ++d) w[d] = u(rng);
      const double v = pos(rng);
      const double a = lambda_eval(spec, y, v, w).value();
      const double b = lambda_eval(generic, y, v, w).value();
      CHECK(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("numerical recession matches the closed form") {
  const LagrangianSpec h = builtin::norm_plus_one_lagrangian(2);
  const Vec w = v2(0.3, -0.4);
  const double r = numerical_recession(h, Vec::Zero(3), w).value();
  CHECK(std::abs(r - 0.5) <= 1e-6 * 0.5);
  CHECK(numerical_recession(builtin::gap2_lagrangian(2.0), v2(0.5, 0), s1(1.0)).is_infinite());
}

TEST_CASE("lambda is positively homogeneous") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.0, 1.0), kap(0.1, 10.0);
  for (const auto& spec : {builtin::fuel_lagrangian(2), builtin::norm_plus_one_lagrangian(2)}) {
    for (int i = 0; i < 2000; ++i) {
      const Vec y = v2(u(rng), u(rng)), w = v2(u(rng), u(rng));
      const double v = pos(rng), kappa = kap(rng);
      const double a = lambda_eval(spec, y, kappa * v, kappa * w).value();
      const double b = kappa * lambda_eval(spec, y, v, w).value();
      CHECK(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("convexity sampling") {
  CHECK(convexity_check(builtin::norm_plus_one_lagrangian(2), Vec::Zero(3), 2, 2000).convex());
  CHECK(convexity_check(builtin::fuel_lagrangian(1), Vec::Zero(1), 1, 2000).convex());
  const ConvexityReport bad = convexity_check(concave_spec(), Vec::Zero(1), 1, 2000);
  CHECK_FALSE(bad.convex());
  CHECK(bad.violations.front().excess > 0.0);
}

TEST_CASE("growth sampling") {
  const GrowthReport g = growth_check(builtin::norm_plus_one_lagrangian(2), 3, 2, 2000);
  CHECK(g.violations == 0);
  CHECK(g.worst_margin >= -1e-12);
}

TEST_CASE("lambda lower bound on the unit half sphere") {
  // L = sqrt(1 + |u|^2) >= |u| gives b = 1 and lambda >= |(v, w)| / sqrt(2).
  const LagrangianSpec h = builtin::norm_plus_one_lagrangian(2);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 2000; ++i) {
    Vec z(3);
    for (int d = 0; d < 3; ++d) z[d] = g(rng);
    z[0] = std::abs(z[0]);
    z.normalize();
    CHECK(lambda_eval(h, Vec::Zero(3), z[0], z.tail(2)).value() >= 1.0 / std::sqrt(2.0) - 1e-12);
  }
}

TEST_CASE("extended cost examples") {
  const ExtendedReal c = extended_cost(builtin::fuel_lagrangian(1), builtin::fuel_system(),
                                       builtin::fuel_impulse_control(), Vec::Zero(1));
  CHECK(std::abs(c.value() - 1.0) < 1e-6);

  const GeneralizedControl idle = from_ordinary(OrdinaryControl({0.0, 1.0}, {Vec::Zero(2)}));
  CHECK(extended_cost(builtin::norm_plus_one_lagrangian(2), builtin::integrator(2), idle, Vec::Zero(2)).value() ==
        doctest::Approx(1.0).epsilon(1e-12));

  // A jump in gap2 away from y1 = 0 costs +infinity.
  const std::vector<Jump> jump{{0.5, s1(1.0)}};
  CHECK(extended_cost(builtin::gap2_lagrangian(2.0), builtin::gap_system(), impulse_control(jump, 1.0, 1),
                      v2(1.0, 0.0))
            .is_infinite());
}

TEST_CASE("needle costs decrease toward the impulse cost") {
  double prev = INFINITY;
  for (int i : {4, 8, 16, 32}) {
    const double c = extended_cost(builtin::fuel_lagrangian(1), builtin::fuel_system(),
                                   from_ordinary(builtin::fuel_needle(i)), Vec::Zero(1))
                         .value();
    // J(u_i) = ubar_i / i in closed form.
    CHECK(c == doctest::Approx(1.0 / (i * (1.0 - std::exp(-1.0 / i)))).epsilon(1e-9));
    CHECK(c < prev);
    CHECK(c > 1.0);
    prev = c;
  }
}

TEST_CASE("extended cost of an ordinary control equals the time-domain integral") {
  std::mt19937_64 rng(4);
  const LagrangianSpec h = builtin::norm_plus_one_lagrangian(2);
  for (int trial = 0; trial < 10; ++trial) {
    const OrdinaryControl u = oracle::random_control(rng, 2, 5, 1.0);
    double direct = 0.0;
    for (std::size_t j = 0; j < u.intervals(); ++j) {
      direct += std::sqrt(1.0 + u.values()[j].squaredNorm()) * (u.times()[j + 1] - u.times()[j]);
    }
    const double c = extended_cost(h, builtin::integrator(2), from_ordinary(u), Vec::Zero(2)).value();
    CHECK(std::abs(c - direct) < 1e-5);
  }
}

TEST_CASE("lower semicontinuity probes") {
  const std::vector<double> eps{0.3, 0.1, 0.03, 0.01};
  const LscReport fuel = lsc_probe(builtin::fuel_lagrangian(1), builtin::fuel_system(),
                                   builtin::fuel_impulse_control(), Vec::Zero(1), eps);
  CHECK(fuel.holds);
  // Regularization keeps the mass of the impulse, so the fuel cost stays 1.
  for (const auto& c : fuel.costs) CHECK(c.value() == doctest::Approx(1.0).epsilon(1e-9));

  std::mt19937_64 rng(5);
  const GeneralizedControl ord = from_ordinary(oracle::random_control(rng, 1, 3, 1.0));
  const LscReport r = lsc_probe(builtin::fuel_lagrangian(1), builtin::fuel_system(), ord, Vec::Zero(1), eps);
  CHECK(r.holds);
  CHECK(std::abs(r.costs.back().value() - r.reference.value()) < 1e-6);
}
