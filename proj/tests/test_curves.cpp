#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "impopt/curves.hpp"
#include "impopt/problems.hpp"
#include "support/oracles.hpp"

using namespace impopt;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

SampledCurve random_curve(std::mt19937_64& rng, int samples, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), step(0.1, 1.0);
  std::vector<double> params{0.0};
  std::vector<Vec> pts;
  for (int i = 0; i < samples; ++i) {
    if (i) params.push_back(params.back() + step(rng));
    Vec p(dim);
    for (int d = 0; d < dim; ++d) p[d] = u(rng);
    pts.push_back(p);
  }
  return SampledCurve(params, pts);
}

}  // namespace

TEST_CASE("sampled curve validates its input") {
  CHECK_THROWS_AS(SampledCurve({0.0}, {v2(0, 0)}), Error);
  CHECK_THROWS_AS(SampledCurve({0.0, 0.0}, {v2(0, 0), v2(1, 0)}), Error);
  CHECK_THROWS_AS(SampledCurve({0.0, 1.0}, {v2(0, 0), v3(1, 0, 0)}), Error);
  CHECK_THROWS_AS(SampledCurve({0.0, 1.0}, {v2(0, 0), v2(NAN, 0)}), Error);
}

TEST_CASE("evaluate interpolates and clamps") {
  const SampledCurve c({0.0, 2.0}, {v2(0, 0), v2(2, 4)});
  CHECK((c.evaluate(1.0) - v2(1, 2)).norm() < 1e-15);
  CHECK(c.evaluate(-1.0) == v2(0, 0));
  CHECK(c.evaluate(5.0) == v2(2, 4));
  CHECK(c.evaluate(2.0) == v2(2, 4));
}

TEST_CASE("arc length") {
  CHECK(arc_length(SampledCurve({0.0, 1.0}, {v2(0, 0), v2(1, 1)})) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const auto controls = builtin::noninvolutive_controls();
  CHECK(arc_length(controls[0].curve().base()) == doctest::Approx(3.0).epsilon(1e-12));

  // g_i(t) = (cos(i^2 t), sin(i^2 t)) / i has length i on [0, 1].
  const int i = 4;
  std::vector<double> t;
  std::vector<Vec> pts;
  for (int j = 0; j <= 20000; ++j) {
    t.push_back(j / 20000.0);
    pts.push_back(v2(std::cos(i * i * t.back()) / i, std::sin(i * i * t.back()) / i));
  }
  CHECK(arc_length(SampledCurve(t, pts)) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("pseudo inverse") {
  const MonotoneMap id({0.0, 2.0}, {0.0, 2.0});
  CHECK(pseudo_inverse(id, 0.7) == doctest::Approx(0.7));

  const MonotoneMap plateau({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 2.0});
  CHECK(pseudo_inverse(plateau, 1.0) == 2.0);

  const MonotoneMap twice({0.0, 1.0}, {0.0, 2.0});
  CHECK(pseudo_inverse(twice, 1.0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(pseudo_inverse(id, 2.5), Error);
  try {
    pseudo_inverse(id, 2.5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BeyondHorizon);
  }
}

TEST_CASE("pseudo inverse is a right inverse off plateaus") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const MonotoneMap a = oracle::random_reparam(rng, 3.0);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int q = 0; q < 20; ++q) {
      const double t = u(rng);
      CHECK(a(pseudo_inverse(a, t)) == doctest::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("canonical reparameterization") {
  const SampledCurve seg({0.0, 1.0}, {v2(0, 0), v2(3, 0)});
  const SampledCurve cs = canonical_reparam(seg);
  CHECK(cs.params() == std::vector<double>{0.0, 3.0});

  const SampledCurve stair({0.0, 5.0, 9.0}, {v2(0, 0), v2(1, 0), v2(1, 1)});
  const SampledCurve st = canonical_reparam(stair);
  CHECK(st.params() == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(st.points() == stair.points());

  const SampledCurve still({0.0, 1.0}, {v2(1, 1), v2(1, 1)});
  CHECK_THROWS_AS(canonical_reparam(still), Error);
}

TEST_CASE("canonical reparameterization is unit speed, idempotent and length preserving") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const SampledCurve c = random_curve(rng, 12, 3);
    const SampledCurve cc = canonical_reparam(c);
    for (std::size_t i = 0; i + 1 < cc.size(); ++i) {
      const double chord = (cc.point(i + 1) - cc.point(i)).norm();
      CHECK(std::abs(chord - (cc.param(i + 1) - cc.param(i))) < 1e-12);
    }
    CHECK(std::abs(arc_length(cc) - arc_length(c)) < 1e-12);
    const SampledCurve twice = canonical_reparam(cc);
    for (std::size_t i = 0; i < cc.size(); ++i) {
      CHECK(std::abs(twice.param(i) - cc.param(i)) < 1e-12);
      CHECK((twice.point(i) - cc.point(i)).norm() < 1e-12);
    }
  }
}

TEST_CASE("refine bounds piece length and keeps the curve") {
  const SampledCurve c({0.0, 1.0, 2.0}, {v2(0, 0), v2(1, 0), v2(1, 1)});
  const SampledCurve r = refine(c, 0.1);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) CHECK((r.point(i + 1) - r.point(i)).norm() <= 0.1 + 1e-12);
  CHECK(arc_length(r) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(refine(c, 0.0), Error);
}

TEST_CASE("frechet distance examples") {
  const SampledCurve L({0.0, 1.0, 2.0}, {v3(0, 0, 0), v3(0, 1, 0), v3(0, 1, 1)});
  const SampledCurve D({0.0, 1.0}, {v3(0, 0, 0), v3(0, 1, 1)});
  CHECK(frechet_distance(L, L) == 0.0);
  CHECK(frechet_distance(refine(L, 0.01), refine(D, 0.01)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02 / 0.7071));

  const auto ccw = builtin::circle_fixture(false).base();
  const auto cw = builtin::circle_fixture(true).base();
  CHECK(frechet_distance(refine(ccw, 0.01), refine(cw, 0.01)) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(strengthened_distance(refine(ccw, 0.01), refine(cw, 0.01)) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("frechet distance agrees with the recursive oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const SampledCurve a = random_curve(rng, 15, 2), b = random_curve(rng, 11, 2);
    CHECK(frechet_distance(a, b) == doctest::Approx(oracle::frechet_recursive(a.points(), b.points())).epsilon(1e-14));
  }
}

TEST_CASE("frechet distance metric axioms") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const SampledCurve a = random_curve(rng, 10, 2), b = random_curve(rng, 9, 2), c = random_curve(rng, 8, 2);
    CHECK(frechet_distance(a, b) == frechet_distance(b, a));
    CHECK(frechet_distance(a, a) == 0.0);
    CHECK(frechet_distance(a, c) <= frechet_distance(a, b) + frechet_distance(b, c) + 1e-9);
  }
}

TEST_CASE("frechet distance is invariant under reparameterization up to the refinement") {
  std::mt19937_64 rng(9);
  const double h = 0.01;
  for (int trial = 0; trial < 10; ++trial) {
    const SampledCurve c = canonical_reparam(random_curve(rng, 6, 2));
    const double L = c.back_param();
    const MonotoneMap sigma = oracle::random_reparam(rng, L);
    // Resample c o sigma, keeping every vertex of c.
    std::vector<double> r;
    for (int j = 0; j <= 400; ++j) r.push_back(L * j / 400.0);
    for (double s : c.params()) r.push_back(pseudo_inverse(sigma, s));
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end(), [](double a, double b) { return b - a < 1e-12; }), r.end());
    std::vector<Vec> pts;
    for (double x : r) pts.push_back(c.evaluate(sigma(x)));
    const SampledCurve cs(r, pts);
    CHECK(frechet_distance(refine(c, h), refine(cs, h)) <= h);
  }
}

TEST_CASE("space-time curve truncation") {
  const SpaceTimeCurve lin(SampledCurve({0.0, 2.0}, {v2(0, 0), v2(2, 2)}));
  const SpaceTimeCurve t1 = truncate_at_time(lin, 1.0);
  CHECK(t1.final_time() == doctest::Approx(1.0));
  CHECK(t1.state(t1.size() - 1)[0] == doctest::Approx(1.0));

  // Plateau at theta = 1 from s = 1 to s = 2.
  const SpaceTimeCurve jump(SampledCurve({0.0, 1.0, 2.0, 3.0}, {v2(0, 0), v2(1, 0), v2(1, 1), v2(2, 1)}));
  const SpaceTimeCurve tj = truncate_at_time(jump, 1.0);
  CHECK(tj.final_time() == doctest::Approx(1.0));
  CHECK(tj.state(tj.size() - 1)[0] == doctest::Approx(1.0));

  const SpaceTimeCurve shortc(SampledCurve({0.0, 1.0}, {v2(0, 0), v2(0.5, 1)}));
  const SpaceTimeCurve ts = truncate_at_time(shortc, 3.0);
  CHECK(ts.base().points() == shortc.base().points());
}

TEST_CASE("strengthened distance of the three impulse orderings") {
  const auto cs = builtin::noninvolutive_controls();
  const double target = 2.0 - 1.0 / std::sqrt(2.0);
  CHECK(strengthened_distance_at(cs[0].curve(), cs[1].curve(), 1.0, 0.01) == doctest::Approx(target).epsilon(0.015));
  CHECK(strengthened_distance_at(cs[1].curve(), cs[2].curve(), 1.0, 0.01) == doctest::Approx(target).epsilon(0.015));
  CHECK(strengthened_distance_at(cs[0].curve(), cs[2].curve(), 1.0, 0.01) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("lift of a continuous function projects back exactly") {
  std::vector<double> t;
  std::vector<Vec> x;
  for (int j = 0; j <= 20; ++j) {
    t.push_back(j / 20.0);
    x.push_back((Vec(1) << t.back() * t.back()).finished());
  }
  const SpaceTimeCurve c = lift_bv(t, x);
  const auto back = project_time(c, t);
  for (std::size_t j = 0; j < t.size(); ++j) CHECK(back[j] == x[j]);
}

TEST_CASE("lift of a step contains the vertical segment and projects to the right limit") {
  const std::vector<double> t{0.0, 1.0, 1.0, 2.0};
  const std::vector<Vec> x{v2(0, 0), v2(0, 0), v2(0, 1), v2(0, 1)};
  const SpaceTimeCurve c = lift_bv(t, x);
  bool found = false;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (c.base().point(i) == v3(1, 0, 0) && c.base().point(i + 1) == v3(1, 0, 1)) found = true;
  }
  CHECK(found);
  const std::vector<double> q{0.5, 1.0, 1.5};
  const auto y = project_time(c, q);
  CHECK(y[0] == v2(0, 0));
  CHECK(y[1] == v2(0, 1));
  CHECK(y[2] == v2(0, 1));

  const std::vector<double> graph_t{0.0, 0.5, 1.0};
  const std::vector<Vec> graph_x{(Vec(1) << 0.0).finished(), (Vec(1) << 0.5).finished(), (Vec(1) << 1.0).finished()};
  const auto id = project_time(lift_bv(graph_t, graph_x), graph_t);
  for (std::size_t j = 0; j < 3; ++j) CHECK(id[j][0] == doctest::Approx(graph_t[j]));
}

TEST_CASE("staircase jump policy resolves jumps axis by axis") {
  const std::vector<double> t{0.0, 0.0, 1.0};
  const std::vector<Vec> x{v2(0, 0), v2(1, 1), v2(1, 1)};
  const SpaceTimeCurve c = lift_bv(t, x, staircase_jump());
  CHECK(c.base().point(1) == v3(0, 1, 0));
  CHECK(arc_length(truncate_at_time(c, 0.0).base()) == doctest::Approx(2.0));
}

TEST_CASE("canonical parameterization depends continuously on the curve") {
  // Base polyline plus an eps-scaled bump; compare canonical parameterizations on a common grid.
  const SampledCurve base({0.0, 1.0, 2.0}, {v2(0, 0), v2(1, 0), v2(1, 1)});
  const SampledCurve cb = canonical_reparam(base);
  for (double eps : {0.1, 0.01, 0.001}) {
    std::vector<double> s;
    std::vector<Vec> pts;
    for (int j = 0; j <= 200; ++j) {
      s.push_back(2.0 * j / 200.0);
      Vec p = base.evaluate(s.back());
      if (s.back() < 1.0) p[1] += eps * std::sin(std::numbers::pi * s.back());
      pts.push_back(p);
    }
    const SampledCurve ce = canonical_reparam(SampledCurve(s, pts));
    const int M = 2000;
    const double La = cb.back_param(), Lb = ce.back_param();
    double sup = 0.0, l1 = 0.0;
    for (int j = 0; j <= M; ++j) sup = std::max(sup, (cb.evaluate(La * j / M) - ce.evaluate(Lb * j / M)).norm());
    for (int j = 0; j < M; ++j) {
      const Vec da = (cb.evaluate(La * (j + 1) / M) - cb.evaluate(La * j / M)) / (La / M);
      const Vec db = (ce.evaluate(Lb * (j + 1) / M) - ce.evaluate(Lb * j / M)) / (Lb / M);
      l1 += (da - db).norm() * (La / M);
    }
    CHECK(sup + l1 < 10.0 * eps);
  }
}
