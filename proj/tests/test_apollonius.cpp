#include <doctest.h>

#include "oracle.hpp"
#include "tdg/apollonius.hpp"
#include "tdg/errors.hpp"

using namespace tdg;
using namespace tdg::testing;

TEST_CASE("unit example") {
  const GameState x({0, 0}, {1, 0});
  const ApolloniusDisk d = apollonius_disk(x, SpeedRatio(0.5));
  CHECK(d.center.x() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(d.center.y() == doctest::Approx(0.0));
  CHECK(d.radius == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("scenario disk") {
  const GameState x({0.5, 0.4}, {1.2, 1.0});
  const ApolloniusDisk d = apollonius_disk(x, SpeedRatio(0.4));
  CHECK(d.center.x() == doctest::Approx(1.3333333333333333).epsilon(1e-14));
  CHECK(d.center.y() == doctest::Approx(1.1142857142857143).epsilon(1e-14));
  CHECK(d.radius == doctest::Approx(0.4390259265377565).epsilon(1e-14));

  const ApolloniusDisk d0 = apollonius_disk(GameState({0.5, 0.4}, {0, 0}), SpeedRatio(0.4));
  CHECK(d0.center.x() == doctest::Approx(-0.09523809523809523).epsilon(1e-13));
  CHECK(d0.center.y() == doctest::Approx(-0.0761904761904762).epsilon(1e-13));
  CHECK(d0.radius == doctest::Approx(0.3049106779729928).epsilon(1e-13));
}

TEST_CASE("disk matches the division-point construction") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Point2 p = rng.point(-3, 3), e = rng.point(-3, 3);
    const double g = rng.uniform(0.05, 0.95);
    const ApolloniusDisk d = apollonius_disk(GameState(p, e), SpeedRatio(g));
    const auto [c, r] = apollonius_by_division(p, e, g);
    CHECK((d.center - c).norm() <= 1e-12 * (1.0 + c.norm()));
    CHECK(d.radius == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("center distances and equal-time circle") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Point2 p = rng.point(-3, 3), e = rng.point(-3, 3);
    const double g = rng.uniform(0.05, 0.95);
    const SpeedRatio ratio(g, rng.uniform(0.5, 3.0));
    const GameState x(p, e);
    const ApolloniusDisk d = apollonius_disk(x, ratio);
    const double scale = 1.0 + d.radius + d.center.norm();
    CHECK(std::abs((d.center - e).norm() - g * d.radius) <= 1e-12 * scale);
    CHECK(std::abs((d.center - p).norm() - d.radius / g) <= 1e-12 * scale / g);
    const double a = rng.uniform(0, 2 * kPi);
    const Point2 z = d.center + d.radius * Vec2(std::cos(a), std::sin(a));
    CHECK(std::abs(verify_meeting_point(x, ratio, z)) <= 1e-11 * scale);
  }
}

TEST_CASE("membership") {
  const GameState x({0, 0}, {1, 0});
  const SpeedRatio ratio(0.5);
  const ApolloniusDisk d = apollonius_disk(x, ratio);
  CHECK(membership(d, Point2(1.0, 0.0)) == Dominance::EvaderDominant);
  CHECK(membership(d, Point2(d.center + d.radius * Vec2(0.0, 1.0))) == Dominance::EvaderDominant);  // on the circle
  CHECK(membership(d, Point2(2.0 + 1e-12, 0.0)) == Dominance::PursuerDominant);
  CHECK(membership(d, Point2(0.1, 0.0)) == Dominance::PursuerDominant);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(SpeedRatio(1.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedRatio(0.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedRatio(1.2), InvalidArgument);
  CHECK_THROWS_AS(SpeedRatio(0.5, -1.0), InvalidArgument);
  CHECK_THROWS_AS(GameState({0.5, 0.4}, {0.5, 0.4}), DegenerateState);
  CHECK_THROWS_AS(GameState({0.5, NAN}, {0.5, 0.4}), InvalidArgument);
  CHECK(SpeedRatio(0.4, 1.0).v_evader() == doctest::Approx(0.4));
}

TEST_CASE("velocity field") {
  const SpeedRatio ratio(0.4, 2.0);
  const Eigen::Vector4d f = velocity_field(ratio, Vec2(1, 0), Vec2(0, 1));
  CHECK(f[0] == 2.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 0.0);
  CHECK(f[3] == doctest::Approx(0.8));
}

TEST_CASE("templated on the scalar type") {
  const BasicGameState<float> x(Eigen::Vector2f(0, 0), Eigen::Vector2f(1, 0));
  const auto d = apollonius_disk(x, BasicSpeedRatio<float>(0.5f));
  CHECK(d.center.x() == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(d.radius == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}
