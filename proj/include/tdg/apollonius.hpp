#pragma once

#include <cmath>

#include <Eigen/Core>

#include "tdg/errors.hpp"

namespace tdg {

/// Player separations below this are treated as capture.
inline constexpr double kDegenerateSeparation = 1e-12;

/// Joint state (pursuer, evader) of the game.
template <typename Scalar>
class BasicGameState {
 public:
  using Point = Eigen::Matrix<Scalar, 2, 1>;
  using Vector = Eigen::Matrix<Scalar, 4, 1>;

  BasicGameState(const Point& pursuer, const Point& evader) : pursuer_(pursuer), evader_(evader) {
    if (!pursuer.allFinite() || !evader.allFinite()) {
      throw InvalidArgument("game state: coordinates must be finite");
    }
    if ((evader - pursuer).norm() < Scalar(kDegenerateSeparation)) {
      throw DegenerateState("game state: pursuer and evader coincide");
    }
  }

  /// Ordered pursuer-x, pursuer-y, evader-x, evader-y.
  static BasicGameState from_vector(const Vector& x) {
    return BasicGameState(x.template head<2>(), x.template tail<2>());
  }

  const Point& pursuer() const { return pursuer_; }
  const Point& evader() const { return evader_; }
  Scalar separation() const { return (evader_ - pursuer_).norm(); }

  Vector as_vector() const {
    Vector x;
    x << pursuer_, evader_;
    return x;
  }

 private:
  Point pursuer_;
  Point evader_;
};

/// Evader-to-pursuer speed ratio gamma in (0, 1), with the pursuer speed.
template <typename Scalar>
class BasicSpeedRatio {
 public:
  explicit BasicSpeedRatio(Scalar gamma, Scalar v_pursuer = Scalar(1)) : gamma_(gamma), v_pursuer_(v_pursuer) {
    if (!(gamma > Scalar(0) && gamma < Scalar(1))) {
      throw InvalidArgument("speed ratio gamma must lie in (0, 1)");
    }
    if (!(v_pursuer > Scalar(0)) || !std::isfinite(double(v_pursuer))) {
      throw InvalidArgument("pursuer speed must be positive");
    }
  }

  Scalar gamma() const { return gamma_; }
  Scalar v_pursuer() const { return v_pursuer_; }
  Scalar v_evader() const { return gamma_ * v_pursuer_; }

 private:
  Scalar gamma_;
  Scalar v_pursuer_;
};

/// Evader dominant region: the closed disk bounded by the Apollonius circle.
template <typename Scalar>
struct BasicApolloniusDisk {
  Eigen::Matrix<Scalar, 2, 1> center;
  Scalar radius;
};

enum class Dominance { EvaderDominant, PursuerDominant };

template <typename Scalar>
BasicApolloniusDisk<Scalar> apollonius_disk(const BasicGameState<Scalar>& state,
                                            const BasicSpeedRatio<Scalar>& ratio) {
  const Scalar g2 = ratio.gamma() * ratio.gamma();
  const Scalar sep = state.separation();
  if (sep < Scalar(kDegenerateSeparation)) throw DegenerateState("apollonius disk: players coincide");
  return {(state.evader() - g2 * state.pursuer()) / (Scalar(1) - g2),
          ratio.gamma() / (Scalar(1) - g2) * sep};
}

/// Boundary points belong to the evader.
template <typename Scalar>
Dominance membership(const BasicApolloniusDisk<Scalar>& disk, const Eigen::Matrix<Scalar, 2, 1>& z) {
  return (z - disk.center).norm() <= disk.radius ? Dominance::EvaderDominant : Dominance::PursuerDominant;
}

/// Signed equal-arrival residual |z - evader| - gamma |z - pursuer|.
template <typename Scalar>
Scalar verify_meeting_point(const BasicGameState<Scalar>& state, const BasicSpeedRatio<Scalar>& ratio,
                            const Eigen::Matrix<Scalar, 2, 1>& z) {
  return (z - state.evader()).norm() - ratio.gamma() * (z - state.pursuer()).norm();
}

/// Game vector field (v_P u_P, v_E u_E).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> velocity_field(const BasicSpeedRatio<Scalar>& ratio,
                                           const Eigen::Matrix<Scalar, 2, 1>& u_pursuer,
                                           const Eigen::Matrix<Scalar, 2, 1>& u_evader) {
  Eigen::Matrix<Scalar, 4, 1> f;
  f << ratio.v_pursuer() * u_pursuer, ratio.v_evader() * u_evader;
  return f;
}

using GameState = BasicGameState<double>;
using SpeedRatio = BasicSpeedRatio<double>;
using ApolloniusDisk = BasicApolloniusDisk<double>;

}  // namespace tdg
