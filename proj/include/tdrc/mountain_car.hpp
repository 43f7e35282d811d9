#pragma once

#include "tdrc/rng.hpp"

namespace tdrc::env {

struct MountainCarState {
    double position = -0.5;
    double velocity = 0.0;
};

struct MountainCarStep {
    MountainCarState state;
    double reward = -1.0;
    bool terminated = false;
};

namespace mountain_car {
inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.5;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoal = 0.5;
inline constexpr int kActions = 3;  // reverse, coast, forward
}  // namespace mountain_car

// Position uniform in [-0.6, -0.4], zero velocity.
MountainCarState mountain_car_reset(Rng& rng);

// action: 0 reverse, 1 coast, 2 forward. Throws std::invalid_argument otherwise.
MountainCarStep mountain_car_step(const MountainCarState& state, int action);

}  // namespace tdrc::env
