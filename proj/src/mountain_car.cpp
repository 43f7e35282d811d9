#include "tdrc/mountain_car.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdrc::env {

using namespace mountain_car;

MountainCarState mountain_car_reset(Rng& rng) { return {rng.uniform(-0.6, -0.4), 0.0}; }

MountainCarStep mountain_car_step(const MountainCarState& state, int action) {
    if (action < 0 || action >= kActions) throw std::invalid_argument("mountain car action must be 0, 1 or 2");
    MountainCarStep out;
    double v = state.velocity + 0.001 * (action - 1) - 0.0025 * std::cos(3.0 * state.position);
    v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
    double p = state.position + v;
    p = std::clamp(p, kMinPosition, kMaxPosition);
    if (p == kMinPosition && v < 0.0) v = 0.0;
    out.state = {p, v};
    out.reward = -1.0;
    out.terminated = p >= kGoal;
    return out;
}

}  // namespace tdrc::env
