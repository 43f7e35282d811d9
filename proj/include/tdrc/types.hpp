#pragma once

#include <Eigen/Dense>

namespace tdrc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One sampled step of a finite prediction problem. Feature vectors are copied
// in so a transition can outlive the problem that produced it.
struct Transition {
    Vec x;
    Vec x_next;
    int state = 0;
    int action = 0;
    int next_state = 0;
    double reward = 0.0;
    double rho = 1.0;
    double gamma = 0.0;
};

}  // namespace tdrc
