#include "tdrc/optimizers.hpp"

#include <cmath>
#include <stdexcept>

namespace tdrc::optim {

Kind parse_kind(std::string_view name) {
    if (name == "constant") return Kind::constant;
    if (name == "adagrad") return Kind::adagrad;
    if (name == "adam") return Kind::adam;
    throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

std::string to_string(Kind kind) {
    switch (kind) {
        case Kind::constant: return "constant";
        case Kind::adagrad: return "adagrad";
        case Kind::adam: return "adam";
    }
    return "?";
}

void OptimizerConfig::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("optimizer alpha must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("adam betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("optimizer epsilon must be positive");
}

Optimizer::Optimizer(OptimizerConfig config, int n) : config_(config) {
    config_.validate();
    if (config_.kind != Kind::constant) v_ = Vec::Zero(n);
    if (config_.kind == Kind::adam) m_ = Vec::Zero(n);
}

void Optimizer::apply(Vec& weights, const Vec& raw) {
    const double a = config_.alpha;
    const double eps = config_.epsilon;
    switch (config_.kind) {
        case Kind::constant:
            weights.noalias() += a * raw;
            break;
        case Kind::adagrad:
            v_.array() += raw.array().square();
            weights.array() += a * raw.array() / (v_.array().sqrt() + eps);
            break;
        case Kind::adam: {
            ++t_;
            const double b1 = config_.beta1;
            const double b2 = config_.beta2;
            m_ = b1 * m_ + (1.0 - b1) * raw;
            v_ = b2 * v_ + (1.0 - b2) * raw.cwiseAbs2();
            const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
            const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
            weights.array() += a * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
            break;
        }
    }
    if (config_.kind == Kind::adagrad) ++t_;
}

Vec Optimizer::step(const Vec& raw) {
    Vec delta = Vec::Zero(raw.size());
    apply(delta, raw);
    return delta;
}

Vec Optimizer::effective_stepsize() const {
    if (config_.kind == Kind::adagrad) return config_.alpha / (v_.array().sqrt() + config_.epsilon);
    return Vec::Constant(v_.size() ? v_.size() : 1, config_.alpha);
}

}  // namespace tdrc::optim
