#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdrc/types.hpp"

namespace tdrc::mdp {

// Finite MDP. Tensors are stored flat in [s][a][s'] order. Episode ends are
// encoded as gamma = 0 on a transition that re-enters through start_dist.
struct MdpSpec {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;
    std::vector<double> reward;
    std::vector<double> discount;
    Vec start_dist;

    MdpSpec() = default;
    MdpSpec(int states, int actions);

    std::size_t index(int s, int a, int sp) const {
        return (static_cast<std::size_t>(s) * n_actions + a) * n_states + sp;
    }
    double& p(int s, int a, int sp) { return transition[index(s, a, sp)]; }
    double p(int s, int a, int sp) const { return transition[index(s, a, sp)]; }
    double& r(int s, int a, int sp) { return reward[index(s, a, sp)]; }
    double r(int s, int a, int sp) const { return reward[index(s, a, sp)]; }
    double& g(int s, int a, int sp) { return discount[index(s, a, sp)]; }
    double g(int s, int a, int sp) const { return discount[index(s, a, sp)]; }

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

struct Policy {
    Mat probs;  // n_states x n_actions

    static Policy uniform(int n_states, int n_actions);
    void validate(int n_states, int n_actions) const;
};

struct FeatureMap {
    Mat phi;  // n_states x n_features

    int n_features() const { return static_cast<int>(phi.cols()); }
    Vec x(int s) const { return phi.row(s).transpose(); }
    void validate(int n_states) const;
};

struct ExpectationModel {
    Mat A;
    Vec b;
    Mat C;
    Vec d_b;

    // Whitening factor L with L^T L = pinv(C); rows span range(C).
    Mat c_whitener;
    int c_rank = 0;
    bool c_singular = false;

    int n() const { return static_cast<int>(b.size()); }
};

class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(std::string what, int rank, Mat null_space)
        : std::runtime_error(std::move(what)), rank_(rank), null_space_(std::move(null_space)) {}
    int rank() const { return rank_; }
    const Mat& null_space() const { return null_space_; }

private:
    int rank_;
    Mat null_space_;
};

class StationaryDistributionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// State-to-state chain under policy pi.
Mat state_chain(const MdpSpec& mdp, const Policy& pi);

// Solves d^T P_b = d^T with sum(d) = 1; falls back to power iteration from
// start_dist when the direct solve is not a valid distribution.
Vec stationary_distribution(const MdpSpec& mdp, const Policy& behavior);

ExpectationModel expectation_matrices(const MdpSpec& mdp, const Policy& behavior, const Policy& target,
                                      const FeatureMap& features, const std::optional<Vec>& d_override = {});

// Builds a model directly from matrices (synthetic analysis, CLI input).
ExpectationModel model_from_matrices(Mat A, Vec b, Mat C, Vec d_b = {});

Vec td_fixed_point(const ExpectationModel& model);

// Exact v_pi by solving (I - P_gamma) v = r_pi.
Vec true_values(const MdpSpec& mdp, const Policy& pi);

double condition_number(const Mat& m);

}  // namespace tdrc::mdp
