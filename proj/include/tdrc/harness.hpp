#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdrc/agents.hpp"
#include "tdrc/environments.hpp"
#include "tdrc/metrics.hpp"
#include "tdrc/optimizers.hpp"
#include "tdrc/stability.hpp"
#include "tdrc/tile_coder.hpp"

namespace tdrc::harness {

enum class Protocol { online, batch, reward_scale, control };

Protocol parse_protocol(std::string_view name);
std::string to_string(Protocol p);

struct GridOverride {
    std::vector<double> alpha;
    std::vector<double> eta;
    std::vector<double> beta;
};

struct ExperimentConfig {
    Protocol protocol = Protocol::online;
    std::vector<std::string> environments{"randomwalk-tabular"};
    std::vector<std::string> algorithms{"td", "tdrc"};
    optim::OptimizerConfig optimizer{optim::Kind::adagrad};
    // Empty grids fall back to per-algorithm defaults.
    std::vector<double> alpha;
    std::vector<double> eta;
    std::vector<double> beta;
    std::map<std::string, GridOverride> overrides;
    double clip = 1.0;
    int n_runs = 25;
    int n_steps = 3000;
    std::uint64_t seed_base = 0;
    std::string output = "results";
    double reward_scale = 1.0;
    std::optional<std::vector<double>> initial_w;

    int dataset_size = 100000;
    int minibatch_size = 8;
    std::vector<int> update_budgets;

    std::vector<double> reward_scales;

    long n_env_steps = 100000;
    int episode_cap = 5000;
    double epsilon = 0.1;
    double gamma = 0.99;
    int curve_stride = 1000;
    std::optional<env::TileCoderConfig> tiles;  // default depends on method family
    bool scale_alpha_by_tilings = true;

    // Drop per-step curves after computing AUCs (large sweeps).
    bool keep_curves = true;
    // False when the config omitted "optimizer"; protocol defaults apply.
    bool optimizer_explicit = false;

    int workers = 0;  // 0: TDRC_WORKERS or hardware concurrency
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

struct HyperPoint {
    double alpha = 0.0;
    double eta = 1.0;
    double beta = 0.0;
};

std::vector<double> powers_of_two(int lo, int hi, double scale = 1.0);
// Full grid for one algorithm under the protocol's defaults and overrides.
std::vector<HyperPoint> hyper_grid(const ExperimentConfig& c, const std::string& algorithm);

int worker_count(int requested);
// Runs fn(i) for i in [0, n) on a bounded pool. fn must only touch state keyed by i.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Optimizer used for `algorithm` under this config's protocol.
optim::OptimizerConfig optimizer_for(const ExperimentConfig& c, const std::string& algorithm);

// Per-run transition stream key: shared by every algorithm and hyper setting
// so comparisons use common random numbers.
std::uint64_t run_key(std::uint64_t seed_base, int run, std::uint64_t purpose = 0);

// --- online prediction ---

struct PredictionSetup {
    env::Problem problem;
    mdp::ExpectationModel model;
    Vec w0;
};
PredictionSetup make_setup(const std::string& environment, double reward_scale,
                           const std::optional<std::vector<double>>& initial_w);

// Curve entry t is the RMSPBE before update t; length n_steps.
metrics::RunResult run_online_single(const PredictionSetup& setup, const env::TransitionTable& table,
                                     agents::Algorithm alg, const agents::Hyper& hyper,
                                     const optim::OptimizerConfig& opt, int n_steps, std::uint64_t seed_base,
                                     int run);

std::vector<metrics::RunResult> run_online(const ExperimentConfig& c);

// --- batch ---

struct BatchPoint {
    std::string environment;
    std::string algorithm;
    int budget = 0;
    double best_alpha = 0.0;
    metrics::Stats auc;
};

struct BatchResult {
    std::vector<BatchPoint> points;
    std::vector<metrics::RunResult> runs;  // full curves at the largest budget
};

BatchResult run_batch(const ExperimentConfig& c);

// First budget whose best AUC is within (1 + tol) of `target`; -1 if never.
int first_budget_within(const std::vector<BatchPoint>& points, const std::string& algorithm, double target,
                        double tol = 0.1);

// --- reward scale ---

struct RewardScaleCell {
    std::string environment;
    double scale = 1.0;
    double beta = 1.0;
    double td_alpha = 0.0;
    double tdrc_alpha = 0.0;
    metrics::Stats td;
    metrics::Stats tdrc;
    double score = 0.0;
};

std::vector<RewardScaleCell> run_reward_scale(const ExperimentConfig& c);

// --- control ---

struct ControlRun {
    metrics::RunResult result;  // step-indexed steps-to-goal curve sampled every curve_stride
    std::vector<int> episode_lengths;
    bool clamped = false;
};

ControlRun run_control_single(const ExperimentConfig& c, const std::string& method, const HyperPoint& hp, int run);
std::vector<ControlRun> run_control(const ExperimentConfig& c);

// Mean of the last `fraction` of the curve.
double final_performance(const metrics::RunResult& r, double fraction = 0.1);

// --- analysis input/output ---

struct MdpInput {
    mdp::MdpSpec mdp;
    mdp::Policy behavior;
    mdp::Policy target;
    mdp::FeatureMap features;
    std::optional<Vec> stationary;
};

// Fields: n_states, n_actions, transitions [[s, a, s', p, r, gamma], ...],
// behavior, target (n_states x n_actions), features (n_states x n),
// start_dist, optional stationary.
MdpInput mdp_from_json(const nlohmann::json& j);
nlohmann::json mdp_to_json(const env::Problem& p);
nlohmann::json report_to_json(const stability::StabilityReport& r, const mdp::ExpectationModel& model);

// --- emission ---

// Conventions the results depend on, embedded in every summary.
nlohmann::json design_flags(const ExperimentConfig& c);

// Both files start with a "# config_hash=..." line when a hash is given.
void write_runs_csv(const std::string& path, const std::vector<metrics::RunResult>& runs,
                    const std::string& hash = "");
void write_curves_csv(const std::string& path, const std::vector<metrics::RunResult>& runs,
                      const std::string& hash = "");
std::vector<metrics::RunResult> read_runs_csv(const std::string& runs_path, const std::string& curves_path = "");

nlohmann::json summary_json(const ExperimentConfig& c, const metrics::SweepSummary& s);
void write_json(const std::string& path, const nlohmann::json& j);

// Mean +- stderr of the best configuration per (algorithm, environment).
std::string format_table(const metrics::SweepSummary& s);

// Output directory: TDRC_OUTPUT_DIR when set, otherwise the config's.
std::string output_dir(const ExperimentConfig& c);

}  // namespace tdrc::harness
