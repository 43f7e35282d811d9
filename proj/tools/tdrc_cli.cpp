// tdrc: run prediction/control experiments and stability analysis.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tdrc/environments.hpp"
#include "tdrc/harness.hpp"
#include "tdrc/metrics.hpp"
#include "tdrc/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tdrc;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

harness::ExperimentConfig load_config(const std::string& path, const std::string& output, int workers) {
    auto c = harness::config_from_json(load_json(path));
    if (!output.empty()) c.output = output;
    if (workers > 0) c.workers = workers;
    return c;
}

// Keeps only the first value of every grid so each algorithm runs once.
void restrict_to_first_point(harness::ExperimentConfig& c) {
    for (const auto& alg : c.algorithms) {
        auto grid = harness::hyper_grid(c, alg);
        c.overrides[alg] = {{grid.front().alpha}, {grid.front().eta}, {grid.front().beta}};
    }
}

void emit_runs(const harness::ExperimentConfig& c, const std::vector<metrics::RunResult>& runs) {
    const std::string dir = harness::output_dir(c);
    const std::string hash = harness::config_hash(c);
    harness::write_runs_csv((fs::path(dir) / "runs.csv").string(), runs, hash);
    if (c.keep_curves) harness::write_curves_csv((fs::path(dir) / "curves.csv").string(), runs, hash);
    auto summary = metrics::aggregate(runs);
    harness::write_json((fs::path(dir) / "summary.json").string(), harness::summary_json(c, summary));
    std::cout << harness::format_table(summary);
    std::cout << "wrote " << runs.size() << " runs to " << dir << "\n";
}

void run_experiment(harness::ExperimentConfig c) {
    using harness::Protocol;
    if (c.protocol == Protocol::online) {
        emit_runs(c, harness::run_online(c));
    } else if (c.protocol == Protocol::control) {
        auto control = harness::run_control(c);
        std::vector<metrics::RunResult> runs;
        for (auto& r : control) runs.push_back(std::move(r.result));
        emit_runs(c, runs);
        auto summary = metrics::aggregate(runs);
        for (const auto& [key, idx] : summary.best) {
            const auto& cs = summary.configs[idx];
            std::vector<double> finals;
            for (const auto& r : runs)
                if (r.algorithm == cs.algorithm && r.alpha == cs.alpha && r.eta == cs.eta && r.beta == cs.beta)
                    finals.push_back(harness::final_performance(r));
            auto st = metrics::describe(finals);
            std::printf("%-10s best alpha %.6g  final steps-to-goal %.1f\n", key.second.c_str(), cs.alpha, st.mean);
        }
    } else {
        throw std::runtime_error("use the batch or reward-scale subcommand for this protocol");
    }
}

void batch_cmd(harness::ExperimentConfig c) {
    c.protocol = harness::Protocol::batch;
    auto res = harness::run_batch(c);
    const std::string dir = harness::output_dir(c);
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / "batch.csv");
    out << "# config_hash=" << harness::config_hash(c) << "\n";
    out << "environment,algorithm,budget,best_alpha,mean_auc,stderr,n_runs\n";
    out.precision(17);
    for (const auto& p : res.points)
        out << p.environment << ',' << p.algorithm << ',' << p.budget << ',' << p.best_alpha << ',' << p.auc.mean
            << ',' << p.auc.stderr_ << ',' << p.auc.n << '\n';
    harness::write_runs_csv((fs::path(dir) / "runs.csv").string(), res.runs, harness::config_hash(c));
    json summary{{"config", harness::config_to_json(c)},
                 {"config_hash", harness::config_hash(c)},
                 {"design_flags", harness::design_flags(c)}};
    harness::write_json((fs::path(dir) / "summary.json").string(), summary);
    for (const auto& p : res.points)
        std::printf("%-22s %-6s n=%-5d alpha=%-9.6g auc=%.5f\n", p.environment.c_str(), p.algorithm.c_str(), p.budget,
                    p.best_alpha, p.auc.mean);
}

void reward_scale_cmd(harness::ExperimentConfig c) {
    c.protocol = harness::Protocol::reward_scale;
    auto cells = harness::run_reward_scale(c);
    const std::string dir = harness::output_dir(c);
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / "reward_scale.csv");
    out << "# config_hash=" << harness::config_hash(c) << "\n";
    out << "environment,scale,beta,td_alpha,tdrc_alpha,td_mean,td_std,tdrc_mean,score\n";
    out.precision(17);
    for (const auto& x : cells)
        out << x.environment << ',' << x.scale << ',' << x.beta << ',' << x.td_alpha << ',' << x.tdrc_alpha << ','
            << x.td.mean << ',' << x.td.stddev << ',' << x.tdrc.mean << ',' << x.score << '\n';
    json summary{{"config", harness::config_to_json(c)},
                 {"config_hash", harness::config_hash(c)},
                 {"design_flags", harness::design_flags(c)}};
    harness::write_json((fs::path(dir) / "summary.json").string(), summary);
    for (const auto& x : cells)
        std::printf("%-22s scale=%-7g beta=%-8g score=%+.3f\n", x.environment.c_str(), x.scale, x.beta, x.score);
}

void analyze(const std::string& mdp_path, const std::string& env_name, double eta, double beta, long samples,
             const std::string& out_path) {
    mdp::ExpectationModel model;
    if (!mdp_path.empty()) {
        auto in = harness::mdp_from_json(load_json(mdp_path));
        model = mdp::expectation_matrices(in.mdp, in.behavior, in.target, in.features, in.stationary);
    } else {
        auto p = env::make_problem(env_name);
        model = mdp::expectation_matrices(p.mdp, p.behavior, p.target, p.features);
    }
    auto report = stability::analyze(model, eta, beta);
    json j = harness::report_to_json(report, model);
    if (samples > 0 && beta > 0.0) {
        auto sc = stability::singular_c_bounds(model, beta, samples);
        j["singular_c_estimate"] = {{"beta_upper", sc.beta_upper},
                                    {"eta_lower", std::isfinite(sc.eta_lower) ? json(sc.eta_lower) : json("inf")},
                                    {"beta_admissible", sc.beta_admissible},
                                    {"samples", sc.samples},
                                    {"restarts", sc.restarts},
                                    {"note", "Monte-Carlo estimate, not a certificate"}};
    }
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        harness::write_json(out_path, j);
}

void table(const std::vector<std::string>& runs_paths) {
    std::vector<metrics::RunResult> all;
    for (const auto& p : runs_paths) {
        auto r = harness::read_runs_csv(p);
        all.insert(all.end(), r.begin(), r.end());
    }
    std::cout << harness::format_table(metrics::aggregate(all));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-TD prediction and control experiments"};
    app.require_subcommand(1);

    std::string config_path, output;
    int workers = 0;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", output, "output directory (TDRC_OUTPUT_DIR overrides)");
        sub->add_option("-j,--workers", workers, "worker threads (default TDRC_WORKERS or all cores)");
    };
    auto* run = app.add_subcommand("run", "run the first point of each algorithm's grid");
    add_config(run);
    auto* sweep = app.add_subcommand("sweep", "run the full hyperparameter grid");
    add_config(sweep);
    auto* batch = app.add_subcommand("batch", "batch-update budget study");
    add_config(batch);
    auto* rscale = app.add_subcommand("reward-scale", "reward-scale sensitivity study");
    add_config(rscale);

    std::string mdp_path, env_name = "baird", report_out;
    double eta = 1.0, beta = 1.0;
    long samples = 0;
    auto* an = app.add_subcommand("analyze", "stability report for a finite MDP");
    auto* mdp_opt = an->add_option("--mdp", mdp_path, "MDP description (JSON)")->check(CLI::ExistingFile);
    an->add_option("--env", env_name, "built-in environment instead of --mdp")->excludes(mdp_opt);
    an->add_option("--eta", eta, "secondary stepsize multiplier");
    an->add_option("--beta", beta, "regularization strength");
    an->add_option("--singular-samples", samples, "also estimate singular-C bounds with this many samples");
    an->add_option("-o,--output", report_out, "write JSON here instead of stdout");

    std::vector<std::string> runs_paths;
    auto* tb = app.add_subcommand("table", "mean +- stderr of the best configuration per algorithm");
    tb->add_option("runs", runs_paths, "runs.csv files")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto c = load_config(config_path, output, workers);
            restrict_to_first_point(c);
            run_experiment(c);
        } else if (sweep->parsed()) {
            run_experiment(load_config(config_path, output, workers));
        } else if (batch->parsed()) {
            batch_cmd(load_config(config_path, output, workers));
        } else if (rscale->parsed()) {
            reward_scale_cmd(load_config(config_path, output, workers));
        } else if (an->parsed()) {
            analyze(mdp_path, env_name, eta, beta, samples, report_out);
        } else if (tb->parsed()) {
            table(runs_paths);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
