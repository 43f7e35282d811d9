#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "tdrc/harness.hpp"

using namespace tdrc;
using nlohmann::json;

namespace {

harness::ExperimentConfig small_online() {
    auto c = harness::config_from_json(json{{"environments", {"randomwalk-dependent", "baird"}},
                                           {"algorithms", {"td", "tdc", "tdrc"}},
                                           {"alpha", {0.0625, 0.25}},
                                           {"eta", {1.0}},
                                           {"n_runs", 3},
                                           {"n_steps", 200}});
    return c;
}

}  // namespace

TEST(Config, DefaultsAndGrids) {
    auto c = harness::config_from_json(json::object());
    EXPECT_EQ(c.protocol, harness::Protocol::online);
    auto td = harness::hyper_grid(c, "td");
    EXPECT_EQ(td.size(), 8u);
    EXPECT_EQ(td.front().alpha, 1.0 / 128);
    EXPECT_EQ(td.back().alpha, 1.0);
    EXPECT_EQ(harness::hyper_grid(c, "tdc").size(), 8u * 7u);
    EXPECT_EQ(harness::hyper_grid(c, "gtd2").size(), 8u * 13u);
    auto tdrc = harness::hyper_grid(c, "tdrc");
    EXPECT_EQ(tdrc.size(), 8u);
    EXPECT_EQ(tdrc.front().eta, 1.0);
    EXPECT_EQ(tdrc.front().beta, 1.0);

    auto ctl = harness::config_from_json(json{{"protocol", "control"}});
    EXPECT_EQ(ctl.environments, std::vector<std::string>{"mountaincar"});
    auto q = harness::hyper_grid(ctl, "qrc");
    EXPECT_EQ(q.size(), 8u);
    EXPECT_EQ(q.front().alpha, 1.0 / 256);
    EXPECT_EQ(harness::optimizer_for(ctl, "qc").kind, optim::Kind::constant);
    EXPECT_EQ(harness::optimizer_for(ctl, "ac-tdrc").kind, optim::Kind::adam);

    auto rs = harness::config_from_json(json{{"protocol", "reward-scale"}});
    EXPECT_EQ(harness::hyper_grid(rs, "tdrc").size(), 5u * 10u);
    auto b = harness::config_from_json(json{{"protocol", "batch"}});
    EXPECT_EQ(harness::hyper_grid(b, "tdc").size(), 6u);
    EXPECT_EQ(b.update_budgets.back(), 8192);
}

TEST(Config, OverridesWin) {
    auto c = harness::config_from_json(
        json{{"alpha", {0.5}}, {"overrides", {{"tdc", {{"alpha", {0.1, 0.2}}, {"eta", {4.0}}}}}}});
    auto g = harness::hyper_grid(c, "tdc");
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[1].alpha, 0.2);
    EXPECT_EQ(g[1].eta, 4.0);
    EXPECT_EQ(harness::hyper_grid(c, "td").front().alpha, 0.5);
}

TEST(Config, Rejections) {
    EXPECT_THROW(harness::config_from_json(json{{"n_run", 3}}), std::invalid_argument);
    EXPECT_THROW(harness::config_from_json(json{{"environments", {"nowhere"}}}), std::invalid_argument);
    EXPECT_THROW(harness::config_from_json(json{{"algorithms", {"qrc"}}}), std::invalid_argument);
    EXPECT_THROW(harness::config_from_json(json{{"alpha", {-1.0}}}), std::invalid_argument);
    EXPECT_THROW(harness::config_from_json(json{{"protocol", "control"}, {"environments", {"baird"}}}),
                 std::invalid_argument);
    EXPECT_THROW(harness::config_from_json(json{{"protocol", "reward-scale"}, {"environments", {"boyan"}}}),
                 std::invalid_argument);
    EXPECT_THROW(harness::config_from_json(json{{"protocol", "nope"}}), std::invalid_argument);
}

TEST(Config, JsonRoundTripAndHash) {
    auto c = small_online();
    auto again = harness::config_from_json(harness::config_to_json(c));
    EXPECT_EQ(harness::config_to_json(again), harness::config_to_json(c));
    EXPECT_EQ(harness::config_hash(again), harness::config_hash(c));
    EXPECT_EQ(harness::config_hash(c).size(), 16u);
    again.n_runs = 4;
    EXPECT_NE(harness::config_hash(again), harness::config_hash(c));
    again.n_runs = c.n_runs;
    again.workers = 7;
    EXPECT_EQ(harness::config_hash(again), harness::config_hash(c));
}

TEST(Config, ShippedConfigsParse) {
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(TDRC_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        std::ifstream in(e.path());
        EXPECT_NO_THROW(harness::config_from_json(json::parse(in))) << e.path();
        ++n;
    }
    EXPECT_GE(n, 5);
}

TEST(PowersOfTwo, Values) {
    auto v = harness::powers_of_two(-2, 1, 0.1);
    ASSERT_EQ(v.size(), 4u);
    EXPECT_DOUBLE_EQ(v[0], 0.025);
    EXPECT_DOUBLE_EQ(v[3], 0.2);
}

TEST(RunKey, CommonRandomNumbers) {
    EXPECT_EQ(harness::run_key(0, 3), harness::run_key(0, 3, 0));
    EXPECT_NE(harness::run_key(0, 3), harness::run_key(0, 4));
    EXPECT_NE(harness::run_key(0, 3, 0), harness::run_key(0, 3, 1));
    EXPECT_NE(harness::run_key(0, 3), harness::run_key(1, 3));
}

TEST(Online, CurveShapeAndInitialValue) {
    auto setup = harness::make_setup("baird", 1.0, std::nullopt);
    env::TransitionTable table(setup.problem);
    auto r = harness::run_online_single(setup, table, agents::Algorithm::tdrc, {0.01, 1.0, 1.0},
                                        {optim::Kind::adagrad, 0.01}, 50, 0, 0);
    ASSERT_EQ(r.curve.size(), 50u);
    EXPECT_NEAR(r.curve.front(), metrics::rmspbe(setup.w0, setup.model), 1e-12);
    EXPECT_NEAR(r.auc, metrics::auc(r.curve), 1e-15);
    EXPECT_EQ(r.environment, "baird");
    EXPECT_EQ(r.algorithm, "tdrc");
}

TEST(Online, InitialWeightsOverride) {
    auto setup = harness::make_setup("randomwalk-tabular", 1.0, std::vector<double>(5, 0.5));
    EXPECT_EQ(setup.w0, Vec::Constant(5, 0.5));
    EXPECT_THROW(harness::make_setup("randomwalk-tabular", 1.0, std::vector<double>(4, 0.0)), std::invalid_argument);
}

TEST(Online, DeterministicAcrossWorkerCounts) {
    auto c = small_online();
    c.workers = 1;
    auto a = harness::run_online(c);
    c.workers = 3;
    auto b = harness::run_online(c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].curve, b[i].curve);
        EXPECT_EQ(a[i].algorithm, b[i].algorithm);
        EXPECT_EQ(a[i].seed, b[i].seed);
    }
}

TEST(Online, SameStreamForEveryAlgorithm) {
    // TDRC with beta = 0 and TDC see the same transitions, so their curves coincide.
    auto c = harness::config_from_json(json{{"environments", {"baird"}},
                                           {"algorithms", {"tdc", "tdrc"}},
                                           {"alpha", {0.03125}},
                                           {"eta", {1.0}},
                                           {"beta", {0.0}},
                                           {"n_runs", 2},
                                           {"n_steps", 300}});
    auto runs = harness::run_online(c);
    ASSERT_EQ(runs.size(), 4u);
    std::map<int, std::vector<double>> tdc;
    for (const auto& r : runs)
        if (r.algorithm == "tdc") tdc[r.run] = r.curve;
    for (const auto& r : runs)
        if (r.algorithm == "tdrc") EXPECT_EQ(r.curve, tdc.at(r.run));
}

TEST(Emit, CsvRoundTrip) {
    auto c = small_online();
    auto runs = harness::run_online(c);
    auto dir = std::filesystem::temp_directory_path() / "tdrc_emit_test";
    std::filesystem::create_directories(dir);
    auto rp = (dir / "runs.csv").string(), cp = (dir / "curves.csv").string();
    harness::write_runs_csv(rp, runs, harness::config_hash(c));
    harness::write_curves_csv(cp, runs, harness::config_hash(c));
    auto back = harness::read_runs_csv(rp, cp);
    ASSERT_EQ(back.size(), runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        EXPECT_EQ(back[i].algorithm, runs[i].algorithm);
        EXPECT_EQ(back[i].alpha, runs[i].alpha);
        EXPECT_EQ(back[i].seed, runs[i].seed);
        EXPECT_EQ(back[i].auc, runs[i].auc);
        EXPECT_EQ(back[i].curve, runs[i].curve);
    }
    auto s1 = metrics::aggregate(runs), s2 = metrics::aggregate(back);
    EXPECT_EQ(harness::format_table(s1), harness::format_table(s2));
    auto summary = harness::summary_json(c, s1);
    EXPECT_EQ(summary.at("config_hash"), harness::config_hash(c));
    EXPECT_TRUE(summary.contains("design_flags"));
    std::filesystem::remove_all(dir);
}

TEST(Emit, OutputDirFromEnvironment) {
    auto c = small_online();
    c.output = "from_config";
    unsetenv("TDRC_OUTPUT_DIR");
    EXPECT_EQ(harness::output_dir(c), "from_config");
    setenv("TDRC_OUTPUT_DIR", "/tmp/elsewhere", 1);
    EXPECT_EQ(harness::output_dir(c), "/tmp/elsewhere");
    unsetenv("TDRC_OUTPUT_DIR");
}

TEST(Batch, FirstBudgetWithin) {
    std::vector<harness::BatchPoint> pts;
    for (int b : {1, 2, 4, 8}) {
        harness::BatchPoint p;
        p.algorithm = "td";
        p.budget = b;
        p.auc.mean = 1.0 / b;
        pts.push_back(p);
    }
    EXPECT_EQ(harness::first_budget_within(pts, "td", 0.125), 8);
    EXPECT_EQ(harness::first_budget_within(pts, "td", 0.24), 4);
    EXPECT_EQ(harness::first_budget_within(pts, "td", 0.01), -1);
    EXPECT_EQ(harness::first_budget_within(pts, "tdc", 1.0), -1);
}

TEST(Batch, SmallRunShape) {
    auto c = harness::config_from_json(json{{"protocol", "batch"},
                                           {"environments", {"randomwalk-tabular"}},
                                           {"algorithms", {"td", "gtd2"}},
                                           {"n_runs", 2},
                                           {"dataset_size", 500},
                                           {"update_budgets", {0, 4, 16}}});
    auto res = harness::run_batch(c);
    EXPECT_EQ(res.points.size(), 6u);
    for (const auto& p : res.points) {
        EXPECT_EQ(p.auc.n, 2);
        EXPECT_TRUE(std::isfinite(p.auc.mean));
    }
    // With no updates every stepsize scores the initial error.
    EXPECT_EQ(res.points[0].budget, 0);
}

TEST(Control, QrcBetaZeroRunEqualsQc) {
    auto c = harness::config_from_json(json{{"protocol", "control"}, {"n_env_steps", 3000}, {"curve_stride", 100}});
    auto qc = harness::run_control_single(c, "qc", {0.25, 1.0, 0.0}, 0);
    auto qrc = harness::run_control_single(c, "qrc", {0.25, 1.0, 0.0}, 0);
    EXPECT_EQ(qc.result.curve, qrc.result.curve);
    EXPECT_EQ(qc.episode_lengths, qrc.episode_lengths);
    EXPECT_EQ(qc.result.curve.size(), 30u);
}

TEST(Control, CurveHoldsEpisodeLengths) {
    auto c = harness::config_from_json(json{{"protocol", "control"}, {"n_env_steps", 20000}, {"curve_stride", 1}});
    auto r = harness::run_control_single(c, "qlearning", {0.5, 0.0, 0.0}, 1);
    ASSERT_EQ(r.result.curve.size(), 20000u);
    ASSERT_FALSE(r.episode_lengths.empty());
    long t = 0;
    for (int len : r.episode_lengths) {
        t += len;
        EXPECT_EQ(r.result.curve[t - 1], len);
        EXPECT_LE(len, c.episode_cap);
    }
    // Before the first termination the curve is backfilled with the first episode.
    EXPECT_EQ(r.result.curve.front(), r.episode_lengths.front());
    EXPECT_FALSE(r.clamped);
}

TEST(Control, FinalPerformanceIsTailMean) {
    metrics::RunResult r;
    r.curve = {10, 10, 10, 10, 10, 10, 10, 10, 2, 4};
    EXPECT_DOUBLE_EQ(harness::final_performance(r), 4.0);
    EXPECT_DOUBLE_EQ(harness::final_performance(r, 0.2), 3.0);
}

TEST(Control, ActorCriticRuns) {
    auto c = harness::config_from_json(
        json{{"protocol", "control"}, {"algorithms", {"ac-tdrc"}}, {"n_env_steps", 2000}, {"curve_stride", 100}});
    auto r = harness::run_control_single(c, "ac-tdrc", harness::hyper_grid(c, "ac-tdrc").back(), 0);
    EXPECT_EQ(r.result.optimizer, "adam");
    EXPECT_EQ(r.result.curve.size(), 20u);
}

TEST(Analyze, MdpJsonRoundTrip) {
    auto p = env::make_baird();
    auto in = harness::mdp_from_json(harness::mdp_to_json(p));
    auto m1 = mdp::expectation_matrices(p.mdp, p.behavior, p.target, p.features);
    auto m2 = mdp::expectation_matrices(in.mdp, in.behavior, in.target, in.features, in.stationary);
    EXPECT_LT((m1.A - m2.A).cwiseAbs().maxCoeff(), 1e-14);
    auto rep = harness::report_to_json(stability::analyze(m2, 1.0, 1.0), m2);
    EXPECT_EQ(rep.at("hurwitz"), true);
    EXPECT_EQ(rep.at("A_positive_definite"), false);
}
