#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tdrc/metrics.hpp"

using namespace tdrc;

TEST(Mspbe, MatchesQuadraticFormWhenCInvertible) {
    Rng rng(stream_key(31, 0));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto p = tdrc::testing::random_problem(seed);
        auto m = mdp::expectation_matrices(p.mdp, p.behavior, p.target, p.features);
        Vec w = tdrc::testing::random_vec(rng, m.n());
        Vec r = m.b - m.A * w;
        double oracle = r.dot(m.C.inverse() * r);
        EXPECT_NEAR(metrics::mspbe(w, m), oracle, 1e-10 * (1 + oracle));
        EXPECT_NEAR(metrics::rmspbe(w, m), std::sqrt(oracle), 1e-10 * (1 + oracle));
        metrics::RmspbeEvaluator ev(m);
        EXPECT_NEAR(ev(w), std::sqrt(oracle), 1e-10 * (1 + oracle));
        Mat Cb = m.C + 0.5 * Mat::Identity(m.n(), m.n());
        EXPECT_NEAR(metrics::mspbe_pp(w, m, 0.5), r.dot(Cb.inverse() * r), 1e-10 * (1 + oracle));
        EXPECT_GE(metrics::mspbe(w, m), 0.0);
    }
}

TEST(Mspbe, ZeroAtFixedPoint) {
    for (const auto& name : env::prediction_problem_names()) {
        if (name == "baird") continue;
        auto p = env::make_problem(name);
        auto m = mdp::expectation_matrices(p.mdp, p.behavior, p.target, p.features);
        EXPECT_LT(metrics::rmspbe(mdp::td_fixed_point(m), m), 1e-8) << name;
    }
    // Baird: every reward is zero, so w = 0 is a solution.
    auto b = env::make_baird();
    auto m = mdp::expectation_matrices(b.mdp, b.behavior, b.target, b.features);
    EXPECT_EQ(metrics::rmspbe(Vec::Zero(8), m), 0.0);
    EXPECT_GT(metrics::rmspbe(b.w0, m), 1.0);
}

TEST(Mspbe, SingularCUsesPseudoInverse) {
    auto b = env::make_baird();
    auto m = mdp::expectation_matrices(b.mdp, b.behavior, b.target, b.features);
    ASSERT_TRUE(m.c_singular);
    Rng rng(stream_key(32, 0));
    Mat pinv = m.C.completeOrthogonalDecomposition().pseudoInverse();
    for (int i = 0; i < 10; ++i) {
        Vec w = tdrc::testing::random_vec(rng, 8);
        Vec r = m.b - m.A * w;
        EXPECT_NEAR(metrics::mspbe(w, m), r.dot(pinv * r), 1e-8 * (1 + r.squaredNorm()));
    }
}

TEST(Auc, IsCurveMean) {
    std::vector<double> c{1.0, 2.0, 3.0, 6.0};
    EXPECT_DOUBLE_EQ(metrics::auc(c), 3.0);
    EXPECT_TRUE(std::isnan(metrics::auc(std::vector<double>{})));
}

TEST(Describe, SampleStatistics) {
    std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    auto s = metrics::describe(v);
    EXPECT_DOUBLE_EQ(s.mean, 5.0);
    EXPECT_NEAR(s.stddev, std::sqrt(32.0 / 7.0), 1e-12);
    EXPECT_NEAR(s.stderr_, std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-12);
    EXPECT_EQ(s.n, 8);
    auto one = metrics::describe(std::vector<double>{3.0});
    EXPECT_EQ(one.mean, 3.0);
    EXPECT_TRUE(std::isnan(one.stddev));
    EXPECT_TRUE(std::isnan(one.stderr_));
}

namespace {

metrics::RunResult make_run(std::string alg, double alpha, double auc, int run) {
    metrics::RunResult r;
    r.environment = "env";
    r.algorithm = std::move(alg);
    r.optimizer = "adagrad";
    r.alpha = alpha;
    r.run = run;
    r.curve = {auc};
    r.auc = auc;
    return r;
}

}  // namespace

TEST(Aggregate, GroupsAndSelectsBest) {
    std::vector<metrics::RunResult> runs;
    for (int i = 0; i < 4; ++i) {
        runs.push_back(make_run("td", 0.5, 1.0 + i, i));
        runs.push_back(make_run("td", 0.25, 0.5 + i, i));
        runs.push_back(make_run("tdrc", 0.5, 0.75 + i, i));
    }
    auto s = metrics::aggregate(runs);
    ASSERT_EQ(s.configs.size(), 3u);
    const auto& best_td = s.configs[s.best.at({"env", "td"})];
    EXPECT_EQ(best_td.alpha, 0.25);
    EXPECT_DOUBLE_EQ(best_td.auc.mean, 2.0);
    EXPECT_EQ(best_td.auc.n, 4);
    EXPECT_DOUBLE_EQ(s.baseline.at("env"), 2.25);
    EXPECT_NEAR(best_td.normalized, 2.0 / 2.25, 1e-12);
    EXPECT_THROW(metrics::aggregate(std::vector<metrics::RunResult>{}), std::invalid_argument);
}

TEST(Aggregate, OrderInsensitive) {
    std::vector<metrics::RunResult> runs;
    Rng rng(stream_key(33, 0));
    for (int i = 0; i < 30; ++i) runs.push_back(make_run(i % 2 ? "td" : "tdc", 0.1 * (1 + i % 3), rng.uniform(), i));
    auto a = metrics::aggregate(runs);
    std::reverse(runs.begin(), runs.end());
    auto b = metrics::aggregate(runs);
    ASSERT_EQ(a.configs.size(), b.configs.size());
    for (std::size_t i = 0; i < a.configs.size(); ++i) {
        EXPECT_EQ(a.configs[i].alpha, b.configs[i].alpha);
        EXPECT_NEAR(a.configs[i].auc.mean, b.configs[i].auc.mean, 1e-15);
    }
    EXPECT_EQ(a.best, b.best);
}

TEST(SelectBest, TiesGoToSmallerAlpha) {
    std::vector<metrics::ConfigSummary> c(3);
    c[0].alpha = 0.5;
    c[1].alpha = 0.125;
    c[2].alpha = 0.25;
    for (auto& x : c) x.auc.mean = 1.0;
    EXPECT_EQ(metrics::select_best(c), 1u);
    c[0].auc.mean = 0.9;
    EXPECT_EQ(metrics::select_best(c), 0u);
}

TEST(RewardScaleScore, Example) {
    std::vector<double> td{1.0, 2.0, 3.0};
    std::vector<double> tdrc{2.0, 2.0, 2.0};
    EXPECT_NEAR(metrics::reward_scale_score(tdrc, td), 0.0, 1e-15);
    std::vector<double> worse{4.0, 4.0, 4.0};
    EXPECT_NEAR(metrics::reward_scale_score(worse, td), 2.0, 1e-12);
    std::vector<double> flat{1.0, 1.0};
    EXPECT_TRUE(std::isnan(metrics::reward_scale_score(tdrc, flat)));
}
