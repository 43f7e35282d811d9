#include <gtest/gtest.h>

#include <set>

#include "support.hpp"
#include "tdrc/environments.hpp"
#include "tdrc/mountain_car.hpp"
#include "tdrc/tile_coder.hpp"

using namespace tdrc;

TEST(Problems, AllValidate) {
    for (const auto& name : env::prediction_problem_names()) {
        auto p = env::make_problem(name);
        EXPECT_EQ(p.name, name);
        EXPECT_NO_THROW(p.mdp.validate());
        EXPECT_NO_THROW(p.behavior.validate(p.mdp.n_states, p.mdp.n_actions));
        EXPECT_NO_THROW(p.target.validate(p.mdp.n_states, p.mdp.n_actions));
        EXPECT_NO_THROW(p.features.validate(p.mdp.n_states));
        EXPECT_EQ(p.w0.size(), p.features.n_features());
    }
    EXPECT_THROW(env::make_problem("randomwalk-bogus"), std::invalid_argument);
    EXPECT_THROW(env::make_problem("cartpole"), std::invalid_argument);
}

TEST(RandomWalk, FeatureNorms) {
    auto dep = env::make_problem("randomwalk-dependent");
    for (int s = 0; s < 5; ++s) EXPECT_NEAR(dep.features.x(s).norm(), 1.0, 1e-12);
    auto inv = env::make_problem("randomwalk-inverted");
    for (int s = 0; s < 5; ++s) {
        EXPECT_EQ(inv.features.phi(s, s), 0.0);
        EXPECT_NEAR(inv.features.x(s).sum(), 2.0, 1e-12);
    }
}

TEST(RandomWalk, RewardScaleOnlyScalesRightExit) {
    auto a = env::make_random_walk(env::RandomWalkFeatures::tabular, 1.0);
    auto b = env::make_random_walk(env::RandomWalkFeatures::tabular, 7.0);
    for (std::size_t i = 0; i < a.mdp.reward.size(); ++i) EXPECT_EQ(7.0 * a.mdp.reward[i], b.mdp.reward[i]);
    EXPECT_EQ(b.mdp.r(4, 1, 2), 7.0);
    EXPECT_EQ(b.mdp.g(4, 1, 2), 0.0);
    EXPECT_EQ(b.mdp.g(0, 0, 2), 0.0);
}

TEST(Baird, Structure) {
    auto p = env::make_baird();
    EXPECT_EQ(p.features.phi.rows(), 7);
    EXPECT_EQ(p.features.phi.cols(), 8);
    Eigen::FullPivLU<Mat> lu(p.features.phi);
    EXPECT_EQ(lu.rank(), 7);
    for (int s = 0; s < 7; ++s) {
        EXPECT_EQ(p.target.probs(s, 1), 1.0);
        EXPECT_NEAR(p.behavior.probs(s, 0), 6.0 / 7.0, 1e-15);
        EXPECT_EQ(p.mdp.p(s, 1, 6), 1.0);
    }
    EXPECT_EQ(p.w0(7), 10.0);
    // All rewards are zero, so the TD solution is w = 0 restricted to range(C).
    for (double r : p.mdp.reward) EXPECT_EQ(r, 0.0);
}

TEST(TransitionTable, SamplingFrequencies) {
    auto p = env::make_baird();
    env::TransitionTable table(p);
    Rng rng(stream_key(5, 1));
    std::vector<int> next(7, 0);
    const int n = 140000;
    for (int i = 0; i < n; ++i) {
        const auto& t = table.sample(3, rng);
        ++next[t.next_state];
        EXPECT_EQ(t.rho, t.action == 1 ? 7.0 : 0.0);
    }
    // P(s' = 6) = 1/7 (solid); each upper state 6/7 * 1/6 = 1/7.
    for (int s = 0; s < 7; ++s) EXPECT_NEAR(next[s] / double(n), 1.0 / 7.0, 0.005);
}

TEST(TrajectoryStream, FollowsDynamics) {
    auto p = env::make_problem("randomwalk-tabular");
    env::TransitionTable table(p);
    env::TrajectoryStream stream(table, p.mdp.start_dist, Rng(stream_key(1, 2)));
    EXPECT_EQ(stream.state(), 2);
    int prev = 2;
    for (int i = 0; i < 1000; ++i) {
        const auto& t = stream.next();
        EXPECT_EQ(t.state, prev);
        if (t.gamma == 0.0)
            EXPECT_EQ(t.next_state, 2);
        else
            EXPECT_EQ(std::abs(t.next_state - t.state), 1);
        prev = t.next_state;
    }
}

TEST(SampleIndependent, MatchesDistribution) {
    auto p = env::make_problem("randomwalk-tabular");
    env::TransitionTable table(p);
    Vec d = mdp::stationary_distribution(p.mdp, p.behavior);
    Rng rng(stream_key(9, 9));
    std::vector<int> count(5, 0);
    const int n = 90000;
    for (int i = 0; i < n; ++i) ++count[sample_independent(table, d, rng).state];
    for (int s = 0; s < 5; ++s) EXPECT_NEAR(count[s] / double(n), d(s), 0.006);
}

TEST(TileCoder, ExactlyNTilingsActive) {
    env::TileCoder tc{env::TileCoderConfig{}};
    EXPECT_EQ(tc.dimension(), 256);
    Rng rng(stream_key(2, 3));
    for (int i = 0; i < 2000; ++i) {
        double st[2] = {rng.uniform(-1.2, 0.5), rng.uniform(-0.07, 0.07)};
        bool clamped = true;
        auto act = tc.active(st, &clamped);
        EXPECT_FALSE(clamped);
        ASSERT_EQ(act.size(), 16u);
        for (int k = 0; k < 16; ++k) {
            EXPECT_GE(act[k], k * 16);
            EXPECT_LT(act[k], (k + 1) * 16);
        }
    }
}

TEST(TileCoder, SameCellSameFeatures) {
    env::TileCoder tc{env::TileCoderConfig{}};
    // A tiny displacement away from any boundary keeps every tiling in the same cell.
    double a[2] = {-0.5, 0.0};
    double b[2] = {-0.5 + 1e-9, 1e-12};
    EXPECT_EQ(tc.active(a), tc.active(b));
}

TEST(TileCoder, FullTileApartNeverIdentical) {
    env::TileCoderConfig cfg;
    env::TileCoder tc{cfg};
    const double wp = tc.tile_width(0);
    const double wv = tc.tile_width(1);
    EXPECT_NEAR(wp, 1.7 / (4.0 - 15.0 / 16.0), 1e-15);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            double p = -1.2 + 1.7 * i / 49.0;
            double v = -0.07 + 0.14 * j / 49.0;
            double s[2] = {p, v};
            auto base = tc.active(s);
            for (auto [dp, dv] : {std::pair{wp, 0.0}, std::pair{0.0, wv}, std::pair{-wp, 0.0}, std::pair{0.0, -wv}}) {
                double q[2] = {p + dp, v + dv};
                if (q[0] < -1.2 || q[0] > 0.5 || q[1] < -0.07 || q[1] > 0.07) continue;
                EXPECT_NE(tc.active(q), base) << p << "," << v;
            }
        }
}

TEST(TileCoder, ClampsOutOfBounds) {
    env::TileCoder tc{env::TileCoderConfig{}};
    double out[2] = {2.0, -1.0};
    double edge[2] = {0.5, -0.07};
    bool clamped = false;
    auto a = tc.active(out, &clamped);
    EXPECT_TRUE(clamped);
    EXPECT_EQ(a, tc.active(edge));
}

TEST(TileCoder, ConfigValidation) {
    env::TileCoderConfig bad;
    bad.n_tilings = 0;
    EXPECT_THROW(env::TileCoder{bad}, std::invalid_argument);
    bad = {};
    bad.state_bounds[0] = {1.0, 1.0};
    EXPECT_THROW(env::TileCoder{bad}, std::invalid_argument);
    bad = {};
    bad.tiles_per_dim = {4};
    EXPECT_THROW(env::TileCoder{bad}, std::invalid_argument);
}

TEST(MountainCar, ResetRange) {
    Rng rng(stream_key(0, 0));
    for (int i = 0; i < 1000; ++i) {
        auto s = env::mountain_car_reset(rng);
        EXPECT_GE(s.position, -0.6);
        EXPECT_LT(s.position, -0.4);
        EXPECT_EQ(s.velocity, 0.0);
    }
}

TEST(MountainCar, DynamicsByHand) {
    env::MountainCarState s{-0.5, 0.0};
    auto r = env::mountain_car_step(s, 2);
    const double v = 0.001 - 0.0025 * std::cos(3 * -0.5);
    EXPECT_DOUBLE_EQ(r.state.velocity, v);
    EXPECT_DOUBLE_EQ(r.state.position, -0.5 + v);
    EXPECT_EQ(r.reward, -1.0);
    EXPECT_FALSE(r.terminated);
    EXPECT_THROW(env::mountain_car_step(s, 3), std::invalid_argument);
}

TEST(MountainCar, LeftWallStopsCar) {
    env::MountainCarState s{-1.19, -0.07};
    auto r = env::mountain_car_step(s, 0);
    EXPECT_EQ(r.state.position, -1.2);
    EXPECT_EQ(r.state.velocity, 0.0);
}

TEST(MountainCar, UnderpoweredButSolvable) {
    // Full throttle from the valley floor never reaches the goal.
    env::MountainCarState s{-0.5, 0.0};
    for (int t = 0; t < 1000; ++t) {
        auto r = env::mountain_car_step(s, 2);
        ASSERT_FALSE(r.terminated);
        s = r.state;
    }
    // Pushing along the velocity does.
    s = {-0.5, 0.0};
    int t = 0;
    for (; t < 1000; ++t) {
        auto r = env::mountain_car_step(s, s.velocity >= 0.0 ? 2 : 0);
        s = r.state;
        if (r.terminated) break;
    }
    EXPECT_LT(t, 200);
    EXPECT_GE(s.position, 0.5);
}
