#include <gtest/gtest.h>

#include <random>

#include "lcn/metrics.hpp"
#include "oracles.hpp"

using namespace lcn;
using V = ObjectiveVector;

TEST(Hypervolume, Examples) {
    EXPECT_DOUBLE_EQ(hypervolume(std::vector<V>{{1, 1}}, V{0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(hypervolume(std::vector<V>{{2, 1}, {1, 2}}, V{0, 0}), 3.0);
    EXPECT_DOUBLE_EQ(hypervolume(std::vector<V>{}, V{0, 0}), 0.0);
    EXPECT_THROW(hypervolume(std::vector<V>{{1, 1, 1}}, V{0, 0}), std::invalid_argument);
}

TEST(Hypervolume, PointsOutsideRefContributeNothing) {
    EXPECT_DOUBLE_EQ(hypervolume(std::vector<V>{{-1, 5}, {2, 2}}, V{0, 0}), 4.0);
    EXPECT_DOUBLE_EQ(hypervolume(std::vector<V>{{0, 5}}, V{0, 0}), 0.0);
}

TEST(Hypervolume, TwoPointInclusionExclusion) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 500; ++t) {
        const auto p = oracle::random_set(rng, 2, 2, -2.0, 10.0);
        auto box = [](const V& a) { return std::max(a[0], 0.0) * std::max(a[1], 0.0); };
        const V meet{std::min(p[0][0], p[1][0]), std::min(p[0][1], p[1][1])};
        EXPECT_NEAR(hypervolume(p, V{0, 0}), box(p[0]) + box(p[1]) - box(meet), 1e-9);
    }
}

TEST(Hypervolume, MatchesMonteCarlo) {
    std::mt19937_64 rng(2);
    for (std::size_t d = 2; d <= 5; ++d) {
        const auto pts = oracle::random_set(rng, 8, d, 1.0, 10.0);
        const double exact = hypervolume(pts, V(d, 0.0));
        const double mc = oracle::mc_hypervolume(pts, V(d, 0.0), 200000, d);
        EXPECT_NEAR(exact, mc, 0.02 * exact) << "d=" << d;
    }
}

TEST(Hypervolume, Monotone) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        auto pts = oracle::random_set(rng, 6, 3);
        const double before = hypervolume(pts, V(3, 0.0));
        V dominated = pts[0];
        for (double& x : dominated) x *= 0.5;
        pts.push_back(dominated);
        EXPECT_DOUBLE_EQ(hypervolume(pts, V(3, 0.0)), before);
        pts.push_back(oracle::random_set(rng, 1, 3)[0]);
        EXPECT_GE(hypervolume(pts, V(3, 0.0)), before);
    }
}

TEST(Weights, Examples) {
    EXPECT_EQ(generate_equidistant_weights(2, 3), (std::vector<V>{{0, 1}, {0.5, 0.5}, {1, 0}}));
    const auto corners = generate_equidistant_weights(3, 3);
    EXPECT_EQ(corners.size(), 3u);
    for (const auto& w : corners) EXPECT_DOUBLE_EQ(*std::max_element(w.begin(), w.end()), 1.0);
    EXPECT_THROW(generate_equidistant_weights(1, 5), std::invalid_argument);
    EXPECT_THROW(generate_equidistant_weights(3, 2), std::invalid_argument);
}

TEST(Weights, LatticeSizeAndSimplex) {
    for (std::size_t d = 2; d <= 6; ++d) {
        const auto w = generate_equidistant_weights(d, 100);
        EXPECT_LE(w.size(), 100u);
        for (const auto& x : w) {
            EXPECT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 1.0, 1e-9);
            for (double v : x) EXPECT_GE(v, 0.0);
        }
    }
    EXPECT_EQ(generate_equidistant_weights(2, 100).size(), 100u);
    EXPECT_EQ(generate_equidistant_weights(3, 100).size(), 91u);  // H = 12
}

TEST(Weights, MatchesCompositionOracle) {
    const auto w = generate_equidistant_weights(4, 60);  // C(8,3)=56 -> H=5
    std::vector<V> expected;
    V cur;
    oracle::compositions(4, 5, cur, expected, 5);
    EXPECT_EQ(w, expected);
}

TEST(Eum, Examples) {
    EXPECT_NEAR(eum(std::vector<V>{{1, 0}, {0, 1}}, 3), 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(eum(std::vector<V>{{2, 2, 2}}, 50), 2.0, 1e-12);
    EXPECT_THROW(eum(std::vector<V>{}, 10), std::invalid_argument);
}

TEST(Eum, BruteForceDoubleLoop) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        const std::size_t d = 2 + t % 3;
        auto pts = oracle::random_set(rng, 1 + t % 9, d);
        const auto ws = generate_equidistant_weights(d, 40);
        double total = 0.0;
        for (const auto& w : ws) {
            double best = -1e300;
            for (const auto& p : pts) {
                double u = 0.0;
                for (std::size_t j = 0; j < d; ++j) u += w[j] * p[j];
                best = std::max(best, u);
            }
            total += best;
        }
        EXPECT_EQ(eum(pts, 40), total / static_cast<double>(ws.size()));
        V dominated = pts[0];
        for (double& x : dominated) x -= 1.0;
        pts.push_back(dominated);
        EXPECT_EQ(eum(pts, 40), total / static_cast<double>(ws.size()));
    }
}

TEST(Gini, Examples) {
    EXPECT_DOUBLE_EQ(gini_index(V{4, 4}), 0.0);
    EXPECT_DOUBLE_EQ(gini_index(V{8, 0}), 0.5);
    for (std::size_t d = 2; d <= 50; d += 8) {
        V v(d, 0.0);
        v[0] = 1.0;
        EXPECT_NEAR(gini_index(v), static_cast<double>(d - 1) / static_cast<double>(d), 1e-12);
    }
    EXPECT_DOUBLE_EQ(gini_index(V{0, 0, 0}), 0.0);
    EXPECT_THROW(gini_index(V{1, -1}), std::invalid_argument);
}

TEST(Gini, InvariancesAndOracle) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        V v = oracle::random_set(rng, 1, 2 + t % 5)[0];
        const double g = gini_index(v);
        EXPECT_NEAR(g, oracle::gini(v), 1e-12);
        V scaled = v;
        for (double& x : scaled) x *= 3.5;
        EXPECT_NEAR(gini_index(scaled), g, 1e-12);
        V perm = v;
        std::shuffle(perm.begin(), perm.end(), rng);
        EXPECT_NEAR(gini_index(perm), g, 1e-12);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0);
    }
}

TEST(Welfare, Examples) {
    EXPECT_DOUBLE_EQ(sen_welfare(V{4, 4}), 8.0);
    EXPECT_DOUBLE_EQ(sen_welfare(V{8, 0}), 4.0);
    EXPECT_DOUBLE_EQ(sen_welfare(V{0, 0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(total_efficiency(V{3, 4}), 7.0);
    EXPECT_DOUBLE_EQ(total_efficiency(V{8, 0}), 8.0);
    EXPECT_NEAR(total_efficiency(V{0.1, 0.2, 0.3}), 0.6, 1e-15);
    EXPECT_DOUBLE_EQ(set_sen_welfare(std::vector<V>{{4, 4}, {8, 0}}), 8.0);
    EXPECT_DOUBLE_EQ(set_sen_welfare(std::vector<V>{{8, 0}}), 4.0);
    EXPECT_THROW(set_sen_welfare(std::vector<V>{}), std::invalid_argument);
}

TEST(Welfare, PigouDaltonRaisesSenWelfare) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        V v = oracle::random_set(rng, 1, 2 + t % 4)[0];
        auto hi = std::max_element(v.begin(), v.end());
        auto lo = std::min_element(v.begin(), v.end());
        const double eps = u(rng) * (*hi - *lo) / 2.0;
        V w = v;
        w[static_cast<std::size_t>(hi - v.begin())] -= eps;
        w[static_cast<std::size_t>(lo - v.begin())] += eps;
        EXPECT_GE(sen_welfare(w), sen_welfare(v) - 1e-12);
        EXPECT_LE(gini_index(w), gini_index(v) + 1e-12);
    }
}

TEST(Welfare, SetValueMonotone) {
    std::mt19937_64 rng(8);
    std::vector<V> pts;
    double last = -1.0;
    for (int t = 0; t < 30; ++t) {
        pts.push_back(oracle::random_set(rng, 1, 3)[0]);
        const double now = set_sen_welfare(pts);
        EXPECT_GE(now, last);
        last = now;
    }
}

TEST(Record, FieldsAndNegativeReturns) {
    const auto rec = compute_metrics({{4, 4}, {8, 0}}, {0, 0}, 3, 17);
    EXPECT_EQ(rec.step, 17);
    EXPECT_EQ(rec.front_size, 2u);
    // (8,0) spans no area above the reference
    EXPECT_DOUBLE_EQ(rec.hypervolume, 16.0);
    EXPECT_DOUBLE_EQ(*rec.sen_welfare, 8.0);
    EXPECT_DOUBLE_EQ(*rec.mean_sen_welfare, 6.0);
    EXPECT_DOUBLE_EQ(*rec.gini, 0.0);
    EXPECT_DOUBLE_EQ(*rec.total_efficiency, 8.0);

    const auto dst = compute_metrics({{1, -1}, {124, -19}}, {0, -200}, 100);
    EXPECT_FALSE(dst.sen_welfare.has_value());
    EXPECT_FALSE(dst.gini.has_value());
    EXPECT_GT(dst.hypervolume, 0.0);
}
