#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>

#include "lcn/errors.hpp"
#include "lcn/tndp.hpp"

using namespace lcn;
using namespace lcn::tndp;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LCN_TEST_DATA_DIR;

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / ("lcn_tndp_" + name);
    std::ofstream(p) << text;
    return p;
}

CityFiles city3_files() {
    CityFiles f;
    f.rows = 3;
    f.cols = 3;
    f.od_file = kData / "city3_od.csv";
    f.groups_file = kData / "city3_groups.csv";
    return f;
}

CityGrid toy_1x2() {
    // od[0,1] = 4, od[1,0] = 6; one group per cell
    return CityGrid(1, 2, {0, 4, 6, 0}, {0, 1});
}

// Independent coverage count: origin-group demand among all pairs on the line.
std::vector<double> coverage(const CityGrid& city, const std::vector<std::size_t>& line) {
    std::vector<double> sat(city.n_groups(), 0.0);
    for (std::size_t a : line) {
        for (std::size_t b : line) {
            if (a != b) sat[static_cast<std::size_t>(city.group(a))] += city.od(a, b);
        }
    }
    for (std::size_t g = 0; g < sat.size(); ++g) sat[g] /= city.group_totals()[g];
    return sat;
}

}  // namespace

TEST(CityLoad, FixtureTotals) {
    const CityGrid city = load_city(city3_files());
    EXPECT_EQ(city.n_groups(), 2u);
    EXPECT_DOUBLE_EQ(city.group_totals()[0], 4.0);  // 0->4, 1->2, 2->6
    EXPECT_DOUBLE_EQ(city.group_totals()[1], 9.0);  // 4->0, 8->0, 5->3
    EXPECT_DOUBLE_EQ(city.od(8, 0), 4.0);
}

TEST(CityLoad, EmptyOdFileIsParseError) {
    CityFiles f = city3_files();
    f.od_file = write_temp("empty_od.csv", "");
    EXPECT_THROW(load_city(f), ParseError);
}

TEST(CityLoad, MalformedRowReportsLine) {
    CityFiles f = city3_files();
    f.od_file = write_temp("bad_od.csv", "0,4,2\n4,0,abc\n");
    try {
        load_city(f);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(CityLoad, IndexOutsideGrid) {
    CityFiles f = city3_files();
    f.od_file = write_temp("far_od.csv", "0,9,2\n");
    EXPECT_THROW(load_city(f), ParseError);
}

TEST(CityLoad, SingleGroupRejected) {
    CityFiles f = city3_files();
    f.groups_file = write_temp("one_group.csv", "0,0\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n7,0\n8,0\n");
    EXPECT_THROW(load_city(f), std::invalid_argument);
}

TEST(CityLoad, ZeroDemandGroupRejected) {
    CityFiles f = city3_files();
    f.od_file = write_temp("one_sided.csv", "0,4,2\n1,2,1\n");
    EXPECT_THROW(load_city(f), std::invalid_argument);
}

TEST(CityLoad, MaskExcludesCells) {
    CityFiles f = city3_files();
    f.mask_file = write_temp("mask.csv", "0,1\n1,1\n2,1\n3,1\n4,1\n5,1\n6,0\n7,1\n8,1\n");
    const CityGrid city = load_city(f);
    EXPECT_TRUE(city.excluded(6));
    EXPECT_FALSE(city.excluded(2));
    EXPECT_DOUBLE_EQ(city.group_totals()[0], 3.0);  // 2->6 is gone
}

TEST(CityLoad, PriceBucketsIntoEqualFrequencyGroups) {
    CityFiles f = city3_files();
    f.groups_file = write_temp("prices.csv",
                               "cell,price\n0,10\n1,20\n2,30\n3,40\n4,50\n5,60\n6,70\n7,80\n8,90\n");
    f.n_groups = 3;
    const CityGrid city = load_city(f);
    EXPECT_EQ(city.n_groups(), 3u);
    EXPECT_EQ(city.group(0), 0);
    EXPECT_EQ(city.group(4), 1);
    EXPECT_EQ(city.group(8), 2);
}

TEST(CityLoad, EqualFrequencyHelper) {
    EXPECT_EQ(equal_frequency_groups({5, 1, 4, 2, 3, 6}, 2), (std::vector<int>{1, 0, 1, 0, 0, 1}));
    EXPECT_EQ(equal_frequency_groups({1, 1, 1, 1}, 2), (std::vector<int>{0, 0, 1, 1}));
}

TEST(CityGridInvariants, DiagonalIgnoredAndNegativeRejected) {
    CityGrid city(1, 2, {5, 4, 6, 5}, {0, 1});
    EXPECT_DOUBLE_EQ(city.od(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(city.group_totals()[0], 4.0);
    EXPECT_THROW(CityGrid(1, 2, {0, -1, 6, 0}, {0, 1}), std::invalid_argument);
}

TEST(Reset, AllowedDirections) {
    const CityGrid city = load_city(city3_files());
    const auto center = reset(city, 4, 3);
    EXPECT_EQ(std::count(center.mask.begin(), center.mask.end(), true), 8);
    const auto corner = reset(city, 0, 3);
    EXPECT_EQ(std::count(corner.mask.begin(), corner.mask.end(), true), 3);
    EXPECT_EQ(corner.state.line, (std::vector<std::size_t>{0}));
    EXPECT_EQ(corner.state.steps_left, 3u);
    EXPECT_EQ(corner.state.satisfied, (std::vector<double>{0, 0}));
}

TEST(Reset, ExcludedStartRejected) {
    CityGrid city(1, 3, {0, 1, 0, 1, 0, 0, 0, 0, 0}, {0, 1, kExcluded});
    EXPECT_THROW(reset(city, 2, 2), std::invalid_argument);
}

TEST(Step, ToyCityEast) {
    const CityGrid city = toy_1x2();
    const auto r = reset(city, 0, 1);
    const auto out = step(r.state, city, 2);  // E
    EXPECT_EQ(out.reward, (ObjectiveVector{1, 1}));
    EXPECT_TRUE(out.done);
}

TEST(Step, FixtureReward) {
    const CityGrid city = load_city(city3_files());
    const auto r = reset(city, 0, 3);
    const auto out = step(r.state, city, 3);  // SE: 0 -> 4
    EXPECT_DOUBLE_EQ(out.reward[0], 2.0 / 4.0);
    EXPECT_NEAR(out.reward[1], 3.0 / 9.0, 1e-12);
    EXPECT_FALSE(out.done);
}

TEST(Step, RevisitMaskedAndContractViolation) {
    const CityGrid city = toy_1x2();
    auto r = reset(city, 0, 5);
    const auto out = step(r.state, city, 2);
    EXPECT_FALSE(out.mask[6]);  // W leads back to cell 0
    EXPECT_TRUE(out.done);      // nowhere left to go
    EXPECT_THROW(step(out.state, city, 6), ContractViolation);
    EXPECT_THROW(step(r.state, city, 0), ContractViolation);  // N leaves the grid
}

TEST(Step, DirectionalConstraint) {
    std::vector<double> od(9 * 9, 1.0);
    ActionMask only_east{};
    only_east[2] = true;
    CityGrid city(3, 3, od, {0, 0, 0, 1, 1, 1, 0, 1, 0}, only_east);
    const auto r = reset(city, 4, 3);
    EXPECT_EQ(std::count(r.mask.begin(), r.mask.end(), true), 1);
    EXPECT_TRUE(r.mask[2]);
}

TEST(Step, RandomEpisodesMatchOneShotAndStayInUnitBox) {
    std::mt19937_64 rng(12);
    const CityGrid city = load_city(city3_files());
    for (int t = 0; t < 300; ++t) {
        auto r = reset(city, static_cast<std::size_t>(t % 9), 5);
        EpisodeState s = r.state;
        ActionMask mask = r.mask;
        std::vector<double> total(city.n_groups(), 0.0);
        bool done = std::none_of(mask.begin(), mask.end(), [](bool b) { return b; });
        while (!done) {
            std::vector<std::size_t> allowed;
            for (std::size_t a = 0; a < kDirections; ++a) {
                if (mask[a]) allowed.push_back(a);
            }
            const auto out = step(s, city, allowed[rng() % allowed.size()]);
            ASSERT_EQ(out.reward.size(), city.n_groups());
            for (std::size_t g = 0; g < total.size(); ++g) total[g] += out.reward[g];
            s = out.state;
            mask = out.mask;
            done = out.done;
        }
        const auto oneshot = line_return(city, s.line);
        const auto oracle = coverage(city, s.line);
        for (std::size_t g = 0; g < total.size(); ++g) {
            EXPECT_EQ(total[g], oneshot[g]);
            EXPECT_NEAR(total[g], oracle[g], 1e-12);
            EXPECT_GE(total[g], 0.0);
            EXPECT_LE(total[g], 1.0 + 1e-12);
        }
        // consecutive cells are 8-neighbours and never repeat
        std::vector<std::size_t> sorted = s.line;
        std::sort(sorted.begin(), sorted.end());
        EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
        for (std::size_t i = 1; i < s.line.size(); ++i) {
            const long dr = static_cast<long>(s.line[i] / 3) - static_cast<long>(s.line[i - 1] / 3);
            const long dc = static_cast<long>(s.line[i] % 3) - static_cast<long>(s.line[i - 1] % 3);
            EXPECT_LE(std::max(std::labs(dr), std::labs(dc)), 1);
        }
    }
}

TEST(Step, ReturnIndependentOfVisitOrder) {
    // irrational-looking flows so summation order would show up in the last bits
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> density(16);
    for (double& x : density) x = u(rng);
    std::vector<int> groups(16);
    for (std::size_t c = 0; c < groups.size(); ++c) groups[c] = static_cast<int>(c % 3);
    const CityGrid city(4, 4, estimate_od_mobility_law(density, 4, 4, {}, {}), groups);
    auto walk = [&](const std::vector<std::size_t>& cells) {
        EpisodeState s = reset(city, cells[0], cells.size() - 1).state;
        std::vector<double> total(city.n_groups(), 0.0);
        for (std::size_t i = 1; i < cells.size(); ++i) {
            std::size_t a = 0;
            while (city.neighbor(s.location(), a) != cells[i]) ++a;
            const auto out = step(s, city, a);
            for (std::size_t g = 0; g < total.size(); ++g) total[g] += out.reward[g];
            s = out.state;
        }
        return total;
    };
    for (int t = 0; t < 200; ++t) {
        auto r = reset(city, rng() % 16, 6);
        EpisodeState s = r.state;
        while (true) {
            const auto mask = action_mask(s, city);
            std::vector<std::size_t> allowed;
            for (std::size_t a = 0; a < kDirections; ++a) {
                if (mask[a]) allowed.push_back(a);
            }
            if (allowed.empty()) break;
            s = step(s, city, allowed[rng() % allowed.size()]).state;
        }
        if (s.line.size() < 2) continue;
        std::vector<std::size_t> back(s.line.rbegin(), s.line.rend());
        const auto fwd = walk(s.line);
        EXPECT_EQ(fwd, walk(back));
        EXPECT_EQ(fwd, line_return(city, s.line));
    }
}

TEST(Step, Deterministic) {
    const CityGrid city = load_city(city3_files());
    const auto r = reset(city, 4, 3);
    const auto a = step(r.state, city, 0);
    const auto b = step(r.state, city, 0);
    EXPECT_EQ(a.reward, b.reward);
    EXPECT_EQ(a.state.line, b.state.line);
}

TEST(Observation, OneHot) {
    const CityGrid city = load_city(city3_files());
    const auto r = reset(city, 5, 2);
    ASSERT_EQ(r.observation.size(), 9u);
    EXPECT_DOUBLE_EQ(std::accumulate(r.observation.begin(), r.observation.end(), 0.0), 1.0);
    EXPECT_DOUBLE_EQ(r.observation[5], 1.0);
}

TEST(Env, AdaptorMatchesFreeFunctions) {
    auto city = std::make_shared<const CityGrid>(load_city(city3_files()));
    TndpEnv env(city, 0, 2);
    env.reset();
    EXPECT_EQ(env.n_objectives(), 2u);
    EXPECT_EQ(env.observation_size(), 9u);
    const auto mask = env.action_mask();
    EXPECT_EQ(std::count(mask.begin(), mask.end(), 1), 3);
    auto [reward, done] = env.step(3);
    EXPECT_DOUBLE_EQ(reward[0], 0.5);
    EXPECT_FALSE(done);
    auto copy = env.clone();
    auto second = env.step(2);  // 4 -> 5
    auto mirrored = copy->step(2);
    EXPECT_EQ(second.reward, mirrored.reward);
    EXPECT_TRUE(second.done);
}

TEST(MobilityLaw, TwoCellExample) {
    const auto od = estimate_od_mobility_law({1, 1}, 1, 2, {}, {1.0, 1.0 / 7.0, 7.0});
    EXPECT_NEAR(od[1], 7.0 / std::log(49.0), 1e-12);
    EXPECT_NEAR(od[1], 1.7987, 1e-4);
    EXPECT_EQ(od[0], 0.0);
    EXPECT_EQ(od[3], 0.0);
}

TEST(MobilityLaw, InverseSquareAndSymmetry) {
    const std::vector<double> rho{1, 0, 2, 3};
    const auto od = estimate_od_mobility_law(rho, 1, 4, {}, {});
    // cell 0 -> 2 is twice as far as 0 -> 1 would be with equal density
    const auto flat = estimate_od_mobility_law({1, 1, 1}, 1, 3, {}, {});
    EXPECT_NEAR(flat[0 * 3 + 2], flat[0 * 3 + 1] / 4.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_NEAR(od[i * 4 + j] * rho[i], od[j * 4 + i] * rho[j], 1e-12);
        }
    }
}

TEST(MobilityLaw, Errors) {
    EXPECT_THROW(estimate_od_mobility_law({1, 1}, 1, 2, {}, {1.0, 7.0, 7.0}), std::invalid_argument);
    EXPECT_THROW(estimate_od_mobility_law({1, 1}, 1, 2, {}, {1.0, 7.0, 1.0}), std::invalid_argument);
    const auto zero = estimate_od_mobility_law({0, 0, 0, 0}, 2, 2, {}, {});
    EXPECT_TRUE(std::all_of(zero.begin(), zero.end(), [](double x) { return x == 0.0; }));
}

TEST(MobilityLaw, ExcludedCellsCarryNoFlow) {
    const auto od = estimate_od_mobility_law({1, 1, 1}, 1, 3, {true, false, true}, {});
    EXPECT_EQ(od[0 * 3 + 1], 0.0);
    EXPECT_EQ(od[1 * 3 + 2], 0.0);
    EXPECT_GT(od[0 * 3 + 2], 0.0);
}
