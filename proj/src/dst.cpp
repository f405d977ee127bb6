#include "lcn/dst.hpp"

#include <deque>
#include <stdexcept>

#include "lcn/errors.hpp"

namespace lcn::dst {

namespace {

// Treasure cells in order of depth; every cell below one of these in the same
// column is seabed.
constexpr std::array<Position, 10> kTreasureCells{{
    {1, 0}, {2, 1}, {3, 2}, {4, 3}, {4, 4}, {4, 5}, {7, 6}, {7, 7}, {9, 8}, {10, 9},
}};

constexpr std::array<std::array<int, 2>, 4> kMoves{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

bool on_grid(Position p) { return p.row >= 0 && p.row < kRows && p.col >= 0 && p.col < kCols; }

}  // namespace

DstMap::DstMap(std::string name, const std::array<double, 10>& values) : name_(std::move(name)) {
    for (std::size_t i = 0; i < kTreasureCells.size(); ++i) {
        treasures_.push_back({kTreasureCells[i], values[i]});
    }
}

DstMap DstMap::standard() {
    return DstMap("standard", {0.7, 8.2, 11.5, 14.0, 15.1, 16.1, 19.6, 20.3, 22.4, 23.7});
}

DstMap DstMap::concave() {
    return DstMap("concave", {1.0, 2.0, 3.0, 5.0, 8.0, 16.0, 24.0, 50.0, 74.0, 124.0});
}

DstMap DstMap::by_name(const std::string& name) {
    if (name == "standard") return standard();
    if (name == "concave") return concave();
    throw std::invalid_argument("unknown Deep Sea Treasure map '" + name + "'");
}

bool DstMap::seabed(Position p) const {
    return p.row > kTreasureCells[static_cast<std::size_t>(p.col)].row;
}

double DstMap::treasure(Position p) const {
    for (const auto& t : treasures_) {
        if (t.at == p) return t.value;
    }
    return 0.0;
}

Position dst_reset() { return {0, 0}; }

DstStep dst_step(const DstMap& map, Position position, std::size_t action) {
    if (action >= kMoves.size()) throw ContractViolation("Deep Sea Treasure action must be in [0, 4)");
    Position next{position.row + kMoves[action][0], position.col + kMoves[action][1]};
    if (!on_grid(next) || map.seabed(next)) next = position;
    const double value = map.treasure(next);
    return {next, {value, -1.0}, value > 0.0};
}

std::vector<double> dst_observation(Position position) {
    std::vector<double> obs(kRows * kCols, 0.0);
    obs[static_cast<std::size_t>(position.row * kCols + position.col)] = 1.0;
    return obs;
}

FrontSet dst_true_pareto_front(const DstMap& map) {
    // Treasures are terminal, so the search does not expand through them.
    std::array<int, kRows * kCols> dist;
    dist.fill(-1);
    std::deque<Position> queue{dst_reset()};
    dist[0] = 0;
    while (!queue.empty()) {
        const Position p = queue.front();
        queue.pop_front();
        if (map.treasure(p) > 0.0) continue;
        for (std::size_t a = 0; a < kMoves.size(); ++a) {
            const Position q = dst_step(map, p, a).position;
            int& dq = dist[static_cast<std::size_t>(q.row * kCols + q.col)];
            if (dq < 0) {
                dq = dist[static_cast<std::size_t>(p.row * kCols + p.col)] + 1;
                queue.push_back(q);
            }
        }
    }
    FrontSet front{{}, Relation::pareto()};
    for (const auto& t : map.treasures()) {
        const int d = dist[static_cast<std::size_t>(t.at.row * kCols + t.at.col)];
        front.points.push_back({t.value, -static_cast<double>(d)});
    }
    return front;
}

DstEnv::DstEnv(DstMap map, std::size_t max_steps) : map_(std::move(map)), max_steps_(max_steps) {
    if (max_steps_ == 0) throw std::invalid_argument("step cap must be positive");
}

void DstEnv::reset() {
    steps_ = 0;
    position_ = dst_reset();
}

std::vector<double> DstEnv::observation() const { return dst_observation(position_); }

std::vector<char> DstEnv::action_mask() const { return std::vector<char>(4, 1); }

StepResult DstEnv::step(std::size_t action) {
    if (steps_ >= max_steps_) throw ContractViolation("episode already finished");
    auto out = dst_step(map_, position_, action);
    position_ = out.position;
    ++steps_;
    return {std::move(out.reward), out.done || steps_ >= max_steps_};
}

std::unique_ptr<Environment> DstEnv::clone() const { return std::make_unique<DstEnv>(*this); }

}  // namespace lcn::dst
