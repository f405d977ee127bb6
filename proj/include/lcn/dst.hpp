#pragma once

// Deep Sea Treasure: a submarine starts in the top-left corner of an 11x10
// grid and collects exactly one treasure. Objectives are (treasure, -time).

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "lcn/dominance.hpp"
#include "lcn/environment.hpp"

namespace lcn::dst {

inline constexpr int kRows = 11;
inline constexpr int kCols = 10;

enum Action : std::size_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

struct Position {
    int row = 0;
    int col = 0;
    friend bool operator==(const Position&, const Position&) = default;
};

struct Treasure {
    Position at;
    double value = 0.0;
};

/// Sea floor layout shared by both variants, with one set of treasure values.
class DstMap {
public:
    /// Treasures 0.7, 8.2, 11.5, 14, 15.1, 16.1, 19.6, 20.3, 22.4, 23.7.
    static DstMap standard();
    /// Treasures 1, 2, 3, 5, 8, 16, 24, 50, 74, 124.
    static DstMap concave();
    /// "standard" or "concave"; throws std::invalid_argument otherwise.
    static DstMap by_name(const std::string& name);

    bool seabed(Position p) const;
    /// Treasure value at p, 0 when there is none.
    double treasure(Position p) const;
    const std::vector<Treasure>& treasures() const { return treasures_; }
    const std::string& name() const { return name_; }

private:
    DstMap(std::string name, const std::array<double, 10>& values);

    std::string name_;
    std::vector<Treasure> treasures_;
};

struct DstStep {
    Position position;
    ObjectiveVector reward;
    bool done = false;
};

Position dst_reset();

/// One move; blocked moves keep the position and still cost one time unit.
DstStep dst_step(const DstMap& map, Position position, std::size_t action);

/// One-hot encoding of the position over the 110 cells.
std::vector<double> dst_observation(Position position);

/// (value, -shortest time) for every treasure, computed by breadth-first search.
FrontSet dst_true_pareto_front(const DstMap& map);

class DstEnv final : public Environment {
public:
    explicit DstEnv(DstMap map, std::size_t max_steps = 100);

    std::size_t observation_size() const override { return kRows * kCols; }
    std::size_t n_actions() const override { return 4; }
    std::size_t n_objectives() const override { return 2; }
    std::size_t max_episode_steps() const override { return max_steps_; }

    void reset() override;
    std::vector<double> observation() const override;
    std::vector<char> action_mask() const override;
    StepResult step(std::size_t action) override;
    std::unique_ptr<Environment> clone() const override;

    Position position() const { return position_; }
    const DstMap& map() const { return map_; }

private:
    DstMap map_;
    std::size_t max_steps_;
    std::size_t steps_ = 0;
    Position position_{};
};

}  // namespace lcn::dst
