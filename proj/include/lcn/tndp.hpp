#pragma once

// Multi-objective transport network design. A city is a grid of equal cells
// with an origin-destination demand matrix and one socioeconomic group per
// cell. An episode draws a single line cell by cell; every step earns, per
// group, the fraction of that group's demand newly connected by the line.

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "lcn/dominance.hpp"
#include "lcn/environment.hpp"

namespace lcn::tndp {

inline constexpr int kExcluded = -1;
inline constexpr std::size_t kDirections = 8;

/// N, NE, E, SE, S, SW, W, NW as (row, col) offsets.
inline constexpr std::array<std::array<int, 2>, kDirections> kOffsets{{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

using ActionMask = std::array<bool, kDirections>;

inline constexpr ActionMask kAllDirections{true, true, true, true, true, true, true, true};

class CityGrid {
public:
    /// `od` is row-major (rows*cols) x (rows*cols); `groups` holds a label in
    /// [0, G) per cell or kExcluded. The diagonal of `od` and flows touching
    /// excluded cells are zeroed.
    /// Throws std::invalid_argument when the invariants do not hold.
    CityGrid(std::size_t rows, std::size_t cols, std::vector<double> od, std::vector<int> groups,
             ActionMask allowed_directions = kAllDirections);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t n_cells() const { return rows_ * cols_; }
    std::size_t n_groups() const { return group_totals_.size(); }

    double od(std::size_t origin, std::size_t dest) const { return od_[origin * n_cells() + dest]; }
    int group(std::size_t cell) const { return groups_[cell]; }
    bool excluded(std::size_t cell) const { return groups_[cell] == kExcluded; }
    const std::vector<double>& group_totals() const { return group_totals_; }
    const ActionMask& allowed_directions() const { return allowed_; }

    /// Cell reached from `cell` in `direction`, if it is on the grid.
    std::optional<std::size_t> neighbor(std::size_t cell, std::size_t direction) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> od_;
    std::vector<int> groups_;
    std::vector<double> group_totals_;
    ActionMask allowed_;
};

struct EpisodeState {
    std::vector<std::size_t> line;
    std::size_t steps_left = 0;
    std::vector<double> satisfied;  // raw flow units per group

    std::size_t location() const { return line.back(); }
};

struct ResetResult {
    EpisodeState state;
    std::vector<double> observation;
    ActionMask mask{};
};

struct StepOutcome {
    EpisodeState state;
    ObjectiveVector reward;
    bool done = false;
    ActionMask mask{};
};

ResetResult reset(const CityGrid& city, std::size_t start_cell, std::size_t episode_len);

/// Throws ContractViolation when `action` is masked.
StepOutcome step(const EpisodeState& state, const CityGrid& city, std::size_t action);

ActionMask action_mask(const EpisodeState& state, const CityGrid& city);

/// One-hot encoding of the current cell.
std::vector<double> observation(const EpisodeState& state, const CityGrid& city);

/// Per-group satisfied fraction of a whole line, rounded to a multiple of
/// 2^-48. Equal, bit for bit, to the summed step rewards of any episode
/// that builds the same set of cells.
ObjectiveVector line_return(const CityGrid& city, const std::vector<std::size_t>& line);

struct CityFiles {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::filesystem::path od_file;      // origin,dest,flow
    std::filesystem::path groups_file;  // cell,group   (or cell,price with n_groups)
    std::optional<std::filesystem::path> mask_file;  // cell,included(0|1)
    /// When set, the groups file carries raw prices bucketed into this many
    /// equal-frequency groups.
    std::optional<std::size_t> n_groups;
    ActionMask allowed_directions = kAllDirections;
};

/// Throws ParseError for malformed files and std::invalid_argument when the
/// city violates an invariant (fewer than two groups, a group without demand).
CityGrid load_city(const CityFiles& files);

/// Ranks `values` (ties by position) and assigns floor(rank * k / n).
std::vector<int> equal_frequency_groups(const std::vector<double>& values, std::size_t k);

struct MobilityLawParams {
    double cell_radius = 1.0;
    double f_min = 1.0 / 7.0;
    double f_max = 7.0;
};

/// Origin-destination flows from population density via the universal law of
/// visitation: OD_ij = mu_j / (d_ij^2 ln(f_max / f_min)) with
/// mu_j = density_j * radius^2 * f_max and d_ij the Manhattan distance in cells.
/// `included` may be empty (all cells in). Result is row-major, zero diagonal.
std::vector<double> estimate_od_mobility_law(const std::vector<double>& density, std::size_t rows,
                                             std::size_t cols, const std::vector<bool>& included,
                                             const MobilityLawParams& params);

/// Environment adaptor over a shared, immutable city.
class TndpEnv final : public Environment {
public:
    TndpEnv(std::shared_ptr<const CityGrid> city, std::size_t start_cell, std::size_t episode_len);

    std::size_t observation_size() const override { return city_->n_cells(); }
    std::size_t n_actions() const override { return kDirections; }
    std::size_t n_objectives() const override { return city_->n_groups(); }
    std::size_t max_episode_steps() const override { return episode_len_; }

    void reset() override;
    std::vector<double> observation() const override;
    std::vector<char> action_mask() const override;
    StepResult step(std::size_t action) override;
    std::unique_ptr<Environment> clone() const override;

    const EpisodeState& state() const { return state_; }
    const CityGrid& city() const { return *city_; }

private:
    std::shared_ptr<const CityGrid> city_;
    std::size_t start_;
    std::size_t episode_len_;
    EpisodeState state_;
};

}  // namespace lcn::tndp
