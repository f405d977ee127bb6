#include "lcn/tndp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lcn/csv.hpp"
#include "lcn/errors.hpp"

namespace lcn::tndp {

CityGrid::CityGrid(std::size_t rows, std::size_t cols, std::vector<double> od,
                   std::vector<int> groups, ActionMask allowed_directions)
    : rows_(rows), cols_(cols), od_(std::move(od)), groups_(std::move(groups)),
      allowed_(allowed_directions) {
    const std::size_t n = rows_ * cols_;
    if (n == 0) throw std::invalid_argument("city grid must have at least one cell");
    if (od_.size() != n * n) {
        throw std::invalid_argument("OD matrix must be " + std::to_string(n) + "x" +
                                    std::to_string(n));
    }
    if (groups_.size() != n) throw std::invalid_argument("need one group label per cell");

    int max_group = kExcluded;
    for (int g : groups_) {
        if (g < kExcluded) throw std::invalid_argument("group labels must be >= 0 or excluded");
        max_group = std::max(max_group, g);
    }
    if (max_group < 1) throw std::invalid_argument("a city needs at least two groups");

    for (std::size_t i = 0; i < n; ++i) {
        od_[i * n + i] = 0.0;
        if (groups_[i] != kExcluded) continue;
        // no line can reach an excluded cell, so its flows are unservable
        for (std::size_t j = 0; j < n; ++j) od_[i * n + j] = od_[j * n + i] = 0.0;
    }
    for (double f : od_) {
        if (!std::isfinite(f) || f < 0.0) {
            throw std::invalid_argument("OD flows must be finite and nonnegative");
        }
    }

    group_totals_.assign(static_cast<std::size_t>(max_group) + 1, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        if (groups_[c] == kExcluded) continue;
        const double row = std::accumulate(od_.begin() + c * n, od_.begin() + (c + 1) * n, 0.0);
        group_totals_[groups_[c]] += row;
    }
    for (std::size_t g = 0; g < group_totals_.size(); ++g) {
        if (!(group_totals_[g] > 0.0)) {
            throw std::invalid_argument("group " + std::to_string(g) + " has no demand");
        }
    }
}

std::optional<std::size_t> CityGrid::neighbor(std::size_t cell, std::size_t direction) const {
    const auto r = static_cast<long long>(cell / cols_) + kOffsets[direction][0];
    const auto c = static_cast<long long>(cell % cols_) + kOffsets[direction][1];
    if (r < 0 || c < 0 || r >= static_cast<long long>(rows_) || c >= static_cast<long long>(cols_)) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c);
}

ActionMask action_mask(const EpisodeState& state, const CityGrid& city) {
    ActionMask mask{};
    if (state.steps_left == 0) return mask;
    for (std::size_t a = 0; a < kDirections; ++a) {
        if (!city.allowed_directions()[a]) continue;
        const auto next = city.neighbor(state.location(), a);
        if (!next || city.excluded(*next)) continue;
        if (std::find(state.line.begin(), state.line.end(), *next) != state.line.end()) continue;
        mask[a] = true;
    }
    return mask;
}

std::vector<double> observation(const EpisodeState& state, const CityGrid& city) {
    std::vector<double> obs(city.n_cells(), 0.0);
    obs[state.location()] = 1.0;
    return obs;
}

ResetResult reset(const CityGrid& city, std::size_t start_cell, std::size_t episode_len) {
    if (start_cell >= city.n_cells()) throw std::invalid_argument("start cell outside the grid");
    if (city.excluded(start_cell)) throw std::invalid_argument("start cell is excluded");
    if (episode_len == 0) throw std::invalid_argument("episode length must be positive");
    ResetResult out;
    out.state.line = {start_cell};
    out.state.steps_left = episode_len;
    out.state.satisfied.assign(city.n_groups(), 0.0);
    out.observation = observation(out.state, city);
    out.mask = action_mask(out.state, city);
    return out;
}

namespace {

// Fractions live on the grid k * 2^-48. Differences and partial sums of grid
// values below 2^5 are exact, so an episode's summed rewards equal the
// fraction of its final line whatever order the cells were added in.
constexpr int kFractionBits = 48;

double snap(double fraction) {
    return std::ldexp(std::nearbyint(std::ldexp(fraction, kFractionBits)), -kFractionBits);
}

// Raw satisfied flow per group, summed in cell-index order.
std::vector<double> satisfied_flow(const CityGrid& city, std::vector<std::size_t> cells) {
    std::sort(cells.begin(), cells.end());
    std::vector<double> sat(city.n_groups(), 0.0);
    for (std::size_t a : cells) {
        for (std::size_t b : cells) {
            if (a != b) sat[city.group(a)] += city.od(a, b);
        }
    }
    return sat;
}

ObjectiveVector satisfied_fraction(const CityGrid& city, const std::vector<double>& sat) {
    ObjectiveVector out(sat.size());
    for (std::size_t g = 0; g < sat.size(); ++g) out[g] = snap(sat[g] / city.group_totals()[g]);
    return out;
}

}  // namespace

StepOutcome step(const EpisodeState& state, const CityGrid& city, std::size_t action) {
    if (action >= kDirections) throw ContractViolation("action must be in [0, 8)");
    if (!action_mask(state, city)[action]) {
        throw ContractViolation("action " + std::to_string(action) + " is not allowed here");
    }
    StepOutcome out;
    out.state = state;
    out.state.line.push_back(*city.neighbor(state.location(), action));
    out.state.satisfied = satisfied_flow(city, out.state.line);
    const auto before = satisfied_fraction(city, state.satisfied);
    const auto after = satisfied_fraction(city, out.state.satisfied);
    out.reward.resize(city.n_groups());
    for (std::size_t g = 0; g < after.size(); ++g) out.reward[g] = after[g] - before[g];
    out.state.steps_left -= 1;
    out.mask = action_mask(out.state, city);
    out.done = std::none_of(out.mask.begin(), out.mask.end(), [](bool x) { return x; });
    return out;
}

ObjectiveVector line_return(const CityGrid& city, const std::vector<std::size_t>& line) {
    return satisfied_fraction(city, satisfied_flow(city, line));
}

namespace {

bool is_number(const std::string& s) {
    double v;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

// Rows of a city file. A non-numeric first row is taken as a header.
std::vector<csv::Row> read_table(const std::filesystem::path& path, std::size_t width) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    auto rows = csv::read_rows(in);
    if (!rows.empty() && !rows.front().fields.empty() && !is_number(rows.front().fields.front())) {
        rows.erase(rows.begin());
    }
    if (rows.empty()) throw ParseError(path.string(), 0, "file has no data rows");
    for (const auto& row : rows) {
        if (row.fields.size() != width) {
            throw ParseError(path.string(), row.line,
                             "expected " + std::to_string(width) + " columns, got " +
                                 std::to_string(row.fields.size()));
        }
    }
    return rows;
}

std::size_t parse_cell(const std::string& field, const std::string& source, std::size_t line,
                       std::size_t n_cells) {
    const long long v = csv::parse_int(field, source, line);
    if (v < 0 || static_cast<std::size_t>(v) >= n_cells) {
        throw ParseError(source, line, "cell index " + field + " outside the grid");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<int> equal_frequency_groups(const std::vector<double>& values, std::size_t k) {
    if (k == 0) throw std::invalid_argument("need at least one bucket");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<int> out(values.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        out[order[rank]] = static_cast<int>(rank * k / values.size());
    }
    return out;
}

CityGrid load_city(const CityFiles& files) {
    const std::size_t n = files.rows * files.cols;
    if (n == 0) throw std::invalid_argument("grid dimensions must be positive");

    std::vector<double> od(n * n, 0.0);
    const std::string od_src = files.od_file.string();
    for (const auto& row : read_table(files.od_file, 3)) {
        const std::size_t o = parse_cell(row.fields[0], od_src, row.line, n);
        const std::size_t d = parse_cell(row.fields[1], od_src, row.line, n);
        const double flow = csv::parse_double(row.fields[2], od_src, row.line);
        if (!std::isfinite(flow) || flow < 0.0) {
            throw ParseError(od_src, row.line, "flow must be finite and nonnegative");
        }
        od[o * n + d] += flow;
    }

    std::vector<bool> inside(n, true);
    if (files.mask_file) {
        const std::string src = files.mask_file->string();
        for (const auto& row : read_table(*files.mask_file, 2)) {
            const std::size_t c = parse_cell(row.fields[0], src, row.line, n);
            const long long flag = csv::parse_int(row.fields[1], src, row.line);
            if (flag != 0 && flag != 1) throw ParseError(src, row.line, "mask flag must be 0 or 1");
            inside[c] = flag == 1;
        }
    }

    const std::string grp_src = files.groups_file.string();
    std::vector<std::optional<double>> label(n);
    for (const auto& row : read_table(files.groups_file, 2)) {
        const std::size_t c = parse_cell(row.fields[0], grp_src, row.line, n);
        if (label[c]) throw ParseError(grp_src, row.line, "cell listed twice");
        label[c] = files.n_groups ? csv::parse_double(row.fields[1], grp_src, row.line)
                                  : static_cast<double>(csv::parse_int(row.fields[1], grp_src, row.line));
    }

    std::vector<int> groups(n, kExcluded);
    std::vector<std::size_t> members;
    std::vector<double> values;
    for (std::size_t c = 0; c < n; ++c) {
        if (!inside[c]) continue;
        if (!label[c]) {
            if (files.mask_file) {
                throw std::invalid_argument("cell " + std::to_string(c) +
                                            " is inside the mask but has no group");
            }
            continue;
        }
        members.push_back(c);
        values.push_back(*label[c]);
    }

    std::vector<int> assigned;
    if (files.n_groups) {
        assigned = equal_frequency_groups(values, *files.n_groups);
    } else {
        // compact arbitrary integer ids onto 0..G-1, preserving order
        std::map<double, int> ids;
        for (double v : values) ids.emplace(v, 0);
        int next = 0;
        for (auto& [v, id] : ids) id = next++;
        for (double v : values) assigned.push_back(ids.at(v));
    }
    for (std::size_t i = 0; i < members.size(); ++i) groups[members[i]] = assigned[i];

    return CityGrid(files.rows, files.cols, std::move(od), std::move(groups),
                    files.allowed_directions);
}

std::vector<double> estimate_od_mobility_law(const std::vector<double>& density, std::size_t rows,
                                             std::size_t cols, const std::vector<bool>& included,
                                             const MobilityLawParams& params) {
    const std::size_t n = rows * cols;
    if (density.size() != n) throw std::invalid_argument("need one density value per cell");
    if (!included.empty() && included.size() != n) {
        throw std::invalid_argument("mask must cover every cell");
    }
    if (!(params.f_min > 0.0) || !(params.f_max > params.f_min)) {
        throw std::invalid_argument("visitation frequencies need f_max > f_min > 0");
    }
    if (!(params.cell_radius > 0.0)) throw std::invalid_argument("cell radius must be positive");
    for (double rho : density) {
        if (!std::isfinite(rho) || rho < 0.0) {
            throw std::invalid_argument("densities must be finite and nonnegative");
        }
    }

    const double log_ratio = std::log(params.f_max / params.f_min);
    const double r2 = params.cell_radius * params.cell_radius;
    auto in = [&](std::size_t c) { return included.empty() || included[c]; };

    std::vector<double> od(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!in(i)) continue;
        const auto ri = static_cast<long long>(i / cols), ci = static_cast<long long>(i % cols);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !in(j)) continue;
            const auto rj = static_cast<long long>(j / cols), cj = static_cast<long long>(j % cols);
            const double dist = static_cast<double>(std::llabs(ri - rj) + std::llabs(ci - cj));
            const double mu = density[j] * r2 * params.f_max;
            od[i * n + j] = mu / (dist * dist * log_ratio);
        }
    }
    return od;
}

TndpEnv::TndpEnv(std::shared_ptr<const CityGrid> city, std::size_t start_cell,
                 std::size_t episode_len)
    : city_(std::move(city)), start_(start_cell), episode_len_(episode_len) {
    if (!city_) throw std::invalid_argument("city is null");
    reset();
}

void TndpEnv::reset() { state_ = tndp::reset(*city_, start_, episode_len_).state; }

std::vector<double> TndpEnv::observation() const { return tndp::observation(state_, *city_); }

std::vector<char> TndpEnv::action_mask() const {
    const auto m = tndp::action_mask(state_, *city_);
    return std::vector<char>(m.begin(), m.end());
}

StepResult TndpEnv::step(std::size_t action) {
    auto out = tndp::step(state_, *city_, action);
    state_ = std::move(out.state);
    return {std::move(out.reward), out.done};
}

std::unique_ptr<Environment> TndpEnv::clone() const { return std::make_unique<TndpEnv>(*this); }

}  // namespace lcn::tndp
