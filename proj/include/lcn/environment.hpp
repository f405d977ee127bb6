#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "lcn/dominance.hpp"

namespace lcn {

struct StepResult {
    ObjectiveVector reward;
    bool done = false;
};

/// Episodic, deterministic multi-objective environment with discrete actions.
/// One instance carries one episode; `clone()` gives an independent copy
/// (immutable data such as city grids is shared).
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::size_t observation_size() const = 0;
    virtual std::size_t n_actions() const = 0;
    virtual std::size_t n_objectives() const = 0;
    /// Upper bound on the length of any episode.
    virtual std::size_t max_episode_steps() const = 0;

    virtual void reset() = 0;
    virtual std::vector<double> observation() const = 0;
    /// allowed[a] != 0 iff action a may be taken now.
    virtual std::vector<char> action_mask() const = 0;
    virtual StepResult step(std::size_t action) = 0;

    virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace lcn
