#pragma once

// Quality indicators over sets of policy values.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lcn/dominance.hpp"

namespace lcn {

/// Nonnegative weights summing to one.
using WeightVector = std::vector<double>;

/// Lebesgue measure of the union of boxes [ref, v] over `points` (maximisation).
/// Points that do not strictly exceed `ref` in every objective add nothing.
double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& ref);

inline double hypervolume(const FrontSet& front, const ObjectiveVector& ref) {
    return hypervolume(front.points, ref);
}

/// Simplex-lattice weights: all (k_1/H, ..., k_d/H) with sum k_i = H, where H is
/// the largest integer with C(H + d - 1, d - 1) <= n. Lexicographic in k.
std::vector<WeightVector> generate_equidistant_weights(std::size_t d, std::size_t n);

/// Mean over `weights` of the best linear utility attained by `points`.
double expected_utility(const std::vector<ObjectiveVector>& points,
                        const std::vector<WeightVector>& weights);

/// Expected utility over `n_weights` equidistant weight vectors.
double eum(const std::vector<ObjectiveVector>& points, std::size_t n_weights);

inline double eum(const FrontSet& front, std::size_t n_weights) {
    return eum(front.points, n_weights);
}

/// sum_i sum_j |v_i - v_j| / (2 d sum_k v_k); 0 for the zero vector.
double gini_index(std::span<const double> v);

/// (sum_i v_i) * (1 - gini_index(v)).
double sen_welfare(std::span<const double> v);

double total_efficiency(std::span<const double> v);

/// Best Sen welfare over the set.
double set_sen_welfare(const std::vector<ObjectiveVector>& points);

inline double set_sen_welfare(const FrontSet& front) { return set_sen_welfare(front.points); }

/// One evaluation snapshot. The welfare fields are empty when any point has a
/// negative entry (Gini is undefined there); gini and total_efficiency describe
/// the point with the highest Sen welfare.
struct MetricsRecord {
    std::int64_t step = 0;
    double hypervolume = 0.0;
    double eum = 0.0;
    std::optional<double> sen_welfare;
    std::optional<double> mean_sen_welfare;
    std::optional<double> gini;
    std::optional<double> total_efficiency;
    std::size_t front_size = 0;
};

MetricsRecord compute_metrics(const std::vector<ObjectiveVector>& points,
                              const ObjectiveVector& ref, std::size_t n_weights,
                              std::int64_t step = 0);

}  // namespace lcn
