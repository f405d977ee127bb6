#pragma once

// Vector dominance relations used throughout the toolkit: Pareto, Lorenz and
// lambda-Lorenz dominance, front extraction and NSGA-II crowding distance.
//
// All objectives are maximised. Comparisons are exact unless a nonzero
// tolerance is passed: with tolerance `tol`, a dominates b when
// a_j >= b_j - tol for every j and a_j > b_j + tol for at least one j.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lcn {

/// A d-dimensional return vector, one entry per objective.
using ObjectiveVector = std::vector<double>;

/// Cumulative sums of an ascending-sorted vector.
using LorenzVector = std::vector<double>;

/// A dominance relation. `lambda` is only meaningful for LambdaLorenz.
struct Relation {
    enum class Kind { Pareto, Lorenz, LambdaLorenz };

    Kind kind = Kind::Pareto;
    double lambda = 0.0;

    static Relation pareto() { return {Kind::Pareto, 0.0}; }
    static Relation lorenz() { return {Kind::Lorenz, 0.0}; }
    /// Throws std::invalid_argument unless lambda is in [0, 1].
    static Relation lambda_lorenz(double lambda);

    std::string name() const;

    friend bool operator==(const Relation&, const Relation&) = default;
};

/// Points that are pairwise non-dominated under `relation`.
struct FrontSet {
    std::vector<ObjectiveVector> points;
    Relation relation;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

bool pareto_dominates(std::span<const double> a, std::span<const double> b, double tol = 0.0);

/// Stable ascending sort.
ObjectiveVector sort_ascending(std::span<const double> v);

LorenzVector lorenz_vector(std::span<const double> v);

bool lorenz_dominates(std::span<const double> a, std::span<const double> b, double tol = 0.0);

/// lambda * sort_ascending(v) + (1 - lambda) * lorenz_vector(v).
ObjectiveVector lambda_transform(std::span<const double> v, double lambda);

bool lambda_lorenz_dominates(std::span<const double> a, std::span<const double> b, double lambda,
                             double tol = 0.0);

/// The vector on which `relation` reduces to Pareto dominance.
ObjectiveVector relation_transform(std::span<const double> v, const Relation& relation);

bool dominates(std::span<const double> a, std::span<const double> b, const Relation& relation,
               double tol = 0.0);

/// Indices (in input order) of the points that survive front extraction.
/// Exact duplicates keep only their first occurrence.
std::vector<std::size_t> front_indices(const std::vector<ObjectiveVector>& points,
                                       const Relation& relation, double tol = 0.0);

FrontSet extract_front(const std::vector<ObjectiveVector>& points, const Relation& relation,
                       double tol = 0.0);

/// Adds `point` to `front` and drops whatever it now dominates. Returns false
/// (leaving the front untouched) when the point is dominated or already present.
bool insert_into_front(FrontSet& front, const ObjectiveVector& point, double tol = 0.0);

/// NSGA-II crowding distance. Per objective the points are sorted, the two
/// extremes receive +inf and interior points accumulate (next - prev) / (max - min).
/// Objectives with max == min contribute nothing, so a set of identical points
/// scores 0 everywhere. A single point scores +inf. Small values mean crowded.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& points);

/// Throws std::invalid_argument unless the sizes match and every entry is finite.
void require_comparable(std::span<const double> a, std::span<const double> b);

}  // namespace lcn
