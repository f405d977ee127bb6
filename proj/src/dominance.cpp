#include "lcn/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lcn {

namespace {

void require_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1], got " + std::to_string(lambda));
    }
}

bool dominates_transformed(std::span<const double> a, std::span<const double> b, double tol) {
    bool strictly_better = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] < b[j] - tol) return false;
        if (a[j] > b[j] + tol) strictly_better = true;
    }
    return strictly_better;
}

}  // namespace

Relation Relation::lambda_lorenz(double lambda) {
    require_lambda(lambda);
    return {Kind::LambdaLorenz, lambda};
}

std::string Relation::name() const {
    switch (kind) {
        case Kind::Pareto: return "pareto";
        case Kind::Lorenz: return "lorenz";
        case Kind::LambdaLorenz: return "lambda-lorenz(" + std::to_string(lambda) + ")";
    }
    return "unknown";
}

void require_comparable(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
    if (a.empty()) throw std::invalid_argument("vectors must have at least one objective");
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(a.begin(), a.end(), finite) || !std::all_of(b.begin(), b.end(), finite)) {
        throw std::invalid_argument("objective vectors must be finite");
    }
}

bool pareto_dominates(std::span<const double> a, std::span<const double> b, double tol) {
    require_comparable(a, b);
    return dominates_transformed(a, b, tol);
}

ObjectiveVector sort_ascending(std::span<const double> v) {
    ObjectiveVector out(v.begin(), v.end());
    std::stable_sort(out.begin(), out.end());
    return out;
}

LorenzVector lorenz_vector(std::span<const double> v) {
    LorenzVector out = sort_ascending(v);
    std::partial_sum(out.begin(), out.end(), out.begin());
    return out;
}

bool lorenz_dominates(std::span<const double> a, std::span<const double> b, double tol) {
    require_comparable(a, b);
    return dominates_transformed(lorenz_vector(a), lorenz_vector(b), tol);
}

ObjectiveVector lambda_transform(std::span<const double> v, double lambda) {
    require_lambda(lambda);
    ObjectiveVector sorted = sort_ascending(v);
    ObjectiveVector out(sorted.size());
    double running = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        running += sorted[i];
        out[i] = lambda * sorted[i] + (1.0 - lambda) * running;
    }
    return out;
}

bool lambda_lorenz_dominates(std::span<const double> a, std::span<const double> b, double lambda,
                             double tol) {
    require_comparable(a, b);
    return dominates_transformed(lambda_transform(a, lambda), lambda_transform(b, lambda), tol);
}

ObjectiveVector relation_transform(std::span<const double> v, const Relation& relation) {
    switch (relation.kind) {
        case Relation::Kind::Pareto: return ObjectiveVector(v.begin(), v.end());
        case Relation::Kind::Lorenz: return lorenz_vector(v);
        case Relation::Kind::LambdaLorenz: return lambda_transform(v, relation.lambda);
    }
    throw std::invalid_argument("unknown relation");
}

bool dominates(std::span<const double> a, std::span<const double> b, const Relation& relation,
               double tol) {
    require_comparable(a, b);
    return dominates_transformed(relation_transform(a, relation), relation_transform(b, relation),
                                 tol);
}

std::vector<std::size_t> front_indices(const std::vector<ObjectiveVector>& points,
                                       const Relation& relation, double tol) {
    if (points.empty()) return {};
    for (const auto& p : points) require_comparable(points.front(), p);

    std::vector<ObjectiveVector> keys;
    keys.reserve(points.size());
    for (const auto& p : points) keys.push_back(relation_transform(p, relation));

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < points.size() && !drop; ++j) {
            if (j == i) continue;
            if (j < i && points[j] == points[i]) drop = true;
            else drop = dominates_transformed(keys[j], keys[i], tol);
        }
        if (!drop) kept.push_back(i);
    }
    return kept;
}

FrontSet extract_front(const std::vector<ObjectiveVector>& points, const Relation& relation,
                       double tol) {
    FrontSet front{{}, relation};
    for (std::size_t i : front_indices(points, relation, tol)) front.points.push_back(points[i]);
    return front;
}

bool insert_into_front(FrontSet& front, const ObjectiveVector& point, double tol) {
    for (const auto& p : front.points) {
        if (p == point || dominates(p, point, front.relation, tol)) return false;
    }
    std::erase_if(front.points,
                  [&](const ObjectiveVector& p) { return dominates(point, p, front.relation, tol); });
    front.points.push_back(point);
    return true;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& points) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("crowding distance needs at least one point");
    for (const auto& p : points) require_comparable(points.front(), p);
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (n == 1) return {inf};

    const std::size_t d = points.front().size();
    std::vector<double> score(n, 0.0);
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < d; ++k) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[a][k] < points[b][k];
        });
        const double lo = points[order.front()][k];
        const double hi = points[order.back()][k];
        const double range = hi - lo;
        if (range <= 0.0) continue;
        score[order.front()] = inf;
        score[order.back()] = inf;
        for (std::size_t r = 1; r + 1 < n; ++r) {
            score[order[r]] += (points[order[r + 1]][k] - points[order[r - 1]][k]) / range;
        }
    }
    return score;
}

}  // namespace lcn
