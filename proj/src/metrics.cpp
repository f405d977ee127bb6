#include "lcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lcn {

namespace {

using PointSet = std::vector<ObjectiveVector>;

bool weakly_dominates(const ObjectiveVector& a, const ObjectiveVector& b, std::size_t d) {
    for (std::size_t j = 0; j < d; ++j) {
        if (a[j] < b[j]) return false;
    }
    return true;
}

// Drops points weakly dominated by another point (duplicates keep one copy).
PointSet nondominated(PointSet pts, std::size_t d) {
    std::vector<char> keep(pts.size(), 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j || !weakly_dominates(pts[j], pts[i], d)) continue;
            if (pts[j] != pts[i] || j < i) {
                keep[i] = 0;
                break;
            }
        }
    }
    PointSet out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (keep[i]) out.push_back(std::move(pts[i]));
    }
    return out;
}

double box_volume(const ObjectiveVector& p, std::size_t d) {
    double v = 1.0;
    for (std::size_t j = 0; j < d; ++j) v *= p[j];
    return v;
}

double hv2d(PointSet pts) {
    std::sort(pts.begin(), pts.end(),
              [](const ObjectiveVector& a, const ObjectiveVector& b) { return a[0] > b[0]; });
    double area = 0.0;
    double ymax = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ymax = std::max(ymax, pts[i][1]);
        const double next_x = i + 1 < pts.size() ? pts[i + 1][0] : 0.0;
        area += (pts[i][0] - next_x) * ymax;
    }
    return area;
}

// Points are relative to the origin and pairwise non-dominated.
double wfg(PointSet pts, std::size_t d) {
    if (pts.empty()) return 0.0;
    if (pts.size() == 1) return box_volume(pts.front(), d);
    if (d == 1) {
        double m = 0.0;
        for (const auto& p : pts) m = std::max(m, p[0]);
        return m;
    }
    if (d == 2) return hv2d(std::move(pts));

    std::sort(pts.begin(), pts.end(), [d](const ObjectiveVector& a, const ObjectiveVector& b) {
        return a[d - 1] > b[d - 1];
    });
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        PointSet limited;
        limited.reserve(pts.size() - i - 1);
        for (std::size_t k = i + 1; k < pts.size(); ++k) {
            ObjectiveVector q(d);
            for (std::size_t j = 0; j < d; ++j) q[j] = std::min(pts[k][j], pts[i][j]);
            limited.push_back(std::move(q));
        }
        total += box_volume(pts[i], d) - wfg(nondominated(std::move(limited), d), d);
    }
    return total;
}

}  // namespace

double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& ref) {
    const std::size_t d = ref.size();
    PointSet shifted;
    for (const auto& p : points) {
        require_comparable(p, ref);
        ObjectiveVector q(d);
        bool inside = true;
        for (std::size_t j = 0; j < d && inside; ++j) {
            q[j] = p[j] - ref[j];
            inside = q[j] > 0.0;
        }
        if (inside) shifted.push_back(std::move(q));
    }
    return wfg(nondominated(std::move(shifted), d), d);
}

std::vector<WeightVector> generate_equidistant_weights(std::size_t d, std::size_t n) {
    if (d < 2) throw std::invalid_argument("equidistant weights need d >= 2");
    if (n < d) throw std::invalid_argument("equidistant weights need n >= d");

    // lattice size C(H + d - 1, d - 1), computed incrementally in floating point
    auto lattice_size = [d](std::size_t h) {
        double c = 1.0;
        for (std::size_t i = 1; i < d; ++i) c = c * static_cast<double>(h + i) / static_cast<double>(i);
        return c;
    };
    std::size_t h = 1;
    while (lattice_size(h + 1) <= static_cast<double>(n) + 0.5) ++h;

    std::vector<WeightVector> out;
    std::vector<std::size_t> k(d, 0);
    // depth-first enumeration of compositions of h into d parts, lexicographic in k
    auto emit = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
        if (pos + 1 == d) {
            k[pos] = remaining;
            WeightVector w(d);
            for (std::size_t j = 0; j < d; ++j) w[j] = static_cast<double>(k[j]) / static_cast<double>(h);
            out.push_back(std::move(w));
            return;
        }
        for (std::size_t v = 0; v <= remaining; ++v) {
            k[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    emit(emit, 0, h);
    return out;
}

double expected_utility(const std::vector<ObjectiveVector>& points,
                        const std::vector<WeightVector>& weights) {
    if (points.empty()) throw std::invalid_argument("expected utility of an empty set");
    if (weights.empty()) throw std::invalid_argument("expected utility needs weights");
    double total = 0.0;
    for (const auto& w : weights) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : points) {
            require_comparable(p, w);
            best = std::max(best, std::inner_product(p.begin(), p.end(), w.begin(), 0.0));
        }
        total += best;
    }
    return total / static_cast<double>(weights.size());
}

double eum(const std::vector<ObjectiveVector>& points, std::size_t n_weights) {
    if (points.empty()) throw std::invalid_argument("EUM of an empty front");
    if (n_weights < 1) throw std::invalid_argument("EUM needs at least one weight vector");
    const std::size_t d = points.front().size();
    return expected_utility(points, generate_equidistant_weights(d, std::max(n_weights, d)));
}

double gini_index(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("gini index of an empty vector");
    double sum = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument("gini index needs finite entries");
        if (x < 0.0) throw std::invalid_argument("gini index needs nonnegative entries");
        sum += x;
    }
    if (sum == 0.0) return 0.0;
    double diff = 0.0;
    for (double a : v) {
        for (double b : v) diff += std::abs(a - b);
    }
    return diff / (2.0 * static_cast<double>(v.size()) * sum);
}

double total_efficiency(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

double sen_welfare(std::span<const double> v) {
    const double gi = gini_index(v);
    return total_efficiency(v) * (1.0 - gi);
}

double set_sen_welfare(const std::vector<ObjectiveVector>& points) {
    if (points.empty()) throw std::invalid_argument("Sen welfare of an empty front");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::max(best, sen_welfare(p));
    return best;
}

MetricsRecord compute_metrics(const std::vector<ObjectiveVector>& points,
                              const ObjectiveVector& ref, std::size_t n_weights,
                              std::int64_t step) {
    if (points.empty()) throw std::invalid_argument("metrics of an empty front");
    MetricsRecord rec;
    rec.step = step;
    rec.front_size = points.size();
    rec.hypervolume = hypervolume(points, ref);
    rec.eum = eum(points, n_weights);

    const bool nonnegative = std::all_of(points.begin(), points.end(), [](const ObjectiveVector& p) {
        return std::all_of(p.begin(), p.end(), [](double x) { return x >= 0.0; });
    });
    if (nonnegative) {
        std::size_t best = 0;
        double best_sw = -1.0;
        double sum_sw = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double sw = sen_welfare(points[i]);
            sum_sw += sw;
            if (sw > best_sw) {
                best_sw = sw;
                best = i;
            }
        }
        rec.sen_welfare = best_sw;
        rec.mean_sen_welfare = sum_sw / static_cast<double>(points.size());
        rec.gini = gini_index(points[best]);
        rec.total_efficiency = total_efficiency(points[best]);
    }
    return rec;
}

}  // namespace lcn
