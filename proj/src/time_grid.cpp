#include "fracsteer/time_grid.hpp"

#include <cmath>
#include <limits>

#include "fracsteer/errors.hpp"

namespace fracsteer {

TimeGrid TimeGrid::make_uniform(double horizon, int segments) {
    if (!(horizon > 0.0)) throw DomainError("TimeGrid: horizon must be positive");
    if (segments < 1) throw DomainError("TimeGrid: need at least one segment");
    TimeGrid g;
    g.nodes.resize(segments + 1);
    for (int i = 0; i <= segments; ++i) {
        g.nodes[i] = horizon * static_cast<double>(i) / segments;
    }
    g.nodes.front() = 0.0;
    g.nodes.back() = horizon;
    g.uniform = true;
    return g;
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 2) throw DomainError("TimeGrid: need at least two nodes");
    if (nodes.front() != 0.0)
        throw DomainError("TimeGrid: first node must be exactly 0");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i]) || !(nodes[i] > nodes[i - 1]))
            throw DomainError("TimeGrid: nodes must be finite, strictly increasing");
    }
    TimeGrid g;
    g.nodes = std::move(nodes);
    const double h0 = g.nodes[1] - g.nodes[0];
    g.uniform = true;
    for (std::size_t i = 1; i + 1 < g.nodes.size(); ++i) {
        const double h = g.nodes[i + 1] - g.nodes[i];
        if (std::abs(h - h0) > 1e-12 * g.nodes.back()) {
            g.uniform = false;
            break;
        }
    }
    return g;
}

double WeightedSamples::value_at(int i) const {
    if (i <= 0 || i >= static_cast<int>(weighted_values.size()))
        throw DomainError("WeightedSamples: pointwise value exists only at t > 0");
    const double t = grid.nodes[i];
    return std::pow(t, alpha - 1.0) * weighted_values[i];
}

double WeightedSamples::weighted_sup_norm() const {
    double m = 0.0;
    for (double w : weighted_values) m = std::max(m, std::abs(w));
    return m;
}

WeightedSamples WeightedSamples::from_function(
    const TimeGrid& g, double alpha, const std::function<double(double)>& x,
    double weight_at_zero) {
    WeightedSamples s;
    s.grid = g;
    s.alpha = alpha;
    s.weighted_values.resize(g.nodes.size());
    s.weighted_values[0] = weight_at_zero;
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        const double t = g.nodes[i];
        s.weighted_values[i] = std::pow(t, 1.0 - alpha) * x(t);
    }
    return s;
}

WeightedSamples WeightedSamples::from_weight_function(
    const TimeGrid& g, double alpha, const std::function<double(double)>& w) {
    WeightedSamples s;
    s.grid = g;
    s.alpha = alpha;
    s.weighted_values.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        s.weighted_values[i] = w(g.nodes[i]);
    }
    return s;
}

}  // namespace fracsteer
