#pragma once

#include <functional>
#include <vector>

namespace fracsteer {

// Node set 0 = t_0 < t_1 < ... < t_M = b.
struct TimeGrid {
    std::vector<double> nodes;
    bool uniform = false;

    static TimeGrid make_uniform(double horizon, int segments);
    // Validates ordering and endpoints; detects uniformity.
    static TimeGrid from_nodes(std::vector<double> nodes);

    double horizon() const { return nodes.back(); }
    int segments() const { return static_cast<int>(nodes.size()) - 1; }
};

// Trajectory samples stored in weighted form: w_i = t_i^{1-alpha} x(t_i).
// The entry at t = 0 is the continuous extension of t^{1-alpha} x(t), never a
// sample of x(0) (which diverges for alpha < 1).  alpha = 1 means plain
// samples.  The field is a representation exponent, so derived quantities may
// carry values outside (0,1].
struct WeightedSamples {
    TimeGrid grid;
    std::vector<double> weighted_values;
    double alpha = 1.0;

    // x(t_i) = t_i^{alpha-1} w_i for i >= 1; the i = 0 sample does not exist
    // as a pointwise value and asking for it is a domain error.
    double value_at(int i) const;

    double weighted_sup_norm() const;

    // Samples x at the positive nodes and installs the given continuous
    // extension at node 0.
    static WeightedSamples from_function(const TimeGrid& g, double alpha,
                                         const std::function<double(double)>& x,
                                         double weight_at_zero);
    // Samples the weight function w itself at every node (including 0).
    static WeightedSamples from_weight_function(
        const TimeGrid& g, double alpha,
        const std::function<double(double)>& w);
};

}  // namespace fracsteer
