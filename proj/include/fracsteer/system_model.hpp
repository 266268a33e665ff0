#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fracsteer {

// Diagonal generator: A acts as -lambda_n on mode n, eigenvalues positive and
// strictly increasing (self-adjoint dissipative, simple spectrum).
struct SpectralOperator {
    std::vector<double> eigenvalues;
    std::vector<std::string> mode_labels;  // optional, may be empty
};

// Rank-one input operator (Bu)(y) = b(y) u with mode coefficients b_n.
struct ControlOperator {
    std::vector<double> b_coeffs;
    double operator_norm = 0.0;  // ||B||, the Euclidean norm of b_coeffs

    static ControlOperator rank_one(std::vector<double> b);
};

// Weighted initial constraint I^{1-alpha} x |_{t=0} = sum_k c_k x(t_k).
struct NonlocalCondition {
    std::vector<double> coefficients;  // c_k, all nonzero
    std::vector<double> times;         // 0 < t_1 < ... < t_m < b
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Nonsmooth superpotential F with its generalized directional derivative
// F0(t,x;v) and per-mode bounds of the generalized gradient.  The gradient
// set is modeled as a product of intervals, which supports exact
// minimal-norm selections and covers the superpotentials used here.
struct NonsmoothTerm {
    std::function<double(double, const std::vector<double>&)> potential;
    std::function<double(double, const std::vector<double>&,
                         const std::vector<double>&)>
        directional_derivative;
    std::function<std::vector<Interval>(double, const std::vector<double>&)>
        subgradient_extremes;
    std::function<double(double)> growth_P;   // P(t) in the growth bound
    double growth_gamma = 0.0;                // P lives in L^{1/gamma}
    std::function<double(double)> growth_psi; // nondecreasing psi(r)
    std::optional<double> uniform_bound_L;    // set when ||grad|| <= L uniformly
};

struct ProblemConfig {
    double alpha = 0.75;
    double horizon_b = 1.0;
    int truncation_N = 1;
    SpectralOperator op;
    ControlOperator control;
    NonlocalCondition nonlocal;
    NonsmoothTerm nonsmooth;
    double semigroup_bound_M = 1.0;  // M = sup ||T(t)||; 1 for these presets
    double holder_gamma = 0.0;       // gamma in [0, alpha)
    // Infinite-dimensional hypotheses with no finite certificate; declared,
    // not checked.
    bool declares_compact_solution_operator = true;
    bool declares_measurable_selection = true;

    // Throws ValidationError naming the offending field and the violated
    // condition.  The strict alpha < 1 bound is the main-path rule; integer
    // order is reached only by reduction tests that bypass validation.
    void validate() const;
};

struct SmallnessReport {
    double lhs = 0.0;  // sum_k |c_k| t_k^{alpha-1}
    double rhs = 0.0;  // Gamma(alpha)/M
    bool holds = false;
};
SmallnessReport check_assumption_smallness(const ProblemConfig& cfg);

struct GrowthReport {
    double rho_estimate = 0.0;
    bool holds = false;
};
// Estimates liminf psi(r)/r * ||P||_{L^{1/gamma}} over the tail of r_grid.
// r_grid must be increasing and span at least three decades.
GrowthReport check_growth_ratio(const ProblemConfig& cfg,
                                const std::vector<double>& r_grid);

struct ActuationReport {
    std::vector<int> zero_modes;  // 1-based mode indices with b_n ~ 0
};
ActuationReport check_actuation_nondegeneracy(const ProblemConfig& cfg);

enum class SelectionRule { minimal_norm, midpoint, lower };

// Picks one element of the (interval-product) generalized gradient at (t,x).
// Deterministic; empty interval bounds are a term-definition error.
std::vector<double> subgradient_selection(const NonsmoothTerm& term, double t,
                                          const std::vector<double>& x,
                                          SelectionRule rule);

// F identically zero (linear problems).
NonsmoothTerm zero_term();

// F(t,x) = (L/sqrt(N)) sum_i |x_i|: bounded gradient, ||grad|| <= L.
NonsmoothTerm scaled_abs_term(double L, int N);

}  // namespace fracsteer
