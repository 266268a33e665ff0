#pragma once

#include <vector>

#include "fracsteer/mild_solver.hpp"

namespace fracsteer {

// Terminal reachability Gram matrix b_n b_m int_0^b g_n(b,s) g_m(b,s) ds
// with its spectrum.  Symmetry is exact (upper triangle mirrored) and the
// spectrum is ascending; semidefiniteness holds by the positive quadrature
// construction, so a negative eigenvalue beyond rounding is a defect.
struct GramianData {
    std::vector<double> matrix;          // N x N row-major
    std::vector<double> eigen_spectrum;  // ascending
    int quadrature_nodes = 0;
};

GramianData assemble_gramian(const KernelEvaluator& K);

// y = (aI + Gram)^{-1} h via LDLT; a > 0 keeps the system positive definite
// for any semidefinite Gram.  The damped image a*y is a scalar multiple of
// the return value.
std::vector<double> regularized_resolvent_apply(const GramianData& G, double a,
                                                const std::vector<double>& h);

struct SynthesisProblem {
    std::vector<double> target_x1;
    double reg_a = 1e-3;
    int max_iters = 50;
    double tol = 1e-7;
    double relaxation = 1.0;  // in (0,1]; 1 is plain fixed-point iteration
};

// Outcome of the steering fixed-point iteration.  The control samples are a
// plain-sample report of u(s) = sum_n b_n g_n(b,s) y_n; the singular flare
// at s = b is carried exactly by the steering coefficients, not the final
// sample.  residual is the fixed-point defect: one extra application of the
// map (selection refreshed from the returned trajectory) compared against
// the returned trajectory in the weighted sup norm.  A run that stops on
// the selection-fixpoint certificate has residual exactly zero.
struct SynthesisResult {
    Trajectory trajectory;
    WeightedSamples control_samples;
    Trajectory selection;          // forcing samples f, plain
    std::vector<double> steering;  // y at the final map application
    double terminal_error = 0.0;   // ||x(b) - x1||
    double control_energy = 0.0;   // int_0^b u^2 = y' Gram y
    double terminal_identity_gap = 0.0;  // ||x(b) - (x1 - a R(a,Gram) P)||
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

// Picard iteration of the steering map from the zero state: selection along
// the iterate, defect P = x1 - Xf(b), steering y = R(a,Gram) P, trajectory
// from the steered evaluation; stops when the refreshed selection repeats
// exactly (certified fixed point, plain iteration only) or the weighted
// increment drops below tol.  Non-convergence is reported as data; NaN in
// the iteration is a numeric error.
SynthesisResult synthesize_control(const KernelEvaluator& K,
                                   const SynthesisProblem& prob);

struct SweepRow {
    double a = 0.0;
    double terminal_error = 0.0;
    double control_energy = 0.0;
    int iterations = 0;
    bool converged = false;
};

// One synthesis per a, rows in input order; non-convergent rows are flagged
// and the sweep continues.  a_grid must be strictly decreasing and positive.
std::vector<SweepRow> regularization_sweep(const KernelEvaluator& K,
                                           const std::vector<double>& x1,
                                           const std::vector<double>& a_grid);

}  // namespace fracsteer
