#pragma once

#include <functional>

#include "fracsteer/time_grid.hpp"

namespace fracsteer {

// Discrete Riemann-Liouville operators built on product integration that is
// exact for piecewise-linear weight functions against the power kernel.
// These serve as brute-force cross-checks for the kernel-based solver and
// deliberately share no numerical machinery with it.

// I^{order} x on the grid of the input.  The output's weight exponent is
// alpha + order (integration softens the t -> 0 power by t^{order}); at that
// exponent its weight function stays smooth, so results can be fed back into
// these operators.  The node-0 entry is the continuous extension.
WeightedSamples rl_integral(const WeightedSamples& samples, double order);

// d/dt I^{1-order} x, the order-(0,1) derivative.  Differentiation acts on
// the exact product-integration interpolant via high-order finite
// differences.  The output's weight exponent is alpha - order (the
// derivative steepens the t -> 0 power by t^{-order}); its node-0 entry is a
// quadratic extrapolation of the first positive nodes.
WeightedSamples rl_derivative(const WeightedSamples& samples, double order);

// Implicit product-integration stepper for the scalar initial-value problem
//   D^{alpha} x = -lambda x + g(t),  I^{1-alpha} x |_{t=0} = init_weight
// on a uniform grid, phrased in the equivalent Volterra form and advanced in
// the weighted variable w(t) = t^{1-alpha} x(t).  alpha = 1 reduces to the
// classical implicit trapezoid-type scheme for x' = -lambda x + g.
WeightedSamples step_scalar_fode(double alpha, double lambda,
                                 const std::function<double(double)>& forcing,
                                 double init_weight, const TimeGrid& grid);

}  // namespace fracsteer
