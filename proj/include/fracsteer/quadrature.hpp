#pragma once

#include <array>
#include <functional>
#include <vector>

namespace fracsteer {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

// Adaptive Gauss-Kronrod 7/15 on [a,b].  Optional interior breakpoints seed
// the initial segment list (useful for integrands with known peaks).  Stops
// when the summed error estimate is below abs_tol + rel_tol*|value|.
QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              double a, double b,
                              double abs_tol, double rel_tol,
                              const std::vector<double>& breakpoints = {},
                              int max_segments = 4000);

// 8-point Gauss-Legendre rule on [-1,1], for composite rules with fixed cost.
inline constexpr std::array<double, 8> gauss8_x = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
    0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 8> gauss8_w = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

}  // namespace fracsteer
