#pragma once

namespace fracsteer {

// Parameter pair for the two-parameter Mittag-Leffler function
//   E_{alpha,beta}(z) = sum_{n>=0} z^n / Gamma(alpha n + beta).
// Restricted to alpha in (0,1], beta > 0 (the range this library uses).
struct MLParams {
    double alpha;
    double beta;
    MLParams(double alpha_, double beta_);
};

// Evaluates E_{alpha,beta}(z) for real z.  Absolute accuracy ~1e-12 on
// |z| <= 50 (and in practice well beyond).  Series for small arguments,
// a real-line integral representation for moderately large negative z,
// an algebraic asymptotic expansion for z <= -30.
double mittag_leffler(const MLParams& p, double z);

// One-sided stable density evaluated through its defining series,
//   omega_alpha(theta) =
//     (1/pi) sum_{n>=1} (-1)^{n-1} theta^{-n alpha - 1}
//                       Gamma(n alpha + 1)/n! sin(pi n alpha),
// summed as a partial sum of at most series_terms terms.
struct WrightDensity {
    double alpha;      // in (0,1)
    int series_terms;  // partial-sum budget
    explicit WrightDensity(double alpha_, int series_terms_ = 200);
};

struct WrightEval {
    double value;
    double truncation_error;  // magnitude of the last retained term
};

// Partial sum of the series above.  Throws RangeError when the partial sums
// blow up (theta too small for the series to be usable in doubles); the
// xi_alpha route (wright_xi) covers that regime.
WrightEval wright_omega(const WrightDensity& w, double theta);

// Production evaluation of the same density: series where it is
// well-conditioned, otherwise an angular integral representation.
double stable_density(double alpha, double x);

// Probability density xi_alpha(theta) =
//   (1/alpha) theta^{-1-1/alpha} omega_alpha(theta^{-1/alpha}),
// nonnegative with unit mass on (0,inf).
double wright_xi(double alpha, double theta);

// Scalar diagonal of the fractional solution operator on an eigenmode with
// eigenvalue -lambda:  E_{alpha,alpha}(-lambda t^alpha).  At t = 0 returns
// the limit 1/Gamma(alpha).
double solution_operator_scalar(double alpha, double lambda, double t);

// Validation route for the same quantity via subordination:
//   alpha * int_0^inf theta xi_alpha(theta) e^{-z theta} dtheta,
// which equals E_{alpha,alpha}(-z).  Slow; used for cross-checks only.
double subordination_integral(double alpha, double z, double tol = 1e-9);

}  // namespace fracsteer
