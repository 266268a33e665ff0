#include "fracsteer/rl_ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracsteer/errors.hpp"

namespace fracsteer {

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 3e-16) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

// Regularized incomplete beta I_x(a,b).
double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                               std::lgamma(b) + a * std::log(x) +
                               b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// int_u^v (t-s)^{mu-1} s^{c-1} ds for 0 <= u < v <= t, mu, c > 0.  Beta-form
// with the difference taken on the smaller tail so adjacent regularized
// values never cancel.
double power_kernel_moment(double t, double u, double v, double mu, double c) {
    const double scale =
        std::pow(t, mu + c - 1.0) * std::exp(std::lgamma(c) + std::lgamma(mu) -
                                             std::lgamma(c + mu));
    const double xu = u / t, xv = v / t;
    double diff;
    if (xu + xv < 1.0) {
        diff = ibeta(c, mu, xv) - ibeta(c, mu, xu);
    } else {
        diff = ibeta(mu, c, 1.0 - xu) - ibeta(mu, c, 1.0 - xv);
    }
    return scale * diff;
}

// int_0^t (t-s)^{mu-1} shat(s) ds with shat(s) = s^{alpha-1} what(s), what the
// piecewise-linear interpolant of the stored weights.  Exact for the
// interpolant; handles arbitrary t inside the grid span.  No 1/Gamma(mu).
double pi_convolution_at(const WeightedSamples& in, double mu, double t) {
    const auto& tn = in.grid.nodes;
    const auto& w = in.weighted_values;
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < tn.size() && tn[j] < t; ++j) {
        const double u = tn[j];
        const double vfull = tn[j + 1];
        const double v = std::min(vfull, t);
        const double h = vfull - u;
        const double m0 = power_kernel_moment(t, u, v, mu, in.alpha);
        const double m1 = power_kernel_moment(t, u, v, mu, in.alpha + 1.0);
        acc += (w[j] * (vfull * m0 - m1) + w[j + 1] * (m1 - u * m0)) / h;
    }
    return acc;
}

void require_order(double order) {
    if (!(order > 0.0) || !(order < 1.0))
        throw DomainError("fractional order must lie in (0, 1)");
}

void require_samples(const WeightedSamples& s) {
    if (s.grid.nodes.size() < 2 ||
        s.grid.nodes.size() != s.weighted_values.size())
        throw DomainError("weighted samples need >= 2 nodes matching their grid");
    for (double w : s.weighted_values) {
        if (!std::isfinite(w))
            throw DomainError("weighted samples must be finite");
    }
}

}  // namespace

WeightedSamples rl_integral(const WeightedSamples& samples, double order) {
    require_order(order);
    require_samples(samples);
    const double inv_gamma_mu = std::exp(-std::lgamma(order));
    WeightedSamples out;
    out.grid = samples.grid;
    // I^{mu} maps t^{alpha-1} behavior to t^{alpha+mu-1}; storing the result
    // at the shifted exponent keeps its weight function smooth at 0 (and
    // exactly linear for linear input weights), so it can feed further ops.
    out.alpha = samples.alpha + order;
    out.weighted_values.assign(samples.weighted_values.size(), 0.0);
    // node 0: limit of t^{1-alpha-mu} I^{mu}[t^{alpha-1} w] = w(0) G(a)/G(a+mu)
    out.weighted_values[0] =
        samples.weighted_values[0] *
        std::exp(std::lgamma(samples.alpha) - std::lgamma(out.alpha));
    for (std::size_t i = 1; i < samples.grid.nodes.size(); ++i) {
        const double t = samples.grid.nodes[i];
        const double y = inv_gamma_mu * pi_convolution_at(samples, order, t);
        out.weighted_values[i] = std::pow(t, 1.0 - out.alpha) * y;
    }
    return out;
}

WeightedSamples rl_derivative(const WeightedSamples& samples, double order) {
    require_order(order);
    require_samples(samples);
    const double mu = 1.0 - order;
    const double inv_gamma_mu = std::exp(-std::lgamma(mu));
    const auto& tn = samples.grid.nodes;
    const double b = tn.back();

    double hmin = b;
    for (std::size_t i = 1; i < tn.size(); ++i)
        hmin = std::min(hmin, tn[i] - tn[i - 1]);
    const double d = 1e-2 * hmin;

    auto z = [&](double t) {
        return inv_gamma_mu * pi_convolution_at(samples, mu, t);
    };

    WeightedSamples out;
    out.grid = samples.grid;
    out.alpha = samples.alpha - order;
    out.weighted_values.assign(tn.size(), 0.0);
    for (std::size_t i = 1; i < tn.size(); ++i) {
        const double t = tn[i];
        double deriv;
        if (t + 2.0 * d <= b) {
            deriv = (z(t - 2.0 * d) - 8.0 * z(t - d) + 8.0 * z(t + d) -
                     z(t + 2.0 * d)) /
                    (12.0 * d);
        } else {
            // one-sided 4th-order stencil at the right endpoint
            deriv = (25.0 * z(t) - 48.0 * z(t - d) + 36.0 * z(t - 2.0 * d) -
                     16.0 * z(t - 3.0 * d) + 3.0 * z(t - 4.0 * d)) /
                    (12.0 * d);
        }
        out.weighted_values[i] = std::pow(t, 1.0 - out.alpha) * deriv;
    }
    // node 0: quadratic extrapolation of the weighted representation
    if (tn.size() >= 4) {
        const double t1 = tn[1], t2 = tn[2], t3 = tn[3];
        const double w1 = out.weighted_values[1], w2 = out.weighted_values[2],
                     w3 = out.weighted_values[3];
        out.weighted_values[0] =
            w1 * t2 * t3 / ((t1 - t2) * (t1 - t3)) +
            w2 * t1 * t3 / ((t2 - t1) * (t2 - t3)) +
            w3 * t1 * t2 / ((t3 - t1) * (t3 - t2));
    } else {
        out.weighted_values[0] = out.weighted_values[1];
    }
    return out;
}

WeightedSamples step_scalar_fode(double alpha, double lambda,
                                 const std::function<double(double)>& forcing,
                                 double init_weight, const TimeGrid& grid) {
    if (!(alpha > 0.5) || !(alpha <= 1.0))
        throw DomainError("step_scalar_fode: alpha must lie in (1/2, 1]");
    if (!grid.uniform)
        throw DomainError("step_scalar_fode: grid must be uniform");
    const auto& tn = grid.nodes;
    const std::size_t n = tn.size();
    const double ga = std::tgamma(alpha);

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = forcing(tn[i]);
        if (!std::isfinite(g[i]))
            throw EvaluationError("step_scalar_fode: forcing sample not finite");
    }

    WeightedSamples w;
    w.grid = grid;
    w.alpha = alpha;
    w.weighted_values.assign(n, 0.0);
    w.weighted_values[0] = init_weight / ga;

    // Volterra form advanced implicitly:
    //   t_i^{alpha-1} w_i = c t_i^{alpha-1}/Gamma(a)
    //     + (1/Gamma(a)) int_0^{t_i} (t_i-s)^{alpha-1}[ghat(s)
    //                                                  - lambda shat(s)] ds
    // with both integrands piecewise linear (ghat plainly, shat in weighted
    // form); the last cell's upper weight is the unknown w_i.
    for (std::size_t i = 1; i < n; ++i) {
        const double t = tn[i];
        const double ta = std::pow(t, alpha - 1.0);
        double forcing_int = 0.0;
        double state_partial = 0.0;
        double self_coeff = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            const double u = tn[j], v = tn[j + 1];
            const double h = v - u;
            // plain PL forcing: moments of s^0 and s^1
            const double f0 = power_kernel_moment(t, u, v, alpha, 1.0);
            const double f1 = power_kernel_moment(t, u, v, alpha, 2.0);
            forcing_int += (g[j] * (v * f0 - f1) + g[j + 1] * (f1 - u * f0)) / h;
            // weighted state: moments of s^{alpha-1} and s^{alpha}
            const double m0 = power_kernel_moment(t, u, v, alpha, alpha);
            const double m1 = power_kernel_moment(t, u, v, alpha, alpha + 1.0);
            const double cl = (v * m0 - m1) / h;  // multiplies w_j
            const double cu = (m1 - u * m0) / h;  // multiplies w_{j+1}
            if (j + 1 == i) {
                state_partial += w.weighted_values[j] * cl;
                self_coeff = cu;
            } else {
                state_partial += w.weighted_values[j] * cl +
                                 w.weighted_values[j + 1] * cu;
            }
        }
        const double denom = ta + lambda * self_coeff / ga;
        if (std::abs(denom) < 1e-14 * std::max(ta, 1.0))
            throw NumericError("step_scalar_fode: singular implicit step");
        w.weighted_values[i] = (init_weight * ta / ga + forcing_int / ga -
                                lambda * state_partial / ga) /
                               denom;
    }
    return w;
}

}  // namespace fracsteer
