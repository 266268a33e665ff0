#include <cmath>
#include <functional>

#include "doctest.h"
#include "fracsteer/errors.hpp"
#include "fracsteer/rl_ops.hpp"
#include "fracsteer/specialfun.hpp"
#include "fracsteer/time_grid.hpp"
#include "reference_values.hpp"

using namespace fracsteer;

namespace {
constexpr double kPi = 3.14159265358979323846;

WeightedSamples constant_weight(const TimeGrid& g, double alpha, double w0) {
    return WeightedSamples::from_weight_function(g, alpha,
                                                 [&](double) { return w0; });
}
}  // namespace

TEST_CASE("time grid construction and validation") {
    const TimeGrid g = TimeGrid::make_uniform(2.0, 8);
    CHECK(g.nodes.size() == 9);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 2.0);
    CHECK(g.uniform);
    CHECK(g.segments() == 8);
    CHECK(TimeGrid::from_nodes({0.0, 0.3, 0.5, 1.0}).uniform == false);
    CHECK(TimeGrid::from_nodes({0.0, 0.5, 1.0}).uniform == true);
    CHECK_THROWS_AS(TimeGrid::make_uniform(-1.0, 4), DomainError);
    CHECK_THROWS_AS(TimeGrid::make_uniform(1.0, 0), DomainError);
    CHECK_THROWS_AS(TimeGrid::from_nodes({0.1, 0.5, 1.0}), DomainError);
    CHECK_THROWS_AS(TimeGrid::from_nodes({0.0, 0.5, 0.5, 1.0}), DomainError);
    CHECK_THROWS_AS(TimeGrid::from_nodes({0.0}), DomainError);
}

TEST_CASE("weighted samples store the singular factor implicitly") {
    const TimeGrid g = TimeGrid::make_uniform(1.0, 4);
    const double alpha = 0.75;
    const auto s = WeightedSamples::from_function(
        g, alpha, [&](double t) { return std::pow(t, alpha - 1.0); }, 1.0);
    for (int i = 0; i <= 4; ++i) CHECK(s.weighted_values[i] == doctest::Approx(1.0));
    CHECK(s.value_at(2) ==
          doctest::Approx(std::pow(0.5, alpha - 1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(s.value_at(0), DomainError);
    CHECK(s.weighted_sup_norm() == doctest::Approx(1.0));
}

TEST_CASE("rl_integral annihilates the singularity of t^{alpha-1}") {
    // I^{1-alpha} t^{alpha-1} = Gamma(alpha), constant
    const double alpha = 0.75;
    const TimeGrid g = TimeGrid::make_uniform(1.0, 64);
    const auto x = constant_weight(g, alpha, 1.0);
    const auto y = rl_integral(x, 1.0 - alpha);
    for (int i = 1; i <= 64; ++i) {
        CHECK(y.value_at(i) ==
              doctest::Approx(refvals::gamma_3_4).epsilon(1e-12));
    }
}

TEST_CASE("rl_integral power rules on plain samples") {
    const TimeGrid g = TimeGrid::make_uniform(1.0, 64);
    // I^{1/2} 1 = 2 sqrt(t/pi)
    const auto one = constant_weight(g, 1.0, 1.0);
    const auto h = rl_integral(one, 0.5);
    for (int i : {1, 8, 32, 64}) {
        const double t = g.nodes[i];
        CHECK(h.value_at(i) ==
              doctest::Approx(2.0 * std::sqrt(t / kPi)).epsilon(1e-12));
    }
    // I^{3/4} t = Gamma(2)/Gamma(2.75) t^{1.75}
    const auto lin = WeightedSamples::from_weight_function(
        g, 1.0, [](double t) { return t; });
    const auto y = rl_integral(lin, 0.75);
    CHECK(y.value_at(64) ==
          doctest::Approx(refvals::gamma2_over_gamma2_75).epsilon(1e-12));
    CHECK(y.value_at(32) == doctest::Approx(refvals::gamma2_over_gamma2_75 *
                                            std::pow(0.5, 1.75))
                                .epsilon(1e-12));
    CHECK_THROWS_AS(rl_integral(one, 0.0), DomainError);
    CHECK_THROWS_AS(rl_integral(one, 1.0), DomainError);
}

TEST_CASE("rl_integral composes like a semigroup on smooth functions") {
    const TimeGrid g = TimeGrid::make_uniform(1.0, 1500);
    const auto x = WeightedSamples::from_weight_function(
        g, 1.0, [](double t) { return std::cos(t); });
    const auto two_step = rl_integral(rl_integral(x, 0.4), 0.3);
    const auto one_step = rl_integral(x, 0.7);
    double worst = 0.0;
    for (int i = 1; i <= g.segments(); ++i) {
        worst = std::max(worst, std::abs(two_step.value_at(i) - one_step.value_at(i)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("rl_derivative inverts rl_integral") {
    const double alpha = 0.75, mu = 0.4;
    const TimeGrid g = TimeGrid::make_uniform(1.0, 128);
    // weight 1 + t/2 is piecewise linear, so product integration is exact and
    // the only error is the differentiation stencil
    const auto x = WeightedSamples::from_weight_function(
        g, alpha, [](double t) { return 1.0 + 0.5 * t; });
    const auto back = rl_derivative(rl_integral(x, mu), mu);
    CHECK(back.alpha == doctest::Approx(alpha));
    for (int i : {1, 2, 10, 64, 127, 128}) {
        CHECK(back.weighted_values[i] ==
              doctest::Approx(x.weighted_values[i]).epsilon(1e-7));
    }
}

TEST_CASE("rl_derivative left-inverse error vanishes under refinement") {
    const double mu = 0.55;
    double prev_err = -1.0;
    for (int m : {64, 128, 256}) {
        const TimeGrid g = TimeGrid::make_uniform(1.0, m);
        const auto x = WeightedSamples::from_weight_function(
            g, 1.0, [](double t) { return std::cos(1.3 * t); });
        const auto back = rl_derivative(rl_integral(x, mu), mu);
        double err = 0.0;
        for (int i = 1; i <= m; ++i) {
            err = std::max(err,
                           std::abs(back.weighted_values[i] - x.weighted_values[i]));
        }
        if (prev_err > 0.0) CHECK(err < prev_err / 1.5);
        prev_err = err;
    }
    CHECK(prev_err < 2e-3);
}

TEST_CASE("rl_derivative annihilates t^{alpha-1}") {
    const double alpha = 0.75;
    const TimeGrid g = TimeGrid::make_uniform(1.0, 100);
    const auto x = constant_weight(g, alpha, 1.0);
    const auto d = rl_derivative(x, alpha);
    for (int i = 1; i <= 100; ++i) {
        CHECK(std::abs(d.weighted_values[i]) < 1e-9);
    }
}

TEST_CASE("rl_derivative power rules") {
    const TimeGrid g = TimeGrid::make_uniform(1.0, 100);
    // D^{1/2} 1 = t^{-1/2}/Gamma(1/2)
    const auto one = constant_weight(g, 1.0, 1.0);
    const auto d = rl_derivative(one, 0.5);
    for (int i : {2, 25, 50, 99}) {
        const double t = g.nodes[i];
        CHECK(d.value_at(i) ==
              doctest::Approx(std::pow(t, -0.5) / std::sqrt(kPi)).epsilon(1e-8));
    }
    // D^{3/4} t^{1.2} = Gamma(2.2)/Gamma(1.45) t^{0.45}; representing the
    // input with exponent 1.2 makes its weight function exactly linear
    const auto p = WeightedSamples::from_weight_function(
        g, 1.2, [](double t) { return t; });
    const auto dp = rl_derivative(p, 0.75);
    CHECK(dp.value_at(100) ==
          doctest::Approx(refvals::gamma2_2_over_gamma1_45).epsilon(1e-8));
    CHECK(dp.value_at(50) == doctest::Approx(refvals::gamma2_2_over_gamma1_45 *
                                             std::pow(0.5, 0.45))
                                 .epsilon(1e-8));
}

TEST_CASE("step_scalar_fode free evolution is exact") {
    const double alpha = 0.8, c = 2.5;
    const TimeGrid g = TimeGrid::make_uniform(1.0, 50);
    const auto w = step_scalar_fode(alpha, 0.0, [](double) { return 0.0; }, c, g);
    for (int i = 0; i <= 50; ++i) {
        CHECK(w.weighted_values[i] ==
              doctest::Approx(c / std::tgamma(alpha)).epsilon(1e-13));
    }
}

TEST_CASE("step_scalar_fode matches the Mittag-Leffler closed form") {
    // D^a x = -x, I^{1-a}x|_0 = Gamma(a): x(t) = Gamma(a) t^{a-1}E_{a,a}(-t^a)
    const double alpha = 0.75;
    const TimeGrid g = TimeGrid::make_uniform(1.0, 2000);
    const auto w = step_scalar_fode(alpha, 1.0, [](double) { return 0.0; },
                                    refvals::gamma_3_4, g);
    double err = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double want =
            refvals::gamma_3_4 *
            mittag_leffler(MLParams(alpha, alpha),
                           -std::pow(g.nodes[i], alpha));
        err = std::max(err, std::abs(w.weighted_values[i] - want));
    }
    CHECK(err < 1e-3 * refvals::step_34_l1_t1);
    CHECK(w.weighted_values[2000] ==
          doctest::Approx(refvals::step_34_l1_t1).epsilon(1e-3));
}

TEST_CASE("step_scalar_fode converges at first order or better") {
    const double alpha = 0.75;
    double prev = -1.0;
    for (int m : {250, 500, 1000}) {
        const TimeGrid g = TimeGrid::make_uniform(1.0, m);
        const auto w = step_scalar_fode(alpha, 1.0, [](double) { return 0.0; },
                                        refvals::gamma_3_4, g);
        double err = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double want =
                refvals::gamma_3_4 *
                mittag_leffler(MLParams(alpha, alpha),
                               -std::pow(g.nodes[i], alpha));
            err = std::max(err, std::abs(w.weighted_values[i] - want));
        }
        if (prev > 0.0) CHECK(prev / err >= 1.8);
        prev = err;
    }
}

TEST_CASE("step_scalar_fode reduces to the classical ODE at alpha = 1") {
    const double lambda = 2.0, x0 = 0.3;
    const TimeGrid g = TimeGrid::make_uniform(1.0, 1000);
    const auto w =
        step_scalar_fode(1.0, lambda, [](double) { return 1.0; }, x0, g);
    for (int i : {1, 250, 500, 1000}) {
        const double t = g.nodes[i];
        const double want =
            x0 * std::exp(-lambda * t) + (1.0 - std::exp(-lambda * t)) / lambda;
        CHECK(w.weighted_values[i] == doctest::Approx(want).epsilon(1e-5));
    }
}

TEST_CASE("step_scalar_fode rejects invalid inputs") {
    const TimeGrid g = TimeGrid::make_uniform(1.0, 10);
    auto zero = [](double) { return 0.0; };
    CHECK_THROWS_AS(step_scalar_fode(0.4, 1.0, zero, 1.0, g), DomainError);
    CHECK_THROWS_AS(step_scalar_fode(0.5, 1.0, zero, 1.0, g), DomainError);
    CHECK_THROWS_AS(step_scalar_fode(1.01, 1.0, zero, 1.0, g), DomainError);
    const TimeGrid bad = TimeGrid::from_nodes({0.0, 0.3, 0.5, 1.0});
    CHECK_THROWS_AS(step_scalar_fode(0.75, 1.0, zero, 1.0, bad), DomainError);
    auto nan_forcing = [](double t) {
        return t > 0.5 ? std::nan("") : 0.0;
    };
    CHECK_THROWS_AS(step_scalar_fode(0.75, 1.0, nan_forcing, 1.0, g),
                    EvaluationError);
}
