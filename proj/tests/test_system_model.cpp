#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "fracsteer/errors.hpp"
#include "fracsteer/system_model.hpp"
#include "reference_values.hpp"

using namespace fracsteer;

namespace {

ProblemConfig base_config() {
    ProblemConfig cfg;
    cfg.alpha = 0.75;
    cfg.horizon_b = 1.0;
    cfg.truncation_N = 3;
    cfg.op.eigenvalues = {1.0, 4.0, 9.0};
    cfg.control = ControlOperator::rank_one({1.0, 0.5, 0.25});
    cfg.nonlocal.coefficients = {0.1};
    cfg.nonlocal.times = {0.5};
    cfg.nonsmooth = zero_term();
    return cfg;
}

bool message_contains(const std::function<void()>& op, const char* needle) {
    try {
        op();
    } catch (const ValidationError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("config validation names the violated condition") {
    CHECK_NOTHROW(base_config().validate());

    auto bad_alpha = base_config();
    bad_alpha.alpha = 0.4;
    CHECK(message_contains([&] { bad_alpha.validate(); }, "1/2 < alpha"));
    bad_alpha.alpha = 1.0;  // boundary excluded on the main path
    CHECK_THROWS_AS(bad_alpha.validate(), ValidationError);

    auto bad_c = base_config();
    bad_c.nonlocal.coefficients = {0.0};
    CHECK(message_contains([&] { bad_c.validate(); }, "c_k != 0"));

    auto bad_time = base_config();
    bad_time.nonlocal.times = {1.5};
    CHECK(message_contains([&] { bad_time.validate(); }, "(0, b)"));

    auto bad_gamma = base_config();
    bad_gamma.holder_gamma = 0.8;
    CHECK(message_contains([&] { bad_gamma.validate(); }, "gamma < alpha"));

    auto bad_eigs = base_config();
    bad_eigs.op.eigenvalues = {1.0, 9.0, 4.0};
    CHECK(message_contains([&] { bad_eigs.validate(); }, "strictly increasing"));

    auto bad_norm = base_config();
    bad_norm.control.operator_norm += 0.1;
    CHECK(message_contains([&] { bad_norm.validate(); }, "Euclidean norm"));

    auto bad_flag = base_config();
    bad_flag.declares_compact_solution_operator = false;
    CHECK_THROWS_AS(bad_flag.validate(), ValidationError);
}

TEST_CASE("smallness condition report matches hand arithmetic") {
    auto cfg = base_config();  // c = 0.1 at t = 0.5, alpha = 0.75, M = 1
    const auto r = check_assumption_smallness(cfg);
    CHECK(r.lhs == doctest::Approx(0.1 * std::pow(0.5, -0.25)).epsilon(1e-14));
    CHECK(r.lhs == doctest::Approx(0.11892071150027210).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(refvals::gamma_3_4).epsilon(1e-14));
    CHECK(r.holds);

    cfg.nonlocal.coefficients = {3.0};
    cfg.nonlocal.times = {0.25};
    const auto r2 = check_assumption_smallness(cfg);
    CHECK(r2.lhs == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-13));
    CHECK_FALSE(r2.holds);

    // tiny coefficient: lhs -> 0 keeps the condition comfortably true
    cfg.nonlocal.coefficients = {1e-6};
    cfg.nonlocal.times = {0.5};
    CHECK(check_assumption_smallness(cfg).holds);
}

TEST_CASE("smallness condition is monotone in the coefficient scale") {
    auto cfg = base_config();
    cfg.nonlocal.coefficients = {0.12, -0.08};
    cfg.nonlocal.times = {0.25, 0.5};
    bool seen_false = false;
    for (double scale : {0.1, 0.5, 1.0, 3.0, 8.0, 20.0, 50.0, 200.0}) {
        auto scaled = cfg;
        for (double& c : scaled.nonlocal.coefficients) c *= scale;
        const bool holds = check_assumption_smallness(scaled).holds;
        if (seen_false) CHECK_FALSE(holds);  // can never flip back to true
        if (!holds) seen_false = true;
    }
    CHECK(seen_false);  // the largest scale must violate the bound
}

TEST_CASE("growth ratio check distinguishes sublinear from superlinear") {
    std::vector<double> r_grid;
    for (double r = 1e-1; r <= 2e4; r *= 1.6) r_grid.push_back(r);

    auto cfg = base_config();
    cfg.nonsmooth.growth_psi = [](double r) { return 1.0 + std::log1p(r); };
    cfg.nonsmooth.growth_P = [](double) { return 0.5; };
    const auto sub = check_growth_ratio(cfg, r_grid);
    CHECK(sub.holds);
    CHECK(sub.rho_estimate < 0.01);

    cfg.nonsmooth.growth_psi = [](double r) { return 2.0 * r; };
    cfg.nonsmooth.growth_P = [](double) { return 1.0; };
    const auto lin = check_growth_ratio(cfg, r_grid);
    CHECK_FALSE(lin.holds);
    CHECK(lin.rho_estimate == doctest::Approx(2.0).epsilon(1e-12));

    // bounded-gradient term: psi == L constant, ratio -> 0
    cfg.nonsmooth = scaled_abs_term(0.1, cfg.truncation_N);
    const auto bounded = check_growth_ratio(cfg, r_grid);
    CHECK(bounded.holds);
    CHECK(bounded.rho_estimate < 1e-4);
}

TEST_CASE("growth ratio check validates its inputs") {
    auto cfg = base_config();
    cfg.nonsmooth.growth_psi = [](double r) { return (r < 10.0) ? r : 5.0; };
    std::vector<double> r_grid;
    for (double r = 1e-1; r <= 2e4; r *= 1.6) r_grid.push_back(r);
    CHECK_THROWS_AS(check_growth_ratio(cfg, r_grid), ValidationError);

    auto cfg2 = base_config();
    CHECK_THROWS_AS(check_growth_ratio(cfg2, {1.0, 2.0, 4.0, 8.0}),
                    DomainError);  // spans less than three decades
    CHECK_THROWS_AS(check_growth_ratio(cfg2, {1.0, 0.5, 2000.0, 8000.0}),
                    DomainError);  // not increasing
}

TEST_CASE("growth ratio uses the integral norm when gamma > 0") {
    auto cfg = base_config();
    cfg.holder_gamma = 0.5;  // P in L^2(0,1)
    cfg.nonsmooth.growth_psi = [](double) { return 1.0; };
    cfg.nonsmooth.growth_P = [](double t) { return t; };  // ||t||_{L^2} = 1/sqrt(3)
    std::vector<double> r_grid;
    for (double r = 1e-1; r <= 2e4; r *= 1.6) r_grid.push_back(r);
    const auto rep = check_growth_ratio(cfg, r_grid);
    // rho = min psi(r)/r * ||P||; tail minimum is at the largest r
    const double want = (1.0 / r_grid.back()) / std::sqrt(3.0);
    CHECK(rep.rho_estimate == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("actuation nondegeneracy flags vanishing modes") {
    auto cfg = base_config();
    cfg.control = ControlOperator::rank_one(
        {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)});
    CHECK(check_actuation_nondegeneracy(cfg).zero_modes.empty());

    cfg.control = ControlOperator::rank_one({1.0, 0.0, 0.25});
    const auto rep = check_actuation_nondegeneracy(cfg);
    REQUIRE(rep.zero_modes.size() == 1);
    CHECK(rep.zero_modes[0] == 2);

    // coefficients of b(y) = y against sqrt(2/pi) sin(ny): all +-sqrt(2pi)/n
    std::vector<double> b(8);
    for (int n = 1; n <= 8; ++n) {
        b[n - 1] = ((n % 2 == 1) ? 1.0 : -1.0) *
                   std::sqrt(2.0 * 3.14159265358979323846) / n;
    }
    cfg.truncation_N = 8;
    cfg.op.eigenvalues = {1, 4, 9, 16, 25, 36, 49, 64};
    cfg.control = ControlOperator::rank_one(b);
    CHECK(check_actuation_nondegeneracy(cfg).zero_modes.empty());
}

TEST_CASE("subgradient selection rules on the weighted l1 term") {
    const auto term = scaled_abs_term(2.0, 4);  // per-mode bound c = 1
    const std::vector<double> x = {0.5, 0.0, -0.3, 0.0};

    const auto mn = subgradient_selection(term, 0.0, x, SelectionRule::minimal_norm);
    CHECK(mn[0] == doctest::Approx(1.0));
    CHECK(mn[1] == doctest::Approx(0.0));
    CHECK(mn[2] == doctest::Approx(-1.0));
    CHECK(mn[3] == doctest::Approx(0.0));

    const auto mid = subgradient_selection(term, 0.0, x, SelectionRule::midpoint);
    CHECK(mid[1] == doctest::Approx(0.0));
    const auto low = subgradient_selection(term, 0.0, x, SelectionRule::lower);
    CHECK(low[1] == doctest::Approx(-1.0));
    CHECK(low[0] == doctest::Approx(1.0));  // singleton away from the kink

    NonsmoothTerm broken = term;
    broken.subgradient_extremes = [](double, const std::vector<double>& xx) {
        return std::vector<Interval>(xx.size(), Interval{1.0, -1.0});
    };
    CHECK_THROWS_AS(
        subgradient_selection(broken, 0.0, x, SelectionRule::minimal_norm),
        ValidationError);
}

TEST_CASE("selections satisfy the directional-derivative inequality") {
    const auto term = scaled_abs_term(0.7, 5);
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double t = 0.5 * (1.0 + std::abs(unif(rng)));
        std::vector<double> x(5), v(5);
        for (auto& xi : x) xi = (trial % 7 == 0) ? 0.0 : unif(rng);
        for (auto& vi : v) vi = unif(rng);
        for (auto rule : {SelectionRule::minimal_norm, SelectionRule::midpoint,
                          SelectionRule::lower}) {
            const auto f = subgradient_selection(term, t, x, rule);
            double fv = 0.0;
            for (int i = 0; i < 5; ++i) fv += f[i] * v[i];
            CHECK(fv <= term.directional_derivative(t, x, v) + 1e-12);
        }
    }
}

TEST_CASE("directional derivative is positively homogeneous and subadditive") {
    const auto term = scaled_abs_term(1.3, 4);
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(4), v(4), w(4), vw(4);
        for (int i = 0; i < 4; ++i) {
            x[i] = (trial % 5 == 0) ? 0.0 : unif(rng);
            v[i] = unif(rng);
            w[i] = unif(rng);
            vw[i] = v[i] + w[i];
        }
        const double kappa = 0.1 + std::abs(unif(rng));
        std::vector<double> kv(4);
        for (int i = 0; i < 4; ++i) kv[i] = kappa * v[i];
        const double f_v = term.directional_derivative(0.3, x, v);
        const double f_kv = term.directional_derivative(0.3, x, kv);
        CHECK(f_kv == doctest::Approx(kappa * f_v).epsilon(1e-12));
        const double f_w = term.directional_derivative(0.3, x, w);
        const double f_vw = term.directional_derivative(0.3, x, vw);
        CHECK(f_vw <= f_v + f_w + 1e-12);
    }
}

TEST_CASE("uniformly bounded terms keep selections inside the ball") {
    const double L = 0.1;
    const auto term = scaled_abs_term(L, 8);
    REQUIRE(term.uniform_bound_L.has_value());
    CHECK(*term.uniform_bound_L == doctest::Approx(L));
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> x(8);
        for (auto& xi : x) xi = unif(rng);
        for (auto rule : {SelectionRule::minimal_norm, SelectionRule::midpoint,
                          SelectionRule::lower}) {
            const auto f = subgradient_selection(term, 0.1, x, rule);
            double norm = 0.0;
            for (double fi : f) norm += fi * fi;
            CHECK(std::sqrt(norm) <= L + 1e-12);
        }
    }
}
