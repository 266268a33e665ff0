#include "fracsteer/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fracsteer/errors.hpp"
#include "fracsteer/quadrature.hpp"

namespace fracsteer {

namespace {

[[noreturn]] void fail(const char* fmt, double a = 0.0, double b = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    throw ValidationError(buf);
}

}  // namespace

ControlOperator ControlOperator::rank_one(std::vector<double> b) {
    ControlOperator c;
    double ss = 0.0;
    for (double v : b) ss += v * v;
    c.b_coeffs = std::move(b);
    c.operator_norm = std::sqrt(ss);
    return c;
}

void ProblemConfig::validate() const {
    if (!(alpha > 0.5) || !(alpha < 1.0))
        fail("alpha = %g rejected: main path requires 1/2 < alpha <= 1 with the "
             "boundary alpha = 1 reserved for reduction tests (effective bound "
             "1/2 < alpha < 1)",
             alpha);
    if (!(horizon_b > 0.0)) fail("horizon_b = %g must be positive", horizon_b);
    if (truncation_N < 1) fail("truncation_N must be >= 1");
    const std::size_t n = static_cast<std::size_t>(truncation_N);
    if (op.eigenvalues.size() != n)
        fail("operator.eigenvalues size %g must equal truncation_N = %g",
             static_cast<double>(op.eigenvalues.size()),
             static_cast<double>(truncation_N));
    for (std::size_t i = 0; i < n; ++i) {
        if (!(op.eigenvalues[i] > 0.0))
            fail("operator.eigenvalues must be strictly positive (mode %g "
                 "has %g)",
                 static_cast<double>(i + 1), op.eigenvalues[i]);
        if (i > 0 && !(op.eigenvalues[i] > op.eigenvalues[i - 1]))
            fail("operator.eigenvalues must be strictly increasing (violated "
                 "at mode %g)",
                 static_cast<double>(i + 1));
    }
    if (control.b_coeffs.size() != n)
        fail("control.b_coeffs size must equal truncation_N");
    double ss = 0.0;
    for (double v : control.b_coeffs) ss += v * v;
    if (std::abs(control.operator_norm - std::sqrt(ss)) >
        1e-12 * (1.0 + std::sqrt(ss)))
        fail("control.operator_norm = %g must equal the Euclidean norm of "
             "b_coeffs = %g (rank-one input operator)",
             control.operator_norm, std::sqrt(ss));
    if (nonlocal.coefficients.size() != nonlocal.times.size())
        fail("nonlocal coefficients and times must have equal length");
    for (std::size_t k = 0; k < nonlocal.times.size(); ++k) {
        if (nonlocal.coefficients[k] == 0.0)
            fail("nonlocal.coefficients[%g] violates the standing condition "
                 "c_k != 0",
                 static_cast<double>(k + 1));
        const double tk = nonlocal.times[k];
        if (!(tk > 0.0) || !(tk < horizon_b))
            fail("nonlocal.times[%g] = %g must lie strictly inside (0, b)",
                 static_cast<double>(k + 1), tk);
        if (k > 0 && !(tk > nonlocal.times[k - 1]))
            fail("nonlocal.times must be strictly increasing (violated at "
                 "entry %g)",
                 static_cast<double>(k + 1));
    }
    if (!(semigroup_bound_M >= 1.0))
        fail("semigroup_bound_M = %g must be >= 1", semigroup_bound_M);
    if (!(holder_gamma >= 0.0) || !(holder_gamma < alpha))
        fail("holder_gamma = %g violates 0 <= gamma < alpha = %g",
             holder_gamma, alpha);
    if (!nonsmooth.potential || !nonsmooth.directional_derivative ||
        !nonsmooth.subgradient_extremes || !nonsmooth.growth_P ||
        !nonsmooth.growth_psi)
        fail("nonsmooth term must provide potential, directional_derivative, "
             "subgradient_extremes, growth_P and growth_psi");
    if (!declares_compact_solution_operator)
        fail("declares_compact_solution_operator must be true: compactness of "
             "the solution operator is a standing hypothesis with no finite "
             "certificate");
    if (!declares_measurable_selection)
        fail("declares_measurable_selection must be true: measurability of "
             "the nonsmooth term is a standing hypothesis with no finite "
             "certificate");
}

SmallnessReport check_assumption_smallness(const ProblemConfig& cfg) {
    SmallnessReport r;
    for (std::size_t k = 0; k < cfg.nonlocal.times.size(); ++k) {
        r.lhs += std::abs(cfg.nonlocal.coefficients[k]) *
                 std::pow(cfg.nonlocal.times[k], cfg.alpha - 1.0);
    }
    r.rhs = std::tgamma(cfg.alpha) / cfg.semigroup_bound_M;
    r.holds = r.lhs < r.rhs;
    return r;
}

GrowthReport check_growth_ratio(const ProblemConfig& cfg,
                                const std::vector<double>& r_grid) {
    if (r_grid.size() < 4)
        throw DomainError("check_growth_ratio: r_grid needs >= 4 entries");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1])))
            throw DomainError("check_growth_ratio: r_grid must be positive, "
                              "strictly increasing");
    }
    if (r_grid.back() < 1e3 * r_grid.front())
        throw DomainError(
            "check_growth_ratio: r_grid must span at least three decades");

    const auto& psi = cfg.nonsmooth.growth_psi;
    double prev = -std::numeric_limits<double>::infinity();
    for (double r : r_grid) {
        const double v = psi(r);
        if (v < prev - 1e-14 * (1.0 + std::abs(prev)))
            throw ValidationError(
                "growth condition violated: psi must be nondecreasing but "
                "decreases along r_grid");
        prev = v;
    }

    // ||P|| in L^{1/gamma}(0,b); gamma = 0 is the essential-sup case,
    // estimated on a fine sample.
    double p_norm;
    const double b = cfg.horizon_b;
    if (cfg.holder_gamma == 0.0) {
        p_norm = 0.0;
        const int kSamples = 2048;
        for (int i = 0; i <= kSamples; ++i) {
            p_norm = std::max(p_norm,
                              std::abs(cfg.nonsmooth.growth_P(b * i / kSamples)));
        }
    } else {
        const double inv_g = 1.0 / cfg.holder_gamma;
        const QuadResult q = integrate_adaptive(
            [&](double t) {
                return std::pow(std::abs(cfg.nonsmooth.growth_P(t)), inv_g);
            },
            0.0, b, 1e-8, 1e-8);
        p_norm = std::pow(q.value, cfg.holder_gamma);
    }

    // liminf estimate: minimum of psi(r)/r over the top quarter of the grid.
    GrowthReport rep;
    const std::size_t tail_start = r_grid.size() - std::max<std::size_t>(
        3, r_grid.size() / 4);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = tail_start; i < r_grid.size(); ++i) {
        best = std::min(best, psi(r_grid[i]) / r_grid[i]);
    }
    rep.rho_estimate = best * p_norm;
    rep.holds = rep.rho_estimate < 1.0;
    return rep;
}

ActuationReport check_actuation_nondegeneracy(const ProblemConfig& cfg) {
    ActuationReport r;
    for (std::size_t i = 0; i < cfg.control.b_coeffs.size(); ++i) {
        if (std::abs(cfg.control.b_coeffs[i]) < 1e-14)
            r.zero_modes.push_back(static_cast<int>(i + 1));
    }
    return r;
}

std::vector<double> subgradient_selection(const NonsmoothTerm& term, double t,
                                          const std::vector<double>& x,
                                          SelectionRule rule) {
    for (double xi : x) {
        if (!std::isfinite(xi))
            throw DomainError("subgradient_selection: x must be finite");
    }
    const std::vector<Interval> bounds = term.subgradient_extremes(t, x);
    std::vector<double> f(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto& iv = bounds[i];
        if (iv.lo > iv.hi)
            throw ValidationError(
                "nonsmooth term definition error: subgradient interval has "
                "lower bound above upper bound");
        switch (rule) {
            case SelectionRule::minimal_norm:
                f[i] = std::clamp(0.0, iv.lo, iv.hi);
                break;
            case SelectionRule::midpoint:
                f[i] = 0.5 * (iv.lo + iv.hi);
                break;
            case SelectionRule::lower:
                f[i] = iv.lo;
                break;
        }
    }
    return f;
}

NonsmoothTerm zero_term() {
    NonsmoothTerm t;
    t.potential = [](double, const std::vector<double>&) { return 0.0; };
    t.directional_derivative = [](double, const std::vector<double>&,
                                  const std::vector<double>&) { return 0.0; };
    t.subgradient_extremes = [](double, const std::vector<double>& x) {
        return std::vector<Interval>(x.size(), Interval{0.0, 0.0});
    };
    t.growth_P = [](double) { return 0.0; };
    t.growth_gamma = 0.0;
    t.growth_psi = [](double) { return 0.0; };
    t.uniform_bound_L = 0.0;
    return t;
}

NonsmoothTerm scaled_abs_term(double L, int N) {
    if (!(L >= 0.0)) throw DomainError("scaled_abs_term: L must be >= 0");
    if (N < 1) throw DomainError("scaled_abs_term: N must be >= 1");
    const double c = L / std::sqrt(static_cast<double>(N));
    NonsmoothTerm t;
    t.potential = [c](double, const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += std::abs(xi);
        return c * s;
    };
    // F0 of the weighted l1 potential: sign(x_i) v_i away from the kink,
    // |v_i| on it (the Clarke derivative of |.| at 0 is the max over [-1,1]).
    t.directional_derivative = [c](double, const std::vector<double>& x,
                                   const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += (x[i] != 0.0) ? (x[i] > 0.0 ? v[i] : -v[i]) : std::abs(v[i]);
        }
        return c * s;
    };
    t.subgradient_extremes = [c](double, const std::vector<double>& x) {
        std::vector<Interval> b(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] > 0.0) b[i] = {c, c};
            else if (x[i] < 0.0) b[i] = {-c, -c};
            else b[i] = {-c, c};
        }
        return b;
    };
    t.growth_P = [](double) { return 1.0; };
    t.growth_gamma = 0.0;
    t.growth_psi = [L](double) { return L; };
    t.uniform_bound_L = L;
    return t;
}

}  // namespace fracsteer
