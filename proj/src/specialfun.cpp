#include "fracsteer/specialfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include "fracsteer/errors.hpp"
#include "fracsteer/quadrature.hpp"

namespace fracsteer {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 1/Gamma(g) for g > 0 without overflow for large g.
double inv_gamma_pos(double g) {
    return std::exp(-std::lgamma(g));
}

// 1/Gamma(g) for any real g; zero at the poles g = 0, -1, -2, ...
// Arguments formed as b - a*k carry rounding of order k*eps, so anything
// within 1e-12 of a pole is snapped to it; otherwise the ~1e-70 quasi-zero
// coefficient would corrupt the term-magnitude trend used for truncation.
// Reflection keeps lgamma's argument positive.
double inv_gamma_any(double g) {
    if (g > 0.5) return inv_gamma_pos(g);
    const double r = std::round(g);
    if (r <= 0.0 && std::abs(g - r) <= 1e-12) return 0.0;
    if (g > 0.0) return inv_gamma_pos(g);
    return std::sin(kPi * g) * std::exp(std::lgamma(1.0 - g)) / kPi;
}

// Power series sum_{n>=0} z^n / Gamma(alpha n + beta).  Returns nothing when
// the largest intermediate term exceeds max_term_mag: past that point the
// alternating sum for z < 0 loses too many digits in doubles (the final
// cancellation error is roughly max_term * 1e-16).
std::optional<double> ml_series(double a, double b, double z,
                                double max_term_mag) {
    double sum = inv_gamma_pos(b);
    double zn = 1.0;
    double peak = std::abs(sum);
    int tiny_run = 0;
    for (int n = 1; n <= 4000; ++n) {
        zn *= z;
        if (!std::isfinite(zn)) return std::nullopt;
        const double term = zn * inv_gamma_pos(a * n + b);
        sum += term;
        peak = std::max(peak, std::abs(term));
        if (z < 0.0 && peak > max_term_mag) return std::nullopt;
        if (std::abs(term) <= 1e-17 * (std::abs(sum) + 1e-290)) {
            if (++tiny_run >= 2) return sum;
        } else {
            tiny_run = 0;
        }
    }
    return std::nullopt;
}

// Algebraic expansion E_{a,b}(-x) ~ -sum_{k>=1} (-x)^{-k} / Gamma(b - a k),
// truncated at the smallest term.  Valid on the negative real axis; accurate
// to ~1e-13 (absolute) once x >= 30 for the parameter ranges used here.
double ml_asymptotic_neg(double a, double b, double x) {
    double sum = 0.0;
    double xk = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 80; ++k) {
        xk *= -1.0 / x;
        const double coeff = inv_gamma_any(b - a * k);
        if (coeff == 0.0) continue;  // Gamma pole: term vanishes exactly
        const double term = -xk * coeff;
        if (std::abs(term) >= prev_mag) break;  // divergent tail begins
        sum += term;
        prev_mag = std::abs(term);
    }
    return sum;
}

// Real-line integral representation for E_{a,b}(-x), 0 < a < 1, 0 < b <= 1,
// x > 0.  With chi = u^a the standard contour formula becomes
//   E = (1/pi) int_0^inf u^{a-b} e^{-u}
//         [u^a sin(pi(1-b)) + x sin(pi(1-b+a))]
//       / [u^{2a} + 2 u^a x cos(pi a) + x^2] du.
// The denominator is bounded below by x^2 sin^2(pi a) > 0.  The substitution
// u = v^p with p = 2/(1+a-b) removes the endpoint singularity when b > a.
double ml_integral_neg(double a, double b, double x) {
    const double s1 = std::sin(kPi * (1.0 - b));
    const double s2 = std::sin(kPi * (1.0 - b + a));
    const double ca = std::cos(kPi * a);

    double p = 1.0;
    if (b > a) p = 2.0 / (1.0 + a - b);

    auto integrand = [&](double v) {
        const double u = (p == 1.0) ? v : std::pow(v, p);
        if (u <= 0.0) return 0.0;
        const double ua = std::pow(u, a);
        const double denom = ua * ua + 2.0 * ua * x * ca + x * x;
        const double num = ua * s1 + x * s2;
        double f = std::pow(u, a - b) * std::exp(-u) * num / denom;
        if (p != 1.0) f *= p * std::pow(v, p - 1.0);
        return f;
    };

    const double umax = 80.0;  // e^{-80} is far below target accuracy
    const double vmax = (p == 1.0) ? umax : std::pow(umax, 1.0 / p);

    std::vector<double> brk;
    if (ca < 0.0) {
        // Denominator minimum at u^a = x|ca|: seed the refinement there.
        const double ustar = std::pow(x * (-ca), 1.0 / a);
        for (double f : {0.5, 1.0, 2.0}) {
            const double u = f * ustar;
            if (u > 0.0 && u < umax)
                brk.push_back((p == 1.0) ? u : std::pow(u, 1.0 / p));
        }
    }

    const QuadResult q =
        integrate_adaptive(integrand, 0.0, vmax, 1e-14, 1e-13, brk);
    return q.value / kPi;
}

// E_{a,b}(-x) for 0 < a < 1, b > 0, x > 0 via the integral representation.
// For b > 1 the base parameter is first shifted into (0,1] and the value
// recovered through E_{a,B+a}(z) = (E_{a,B}(z) - 1/Gamma(B)) / z.
double ml_negative(double a, double b, double x) {
    if (b <= 1.0 + 1e-14) return ml_integral_neg(a, std::min(b, 1.0), x);
    int k = static_cast<int>(std::ceil((b - 1.0) / a - 1e-12));
    double base = b - k * a;
    while (base <= 1e-12) {
        --k;
        base += a;
    }
    double e = ml_integral_neg(a, base, x);
    for (int j = 0; j < k; ++j) {
        e = (e - inv_gamma_pos(base + j * a)) / (-x);
    }
    return e;
}

// alpha = 1 reduces to elementary functions for the betas that matter;
// otherwise E_{1,b}(z) = 1/Gamma(b-1) int_0^1 e^{zt} (1-t)^{b-2} dt for
// b > 1 (substituted to remove the endpoint singularity when b < 2).
double ml_alpha_one(double b, double z) {
    if (b == 1.0) return std::exp(z);
    if (b == 2.0) return std::expm1(z) / z;
    if (b == 3.0) return (std::expm1(z) - z) / (z * z);
    if (z >= -5.0) {
        const auto s = ml_series(1.0, b, z, 1e3);
        if (s) return *s;
    }
    if (b > 1.0) {
        const double q = 1.0 / (b - 1.0);
        auto integrand = [&](double u) {
            return std::exp(z * (1.0 - std::pow(u, q)));
        };
        const QuadResult r = integrate_adaptive(integrand, 0.0, 1.0, 1e-15, 1e-13);
        return q * r.value * inv_gamma_pos(b - 1.0);
    }
    // b < 1 and z < -5: step the base parameter up once.
    return inv_gamma_pos(b) + z * ml_alpha_one(b + 1.0, z);
}

[[noreturn]] void throw_ml_failure(double a, double b, double z) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "mittag_leffler failed to converge at alpha=%.17g beta=%.17g "
                  "z=%.17g",
                  a, b, z);
    throw EvaluationError(buf);
}

}  // namespace

MLParams::MLParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw DomainError("mittag_leffler: alpha must lie in (0, 1]");
    if (!(beta > 0.0))
        throw DomainError("mittag_leffler: beta must be positive");
}

double mittag_leffler(const MLParams& p, double z) {
    const double a = p.alpha;
    const double b = p.beta;
    if (!std::isfinite(z)) throw DomainError("mittag_leffler: z must be finite");
    if (z == 0.0) return inv_gamma_pos(b);
    if (a == 1.0) return ml_alpha_one(b, z);

    if (z > 0.0) {
        const auto s = ml_series(a, b, z, 0.0 /*unused for z>0*/);
        if (s) return *s;
        throw_ml_failure(a, b, z);
    }

    // Negative axis.  The series is kept while its largest term stays below
    // 1e3, so the cancellation error stays near 1e-13; beyond that the
    // asymptotic expansion or the integral representation takes over.
    const auto s = ml_series(a, b, z, 1e3);
    if (s) return *s;
    const double x = -z;
    if (x >= 30.0) return ml_asymptotic_neg(a, b, x);
    return ml_negative(a, b, x);
}

WrightDensity::WrightDensity(double alpha_, int series_terms_)
    : alpha(alpha_), series_terms(series_terms_) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("wright_omega: alpha must lie in (0, 1)");
    if (series_terms < 1)
        throw DomainError("wright_omega: series_terms must be positive");
}

namespace {

// Shared series core for the one-sided stable density.  Terms are formed in
// log space so individual factors cannot overflow; the partial-sum peak is
// still monitored because the series is violently alternating for small
// theta.  sin(pi n alpha) vanishes exactly at every (1/alpha)-th term for
// rational alpha, so the stopping rule requires a run of small terms rather
// than a single one.
struct OmegaSeries {
    double value = 0.0;
    double last_term = 0.0;   // magnitude of last retained nonzero term
    double peak = 0.0;        // largest term magnitude seen
    bool converged = false;
    int terms_used = 0;
};

OmegaSeries omega_series(double a, double theta, int max_terms) {
    OmegaSeries out;
    const double lt = std::log(theta);
    double sum = 0.0;
    int tiny_run = 0;
    for (int n = 1; n <= max_terms; ++n) {
        const double le = std::lgamma(n * a + 1.0) - std::lgamma(n + 1.0) -
                          (n * a + 1.0) * lt;
        const double s = std::sin(kPi * n * a);
        double term = 0.0;
        if (le > 700.0) {
            out.peak = std::numeric_limits<double>::infinity();
            out.terms_used = n;
            out.value = sum / kPi;
            return out;  // hopeless in doubles
        }
        if (s != 0.0) {
            term = ((n % 2 == 1) ? 1.0 : -1.0) * std::exp(le) * s;
            sum += term;
            out.last_term = std::abs(term);
            out.peak = std::max(out.peak, std::abs(term));
        }
        out.terms_used = n;
        if (std::abs(term) <= 1e-17 * (std::abs(sum) + 1e-290)) {
            if (++tiny_run >= 6 && n > 12) {
                out.converged = true;
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    out.value = sum / kPi;
    return out;
}

}  // namespace

WrightEval wright_omega(const WrightDensity& w, double theta) {
    if (!(theta > 0.0)) throw DomainError("wright_omega: theta must be positive");
    const OmegaSeries s = omega_series(w.alpha, theta, w.series_terms);
    // The density itself is O(1), so a partial-sum peak beyond 1e10 means the
    // alternating sum has no usable digits left in doubles.  The peak is
    // compared absolutely: a truncated, still-growing sum is huge itself and
    // would pass any relative test.
    if (!std::isfinite(s.value) || s.peak / kPi > 1e10) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "wright_omega: series partial sums blow up at alpha=%.17g "
                      "theta=%.17g; evaluate through the xi_alpha route instead",
                      w.alpha, theta);
        throw RangeError(buf);
    }
    return {s.value, s.last_term / kPi};
}

double stable_density(double alpha, double x) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("stable_density: alpha must lie in (0, 1)");
    if (!(x > 0.0)) throw DomainError("stable_density: x must be positive");

    // The series' largest term sits near index n* ~ x^{-alpha/(1-alpha)};
    // keep the series while n* is small enough that no digits are lost.
    const double nstar = std::pow(x, -alpha / (1.0 - alpha));
    if (nstar <= 40.0) {
        const OmegaSeries s = omega_series(alpha, x, 1000);
        // Accept the series only when rounding of the largest term cannot
        // have cost more than ~1e-12 of the result.
        const double est_cancel = s.peak * 1e-16 / kPi;
        if (s.converged &&
            est_cancel <= 1e-12 * std::max(std::abs(s.value), 1e-6)) {
            return s.value;
        }
        // fall through to the integral when the series is too lossy here
    }

    // Angular integral (Zolotarev form): with c = x^{-alpha/(1-alpha)},
    //   omega_alpha(x) = alpha / ((1-alpha) pi) x^{-1/(1-alpha)}
    //                    int_0^pi A(phi) exp(-A(phi) c) dphi,
    //   A(phi) = [sin(alpha phi)^alpha sin((1-alpha) phi)^{1-alpha}
    //             / sin(phi)]^{1/(1-alpha)}.
    // A increases from A(0) = [alpha^alpha (1-alpha)^{1-alpha}]^{1/(1-alpha)}
    // to +inf at phi = pi, so the integrand decays to zero at both scales.
    const double c = nstar;
    const double a = alpha;
    const double a0 = std::exp((a * std::log(a) + (1.0 - a) * std::log1p(-a)) /
                               (1.0 - a));
    if (a0 * c > 700.0) return 0.0;  // entire integrand underflows

    auto integrand = [&](double phi) {
        if (phi < 1e-12) {
            const double w = a0 * c;
            return (w > 700.0) ? 0.0 : a0 * std::exp(-w);
        }
        const double lg = (a * std::log(std::sin(a * phi)) +
                           (1.0 - a) * std::log(std::sin((1.0 - a) * phi)) -
                           std::log(std::sin(phi))) /
                          (1.0 - a);
        if (lg > 690.0) return 0.0;
        const double A = std::exp(lg);
        const double w = A * c;
        return (w > 700.0) ? 0.0 : A * std::exp(-w);
    };

    const QuadResult q = integrate_adaptive(
        integrand, 0.0, kPi, 1e-300, 1e-12,
        {0.5 * kPi, 0.9 * kPi, 0.99 * kPi, 0.999 * kPi});
    return a / ((1.0 - a) * kPi) * std::pow(x, -1.0 / (1.0 - a)) * q.value;
}

double wright_xi(double alpha, double theta) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("wright_xi: alpha must lie in (0, 1)");
    if (!(theta >= 0.0)) throw DomainError("wright_xi: theta must be nonnegative");
    // theta -> 0+ limit is 1/Gamma(1 - alpha); below this threshold the
    // intermediate power theta^{-1/alpha} would overflow anyway.
    if (theta < 1e-150) return inv_gamma_pos(1.0 - alpha);
    const double y = std::pow(theta, -1.0 / alpha);
    const double d = stable_density(alpha, y);
    return d * std::pow(theta, -1.0 - 1.0 / alpha) / alpha;
}

double solution_operator_scalar(double alpha, double lambda, double t) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw DomainError("solution_operator_scalar: alpha must lie in (0, 1]");
    if (!(lambda >= 0.0))
        throw DomainError("solution_operator_scalar: lambda must be nonnegative");
    if (!(t >= 0.0))
        throw DomainError("solution_operator_scalar: t must be nonnegative");
    if (t == 0.0 || lambda == 0.0) {
        return (t == 0.0) ? inv_gamma_pos(alpha)
                          : mittag_leffler(MLParams(alpha, alpha), 0.0);
    }
    return mittag_leffler(MLParams(alpha, alpha), -lambda * std::pow(t, alpha));
}

double subordination_integral(double alpha, double z, double tol) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("subordination_integral: alpha must lie in (0, 1)");
    if (!(z >= 0.0))
        throw DomainError("subordination_integral: z must be nonnegative");

    auto integrand = [&](double th) {
        if (th <= 0.0) return 0.0;
        return th * wright_xi(alpha, th) * std::exp(-z * th);
    };

    // xi_alpha has superexponentially thin tails; scan for a safe cutoff.
    double upper = 4.0;
    double ref = integrand(1.0);
    while (upper < 4096.0) {
        const double v = integrand(upper);
        if (v < 1e-16 * (ref + 1e-30)) break;
        ref = std::max(ref, v);
        upper *= 2.0;
    }

    const QuadResult q = integrate_adaptive(integrand, 0.0, upper,
                                            std::min(tol, 1e-9), 1e-9,
                                            {0.5, 1.0, 2.0});
    return alpha * q.value;
}

}  // namespace fracsteer
