#include "fracsteer/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <Eigen/Dense>

#include "fracsteer/errors.hpp"
#include "fracsteer/quadrature.hpp"
#include "fracsteer/specialfun.hpp"

namespace fracsteer {

namespace {

double inv_gamma(double a) { return std::exp(-std::lgamma(a)); }

// E_n(tau) = E_{alpha,alpha}(-lambda tau^alpha), the mode propagator factor.
double mode_e(double alpha, double lambda, double tau) {
    return mittag_leffler(MLParams(alpha, alpha), -lambda * std::pow(tau, alpha));
}

// Antiderivatives of W_n(tau) = tau^{alpha-1} E_n(tau) against {1, tau}:
//   int_0^t W_n = t^alpha E_{alpha,alpha+1}(-lambda t^alpha)
//   int_0^t tau W_n = t^{alpha+1}[E_{alpha,alpha+1} - E_{alpha,alpha+2}](-lambda t^alpha)
// These make the grid convolution exact for piecewise-linear data.
double anti_w0(double alpha, double lambda, double t) {
    if (t <= 0.0) return 0.0;
    const double x = -lambda * std::pow(t, alpha);
    return std::pow(t, alpha) * mittag_leffler(MLParams(alpha, alpha + 1.0), x);
}

double anti_w1(double alpha, double lambda, double t) {
    if (t <= 0.0) return 0.0;
    const double x = -lambda * std::pow(t, alpha);
    const double e1 = mittag_leffler(MLParams(alpha, alpha + 1.0), x);
    const double e2 = mittag_leffler(MLParams(alpha, alpha + 2.0), x);
    return std::pow(t, alpha + 1.0) * (e1 - e2);
}

void require_structural(const ProblemConfig& cfg) {
    const int N = cfg.truncation_N;
    if (N < 1) throw ContractError("truncation_N must be at least 1");
    if (static_cast<int>(cfg.op.eigenvalues.size()) != N)
        throw ContractError("eigenvalue count does not match truncation_N");
    if (static_cast<int>(cfg.control.b_coeffs.size()) != N)
        throw ContractError("control coefficient count does not match truncation_N");
    if (cfg.nonlocal.coefficients.size() != cfg.nonlocal.times.size())
        throw ContractError("nonlocal coefficient and time counts differ");
    if (!(cfg.alpha > 0.5 && cfg.alpha <= 1.0))
        throw DomainError("kernel evaluation requires alpha in (1/2, 1]");
    if (!(cfg.horizon_b > 0.0)) throw DomainError("horizon must be positive");
    double prev = 0.0;
    for (double tk : cfg.nonlocal.times) {
        if (!(tk > prev) || !(tk < cfg.horizon_b))
            throw ContractError("nonlocal times must be strictly increasing inside (0, b)");
        prev = tk;
    }
}

int locate_node(const TimeGrid& grid, double t, const char* what) {
    const double b = grid.horizon();
    const double tol = 1e-12 * std::max(1.0, b);
    if (grid.uniform) {
        const int M = grid.segments();
        const double h = b / M;
        const int idx = static_cast<int>(std::lround(t / h));
        if (idx >= 0 && idx <= M && std::abs(t - grid.nodes[idx]) <= tol)
            return idx;
    } else {
        for (std::size_t i = 0; i < grid.nodes.size(); ++i)
            if (std::abs(t - grid.nodes[i]) <= tol) return static_cast<int>(i);
    }
    char msg[128];
    std::snprintf(msg, sizeof msg, "%s %.17g does not coincide with a grid node",
                  what, t);
    throw ContractError(msg);
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
    if (a.nodes.size() != b.nodes.size())
        throw ContractError("sample grid does not match the evaluator grid");
    const double tol = 1e-12 * std::max(1.0, b.horizon());
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
        if (std::abs(a.nodes[i] - b.nodes[i]) > tol)
            throw ContractError("sample grid does not match the evaluator grid");
}

void require_plain_selection(const KernelEvaluator& K, const Trajectory& f) {
    if (f.alpha != 1.0)
        throw ContractError("selection must carry plain samples (alpha = 1)");
    require_same_grid(f.grid, K.grid);
    if (static_cast<int>(f.weighted_modes.size()) != K.cfg.truncation_N)
        throw ContractError("selection mode count does not match the config");
    const std::size_t want = K.grid.nodes.size();
    for (const auto& row : f.weighted_modes)
        if (row.size() != want)
            throw ContractError("selection sample count does not match the grid");
}

// W_n at a grid lag d >= 1, from the cached E table.
double lag_w(const KernelEvaluator& K, int n, int d) {
    const double h = K.grid.horizon() / K.grid.segments();
    return std::pow(d * h, K.cfg.alpha - 1.0) * K.e_tab[n][d];
}

// T_n(t_i) = int_0^{t_i} W_n(t_i - s) phi(s) ds for the piecewise-linear
// interpolant of the samples phi, using exact cell moments.
std::vector<double> convolve_mode(const KernelEvaluator& K, int n,
                                  const std::vector<double>& phi) {
    const int M = K.grid.segments();
    const double h = K.grid.horizon() / M;
    const double inv_h = 1.0 / h;
    const auto& m0 = K.i0[n];
    const auto& m1 = K.i1[n];
    std::vector<double> T(M + 1, 0.0);
    for (int i = 1; i <= M; ++i) {
        double acc = 0.0;
        for (int d = 0; d < i; ++d) {
            const int j = i - 1 - d;  // cell [t_j, t_{j+1}] maps to lag cell d
            const double lo = (m1[d] - (d * h) * m0[d]) * inv_h;
            const double hi = (((d + 1) * h) * m0[d] - m1[d]) * inv_h;
            acc += phi[j] * lo + phi[j + 1] * hi;
        }
        T[i] = acc;
    }
    return T;
}

}  // namespace

NonlocalResolvent build_resolvent(const ProblemConfig& cfg,
                                  bool override_smallness) {
    require_structural(cfg);
    const SmallnessReport rep = check_assumption_smallness(cfg);
    if (!rep.holds && !override_smallness) {
        char msg[192];
        std::snprintf(msg, sizeof msg,
                      "nonlocal smallness condition violated: "
                      "sum |c_k| t_k^(alpha-1) = %.6g >= Gamma(alpha)/M = %.6g",
                      rep.lhs, rep.rhs);
        throw ValidationError(msg);
    }
    const int N = cfg.truncation_N;
    NonlocalResolvent R;
    R.diag.resize(N);
    R.neumann_gap.resize(N);
    R.neumann_valid = rep.holds;
    for (int n = 0; n < N; ++n) {
        double d = 0.0;
        for (std::size_t k = 0; k < cfg.nonlocal.times.size(); ++k) {
            const double tk = cfg.nonlocal.times[k];
            d += cfg.nonlocal.coefficients[k] * std::pow(tk, cfg.alpha - 1.0) *
                 mode_e(cfg.alpha, cfg.op.eigenvalues[n], tk);
        }
        const double gap = 1.0 - d;
        if (std::abs(gap) < 1e-14) {
            char msg[96];
            std::snprintf(msg, sizeof msg,
                          "nonlocal resolvent singular in mode %d: 1 - D = %.3g",
                          n + 1, gap);
            throw NumericError(msg);
        }
        R.diag[n] = 1.0 / gap;
        R.neumann_gap[n] = std::abs(d);
    }
    return R;
}

double Trajectory::value_at(int mode, int node) const {
    if (mode < 0 || mode >= static_cast<int>(weighted_modes.size()))
        throw DomainError("trajectory mode index out of range");
    if (node <= 0 || node >= static_cast<int>(grid.nodes.size()))
        throw DomainError("pointwise trajectory values exist only at positive nodes");
    return weighted_modes[mode][node] * std::pow(grid.nodes[node], alpha - 1.0);
}

double Trajectory::weighted_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        double s = 0.0;
        for (const auto& row : weighted_modes) s += row[i] * row[i];
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

Trajectory Trajectory::zeros(const TimeGrid& g, int modes, double a) {
    Trajectory t;
    t.grid = g;
    t.alpha = a;
    t.weighted_modes.assign(static_cast<std::size_t>(modes),
                            std::vector<double>(g.nodes.size(), 0.0));
    return t;
}

KernelEvaluator build_kernel_evaluator(const ProblemConfig& cfg,
                                       const TimeGrid& grid,
                                       bool override_smallness) {
    require_structural(cfg);
    if (!grid.uniform)
        throw DomainError("kernel evaluator requires a uniform grid");
    if (std::abs(grid.horizon() - cfg.horizon_b) > 1e-12 * std::max(1.0, cfg.horizon_b))
        throw ContractError("grid horizon does not match the config horizon");

    KernelEvaluator K;
    K.cfg = cfg;
    K.grid = grid;
    K.resolvent = build_resolvent(cfg, override_smallness);

    const int N = cfg.truncation_N;
    const int M = grid.segments();
    const double b = cfg.horizon_b;
    const double h = b / M;
    const double a = cfg.alpha;

    K.nonlocal_nodes.reserve(cfg.nonlocal.times.size());
    for (double tk : cfg.nonlocal.times) {
        const int idx = locate_node(grid, tk, "nonlocal time");
        if (idx == 0 || idx == M)
            throw ContractError("nonlocal times must be interior grid nodes");
        K.nonlocal_nodes.push_back(idx);
    }

    K.e_tab.assign(N, std::vector<double>(M + 1, 0.0));
    K.i0.assign(N, std::vector<double>(M, 0.0));
    K.i1.assign(N, std::vector<double>(M, 0.0));
    K.head_coeff.resize(N);
    for (int n = 0; n < N; ++n) {
        const double lam = cfg.op.eigenvalues[n];
        std::vector<double> f0(M + 1, 0.0), f1(M + 1, 0.0);
        for (int d = 0; d <= M; ++d) {
            const double tau = d * h;
            K.e_tab[n][d] = mode_e(a, lam, tau);
            f0[d] = anti_w0(a, lam, tau);
            f1[d] = anti_w1(a, lam, tau);
        }
        for (int d = 0; d < M; ++d) {
            K.i0[n][d] = f0[d + 1] - f0[d];
            K.i1[n][d] = f1[d + 1] - f1[d];
        }
        K.head_coeff[n] = std::pow(b, a - 1.0) * K.e_tab[n][M] * K.resolvent.diag[n];
    }

    // Terminal quadrature plan on [0, b].  Piece borders are the singular
    // points of g_n(b, .); each piece is covered by uniform base cells, the
    // last base cell is refined geometrically toward the singular right
    // endpoint, and the remaining sliver is finished with exact moments of
    // {(q-s)^{2a-2}, (q-s)^{a-1}, 1} under cofactors frozen at s = q.
    std::vector<double> borders;
    borders.push_back(0.0);
    for (double tk : cfg.nonlocal.times) borders.push_back(tk);
    borders.push_back(b);

    const int grading_levels = 40;
    const double ig = inv_gamma(a);

    auto g_terminal = [&](int n, double s) {
        double g = 0.0;
        for (std::size_t k = 0; k < cfg.nonlocal.times.size(); ++k) {
            const double tk = cfg.nonlocal.times[k];
            if (s < tk)
                g += cfg.nonlocal.coefficients[k] * K.head_coeff[n] *
                     std::pow(tk - s, a - 1.0) *
                     mode_e(a, cfg.op.eigenvalues[n], tk - s);
        }
        g += std::pow(b - s, a - 1.0) * mode_e(a, cfg.op.eigenvalues[n], b - s);
        return g;
    };

    auto push_cell = [&](double u, double v) {
        const double mid = 0.5 * (u + v);
        const double half = 0.5 * (v - u);
        for (int j = 0; j < 8; ++j) {
            K.qs.push_back(mid + half * gauss8_x[j]);
            K.qw.push_back(half * gauss8_w[j]);
        }
    };

    for (std::size_t p = 0; p + 1 < borders.size(); ++p) {
        const double lo = borders[p];
        const double q = borders[p + 1];
        const double len = q - lo;
        const int base = std::max(8, static_cast<int>(std::ceil(32.0 * len / b)));
        const double wc = len / base;
        for (int j = 0; j + 1 < base; ++j)
            push_cell(lo + j * wc, lo + (j + 1) * wc);
        for (int k = 0; k < grading_levels; ++k)
            push_cell(q - wc * std::ldexp(1.0, -k), q - wc * std::ldexp(1.0, -k - 1));
        const double delta = wc * std::ldexp(1.0, -grading_levels);

        KernelEvaluator::Sliver sl;
        sl.node = locate_node(grid, q, "singular point");
        sl.m2 = std::pow(delta, 2.0 * a - 1.0) / (2.0 * a - 1.0);
        sl.m1 = std::pow(delta, a) / a;
        sl.m0 = delta;
        sl.sing.resize(N);
        sl.rest.resize(N);
        const bool at_b = (p + 2 == borders.size());
        for (int n = 0; n < N; ++n) {
            if (at_b) {
                sl.sing[n] = ig;
                sl.rest[n] = 0.0;
            } else {
                sl.sing[n] = cfg.nonlocal.coefficients[p] * K.head_coeff[n] * ig;
                double rest = 0.0;
                for (std::size_t l = p + 1; l < K.nonlocal_nodes.size(); ++l)
                    rest += cfg.nonlocal.coefficients[l] * K.head_coeff[n] *
                            lag_w(K, n, K.nonlocal_nodes[l] - sl.node);
                rest += lag_w(K, n, M - sl.node);
                sl.rest[n] = rest;
            }
        }
        K.slivers.push_back(std::move(sl));
    }

    K.qcell.resize(K.qs.size());
    K.qtheta.resize(K.qs.size());
    for (std::size_t iq = 0; iq < K.qs.size(); ++iq) {
        int cell = static_cast<int>(K.qs[iq] / h);
        cell = std::clamp(cell, 0, M - 1);
        K.qcell[iq] = cell;
        K.qtheta[iq] = K.qs[iq] / h - cell;
    }

    K.qg.assign(N, std::vector<double>(K.qs.size(), 0.0));
    for (int n = 0; n < N; ++n)
        for (std::size_t iq = 0; iq < K.qs.size(); ++iq)
            K.qg[n][iq] = g_terminal(n, K.qs[iq]);

    // Gram matrix of {b_n g_n(b,.)} under the positive rule.  Every summand
    // is itself a Gram contribution (positive weights; sliver moment matrices
    // [[m2,m1],[m1,m0]] have determinant delta^{2a}(a-1)^2/((2a-1)a^2) >= 0),
    // so the assembled matrix is positive semidefinite up to rounding.
    K.gram.assign(static_cast<std::size_t>(N) * N, 0.0);
    for (int n = 0; n < N; ++n) {
        for (int m = n; m < N; ++m) {
            double acc = 0.0;
            for (std::size_t iq = 0; iq < K.qs.size(); ++iq)
                acc += K.qw[iq] * K.qg[n][iq] * K.qg[m][iq];
            for (const auto& sl : K.slivers)
                acc += sl.sing[n] * sl.sing[m] * sl.m2 +
                       (sl.sing[n] * sl.rest[m] + sl.rest[n] * sl.sing[m]) * sl.m1 +
                       sl.rest[n] * sl.rest[m] * sl.m0;
            acc *= cfg.control.b_coeffs[n] * cfg.control.b_coeffs[m];
            K.gram[static_cast<std::size_t>(n) * N + m] = acc;
            K.gram[static_cast<std::size_t>(m) * N + n] = acc;
        }
    }
    return K;
}

double kernel_value(const KernelEvaluator& K, int mode, double t, double s) {
    const ProblemConfig& cfg = K.cfg;
    if (mode < 0 || mode >= cfg.truncation_N)
        throw DomainError("kernel mode index out of range");
    if (!(t > 0.0) || t > cfg.horizon_b)
        throw DomainError("kernel time t must lie in (0, b]");
    if (s < 0.0 || s > cfg.horizon_b)
        throw DomainError("kernel argument s must lie in [0, b]");
    if (s == t)
        throw DomainError("kernel is singular on the diagonal s = t");
    for (double tk : cfg.nonlocal.times)
        if (s == tk)
            throw DomainError("kernel is singular at the nonlocal times");

    const double a = cfg.alpha;
    const double lam = cfg.op.eigenvalues[mode];
    const double head = std::pow(t, a - 1.0) * mode_e(a, lam, t) *
                        K.resolvent.diag[mode];
    double g = 0.0;
    for (std::size_t k = 0; k < cfg.nonlocal.times.size(); ++k) {
        const double tk = cfg.nonlocal.times[k];
        if (s < tk)
            g += cfg.nonlocal.coefficients[k] * head *
                 std::pow(tk - s, a - 1.0) * mode_e(a, lam, tk - s);
    }
    if (s < t) g += std::pow(t - s, a - 1.0) * mode_e(a, lam, t - s);
    return g;
}

Trajectory evaluate_mild_solution(const KernelEvaluator& K,
                                  const WeightedSamples& control,
                                  const Trajectory& selection) {
    if (control.alpha != 1.0)
        throw ContractError("control must carry plain samples (alpha = 1)");
    require_same_grid(control.grid, K.grid);
    require_plain_selection(K, selection);

    const int N = K.cfg.truncation_N;
    const int M = K.grid.segments();
    const double a = K.cfg.alpha;

    Trajectory out = Trajectory::zeros(K.grid, N, a);
    std::vector<double> phi(M + 1);
    for (int n = 0; n < N; ++n) {
        const double bn = K.cfg.control.b_coeffs[n];
        for (int j = 0; j <= M; ++j)
            phi[j] = bn * control.weighted_values[j] + selection.weighted_modes[n][j];
        const std::vector<double> T = convolve_mode(K, n, phi);
        double S = 0.0;
        for (std::size_t k = 0; k < K.nonlocal_nodes.size(); ++k)
            S += K.cfg.nonlocal.coefficients[k] * T[K.nonlocal_nodes[k]];
        const double core = K.resolvent.diag[n] * S;
        out.weighted_modes[n][0] = K.e_tab[n][0] * core;
        for (int i = 1; i <= M; ++i)
            out.weighted_modes[n][i] =
                K.e_tab[n][i] * core +
                std::pow(K.grid.nodes[i], 1.0 - a) * T[i];
    }
    return out;
}

SteeredEvaluation evaluate_mild_steered(const KernelEvaluator& K,
                                        const std::vector<double>& steering,
                                        const Trajectory& selection) {
    const int N = K.cfg.truncation_N;
    if (static_cast<int>(steering.size()) != N)
        throw ContractError("steering vector length does not match the mode count");
    require_plain_selection(K, selection);

    const int M = K.grid.segments();
    const double a = K.cfg.alpha;
    const double b = K.cfg.horizon_b;

    // u(t_j) = sum_m b_m y_m g_m(b, t_j); every lag lands on the grid.  The
    // final node has no finite pointwise value (the (b-s)^{alpha-1} summand
    // blows up), so it stores the bounded remainder, which is zero because
    // all chi_k vanish at s = b.
    std::vector<double> u(M + 1, 0.0);
    for (int j = 0; j < M; ++j) {
        double acc = 0.0;
        for (int m = 0; m < N; ++m) {
            double gm = 0.0;
            for (std::size_t k = 0; k < K.nonlocal_nodes.size(); ++k)
                if (j < K.nonlocal_nodes[k])
                    gm += K.cfg.nonlocal.coefficients[k] * K.head_coeff[m] *
                          lag_w(K, m, K.nonlocal_nodes[k] - j);
            gm += lag_w(K, m, M - j);
            acc += K.cfg.control.b_coeffs[m] * steering[m] * gm;
        }
        u[j] = acc;
    }

    WeightedSamples us;
    us.grid = K.grid;
    us.alpha = 1.0;
    us.weighted_values = u;

    SteeredEvaluation ev;
    ev.x = evaluate_mild_solution(K, us, selection);
    ev.control = std::move(us);

    // Terminal completion in the Gram algebra: x(b) = Xf(b) + Gram y holds
    // exactly because both sides use the same quadrature rule.
    ev.terminal = terminal_forcing_vector(K, selection);
    for (int n = 0; n < N; ++n) {
        double acc = ev.terminal[n];
        for (int m = 0; m < N; ++m)
            acc += K.gram[static_cast<std::size_t>(n) * N + m] * steering[m];
        ev.terminal[n] = acc;
        ev.x.weighted_modes[n][M] = std::pow(b, 1.0 - a) * acc;
    }
    return ev;
}

Trajectory free_evolution(const KernelEvaluator& K,
                          const std::vector<double>& v) {
    const int N = K.cfg.truncation_N;
    if (static_cast<int>(v.size()) != N)
        throw ContractError("free evolution vector length does not match the mode count");
    Trajectory out = Trajectory::zeros(K.grid, N, K.cfg.alpha);
    for (int n = 0; n < N; ++n)
        for (std::size_t i = 0; i < K.grid.nodes.size(); ++i)
            out.weighted_modes[n][i] = K.e_tab[n][i] * v[n];
    return out;
}

std::vector<double> gramian_matrix(const KernelEvaluator& K) { return K.gram; }

std::vector<double> terminal_forcing_vector(const KernelEvaluator& K,
                                            const Trajectory& selection) {
    require_plain_selection(K, selection);
    const int N = K.cfg.truncation_N;
    std::vector<double> out(N, 0.0);
    for (int n = 0; n < N; ++n) {
        const auto& f = selection.weighted_modes[n];
        double acc = 0.0;
        for (std::size_t iq = 0; iq < K.qs.size(); ++iq) {
            const int c = K.qcell[iq];
            const double th = K.qtheta[iq];
            acc += K.qw[iq] * K.qg[n][iq] * ((1.0 - th) * f[c] + th * f[c + 1]);
        }
        for (const auto& sl : K.slivers)
            acc += (sl.sing[n] * sl.m1 + sl.rest[n] * sl.m0) * f[sl.node];
        out[n] = acc;
    }
    return out;
}

int terminal_quadrature_nodes(const KernelEvaluator& K) {
    return static_cast<int>(K.qs.size());
}

InitialFunctionalReport reconstruct_initial_functional(const Trajectory& x,
                                                       const ProblemConfig& cfg) {
    const int N = static_cast<int>(x.weighted_modes.size());
    const int M = static_cast<int>(x.grid.nodes.size()) - 1;
    if (M < 4)
        throw ResolutionError("initial-layer extrapolation needs at least 4 positive nodes");

    if (static_cast<int>(cfg.op.eigenvalues.size()) < N)
        throw ContractError("config eigenvalue count does not cover the trajectory modes");

    const double a = x.alpha;
    // Near t = 0 the weighted trajectory is spanned mode by mode as
    //   w_n(t) = c0 Gamma(a) E_{a,a}(-l t^a) + c1 t E_{a,a+1}(-l t^a)
    //            + c2 t^2 E_{a,a+2}(-l t^a) + c3 t^3 E_{a,a+3}(-l t^a) + ...
    // (propagator head plus the forcing convolution expanded in derivatives
    // of the data).  Fitting these shapes extrapolates stiff modes exactly
    // where a power basis would see a non-polynomial decay; the first shape
    // equals 1 at t = 0, so its coefficient is the limit.
    const int rows = std::min(10, M);
    const int cols = std::min(4, rows);
    const double ga = std::exp(std::lgamma(a));

    InitialFunctionalReport rep;
    rep.extrapolated.resize(N);
    rep.collocation.resize(N);
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd scale(cols), rhs(rows);
    for (int n = 0; n < N; ++n) {
        const double lam = cfg.op.eigenvalues[n];
        for (int i = 0; i < rows; ++i) {
            const double t = x.grid.nodes[i + 1];
            const double z = -lam * std::pow(t, a);
            for (int j = 0; j < cols; ++j) {
                const double pref = (j == 0) ? ga : std::pow(t, j);
                A(i, j) = pref * mittag_leffler(MLParams(a, a + j), z);
            }
        }
        for (int j = 0; j < cols; ++j) {
            scale(j) = A.col(j).cwiseAbs().maxCoeff();
            if (scale(j) == 0.0) scale(j) = 1.0;
            A.col(j) /= scale(j);
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        for (int i = 0; i < rows; ++i) rhs(i) = x.weighted_modes[n][i + 1];
        const Eigen::VectorXd coef = qr.solve(rhs);
        rep.extrapolated[n] = ga * coef(0) / scale(0);
    }
    for (int n = 0; n < N; ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k < cfg.nonlocal.times.size(); ++k) {
            const int idx = locate_node(x.grid, cfg.nonlocal.times[k], "nonlocal time");
            s += cfg.nonlocal.coefficients[k] * x.value_at(n, idx);
        }
        rep.collocation[n] = s;
    }
    return rep;
}

}  // namespace fracsteer
