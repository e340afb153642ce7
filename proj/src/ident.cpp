#include "ioident/ident.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace ioident {

SensitivityTrajectory sensitivity_trajectories(const GeneralSystem& sys, const ParamMap& params,
                                               const InputSignal& sig, double t0, double t1,
                                               const SolverConfig& cfg,
                                               std::vector<std::string> free_params,
                                               std::span<const double> extra_times) {
    validate_system(sys);
    validate_signal(sig);
    const ParamMap full = resolve_params(sys, {}, params);

    if (free_params.empty()) free_params = sys.param_names;
    for (const auto& name : free_params) {
        if (std::find(sys.param_names.begin(), sys.param_names.end(), name) ==
            sys.param_names.end())
            throw InvalidArgument("free parameter '" + name + "' is not declared");
        if (std::count(free_params.begin(), free_params.end(), name) != 1)
            throw InvalidArgument("free parameter '" + name + "' listed twice");
    }

    const std::size_t n = sys.state_names.size();
    const std::size_t p = free_params.size();

    // Symbolic partials, built once per call.
    std::vector<std::vector<ExprPtr>> dfdx(n, std::vector<ExprPtr>(n));
    std::vector<std::vector<ExprPtr>> dfdp(n, std::vector<ExprPtr>(p));
    std::vector<ExprPtr> dgdx(n), dgdp(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k)
            dfdx[i][k] = differentiate_expression(sys.rhs[i], sys.state_names[k]);
        for (std::size_t j = 0; j < p; ++j)
            dfdp[i][j] = differentiate_expression(sys.rhs[i], free_params[j]);
    }
    for (std::size_t k = 0; k < n; ++k)
        dgdx[k] = differentiate_expression(sys.output, sys.state_names[k]);
    for (std::size_t j = 0; j < p; ++j)
        dgdp[j] = differentiate_expression(sys.output, free_params[j]);

    std::vector<std::string> param_names = sys.param_names;
    std::vector<double> param_values;
    for (const auto& name : param_names) param_values.push_back(full.at(name));

    EvalEnv env;
    env.state_names = &sys.state_names;
    env.param_names = &param_names;
    env.param_values = param_values.data();

    const Eigen::Index ni = static_cast<Eigen::Index>(n);
    const Eigen::Index pi = static_cast<Eigen::Index>(p);

    Eigen::MatrixXd jac(ni, ni), forcing(ni, pi);
    auto rhs = [&](double t, double u, const Eigen::VectorXd& w, Eigen::VectorXd& dw) {
        env.state_values = w.data(); // physical states occupy the head of w
        env.input = u;
        env.time = t;
        for (Eigen::Index i = 0; i < ni; ++i) {
            dw(i) = evaluate_expression(*sys.rhs[static_cast<std::size_t>(i)], env);
            for (Eigen::Index k = 0; k < ni; ++k)
                jac(i, k) = evaluate_expression(
                    *dfdx[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], env);
            for (Eigen::Index j = 0; j < pi; ++j)
                forcing(i, j) = evaluate_expression(
                    *dfdp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], env);
        }
        for (Eigen::Index j = 0; j < pi; ++j) {
            auto s_j = w.segment(ni * (j + 1), ni);
            dw.segment(ni * (j + 1), ni) = jac * s_j + forcing.col(j);
        }
    };

    const std::vector<double> grid =
        detail::build_grid(t0, t1, cfg.h, signal_breakpoints(sig), extra_times);

    SensitivityTrajectory out;
    out.free_params = free_params;
    out.times = grid;
    out.dy_dtheta.resize(static_cast<Eigen::Index>(grid.size()), pi);
    out.outputs.resize(grid.size());

    Eigen::VectorXd w0 = Eigen::VectorXd::Zero(ni * (pi + 1));
    w0.head(ni) = sys.x0;

    detail::rk4_on_grid(rhs, sig, w0, grid,
                        [&](std::size_t idx, double t, double u, const Eigen::VectorXd& w) {
                            env.state_values = w.data();
                            env.input = u;
                            env.time = t;
                            out.outputs[idx] = evaluate_expression(*sys.output, env);
                            Eigen::RowVectorXd gx(ni);
                            for (Eigen::Index k = 0; k < ni; ++k)
                                gx(k) = evaluate_expression(*dgdx[static_cast<std::size_t>(k)], env);
                            for (Eigen::Index j = 0; j < pi; ++j) {
                                double direct =
                                    evaluate_expression(*dgdp[static_cast<std::size_t>(j)], env);
                                out.dy_dtheta(static_cast<Eigen::Index>(idx), j) =
                                    gx.dot(w.segment(ni * (j + 1), ni)) + direct;
                            }
                        });
    return out;
}

GramReport gram_matrix(const SensitivityTrajectory& S, double rel_tol) {
    const std::size_t m = S.times.size();
    if (m < 2) throw InvalidArgument("Gram matrix needs at least two time points");
    if (!(rel_tol > 0.0)) throw InvalidArgument("rank tolerance must be positive");
    const Eigen::Index p = S.dy_dtheta.cols();

    Eigen::VectorXd weights(static_cast<Eigen::Index>(m));
    weights(0) = 0.5 * (S.times[1] - S.times[0]);
    for (std::size_t i = 1; i + 1 < m; ++i)
        weights(static_cast<Eigen::Index>(i)) = 0.5 * (S.times[i + 1] - S.times[i - 1]);
    weights(static_cast<Eigen::Index>(m) - 1) = 0.5 * (S.times[m - 1] - S.times[m - 2]);

    GramReport report;
    report.params = S.free_params;
    report.G = S.dy_dtheta.transpose() * weights.asDiagonal() * S.dy_dtheta;
    report.G = 0.5 * (report.G + report.G.transpose()); // scrub asymmetric round-off

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.G);
    if (es.info() != Eigen::Success) throw NumericError("Gram eigendecomposition failed");
    // Eigen returns ascending order; flip to descending.
    report.eigenvalues = es.eigenvalues().reverse();
    report.eigenvectors = es.eigenvectors().rowwise().reverse();

    const double lambda_max = std::max(0.0, report.eigenvalues(0));
    report.threshold = rel_tol * lambda_max;
    report.rank = 0;
    for (Eigen::Index i = 0; i < p; ++i)
        if (report.eigenvalues(i) > report.threshold) ++report.rank;

    report.null_directions.resize(p, p - report.rank);
    for (Eigen::Index i = report.rank; i < p; ++i)
        report.null_directions.col(i - report.rank) = report.eigenvectors.col(i);
    return report;
}

CramerRaoReport fisher_cramer_rao(const SensitivityTrajectory& S, double sigma_noise,
                                  double rel_tol, double abs_tol) {
    if (!(sigma_noise > 0.0)) throw InvalidArgument("noise level must be positive");
    const Eigen::Index p = S.dy_dtheta.cols();

    CramerRaoReport report;
    report.params = S.free_params;
    report.sigma_noise = sigma_noise;
    report.fim = S.dy_dtheta.transpose() * S.dy_dtheta / (sigma_noise * sigma_noise);
    report.fim = 0.5 * (report.fim + report.fim.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.fim);
    if (es.info() != Eigen::Success) throw NumericError("Fisher eigendecomposition failed");
    const Eigen::VectorXd lambda = es.eigenvalues();
    const Eigen::MatrixXd V = es.eigenvectors();
    const double lambda_max = std::max(0.0, lambda(p - 1));
    const double cutoff = std::max(rel_tol * lambda_max, abs_tol);

    report.crb.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double variance = 0.0;
        double null_mass = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (lambda(k) > cutoff)
                variance += V(j, k) * V(j, k) / lambda(k);
            else
                null_mass += V(j, k) * V(j, k);
        }
        report.crb(j) =
            null_mass > 1e-12 ? std::numeric_limits<double>::infinity() : variance;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Derivative-based estimators

double fit_derivative(const SampledFunction& f, double t0, int order, FitSide side, double window,
                      int degree) {
    if (order < 0 || order > 4) throw InvalidArgument("derivative order must be 0..4");
    if (degree < order) throw InvalidArgument("polynomial degree must be >= derivative order");
    if (!(window > 0.0)) throw InvalidArgument("window must be positive");
    if (f.size() < 2) throw InvalidArgument("not enough samples");

    double lo = t0, hi = t0;
    switch (side) {
        case FitSide::Right: hi = t0 + window; break;
        case FitSide::Left: lo = t0 - window; break;
        case FitSide::Central:
            lo = t0 - 0.5 * window;
            hi = t0 + 0.5 * window;
            break;
    }
    const double tol = 1e-9 * f.h;
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double t = f.time_at(i);
        if (t >= lo - tol && t <= hi + tol) picks.push_back(i);
    }
    if (picks.size() < static_cast<std::size_t>(degree) + 2)
        throw InvalidArgument("window holds " + std::to_string(picks.size()) +
                              " samples; need at least degree + 2 = " +
                              std::to_string(degree + 2));

    // Fit in the scaled variable (t - t0)/window to keep the Vandermonde
    // columns comparably sized.
    const Eigen::Index rows = static_cast<Eigen::Index>(picks.size());
    Eigen::MatrixXd X(rows, degree + 1);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double tau = (f.time_at(picks[static_cast<std::size_t>(r)]) - t0) / window;
        double pow_tau = 1.0;
        for (int d = 0; d <= degree; ++d) {
            X(r, d) = pow_tau;
            pow_tau *= tau;
        }
        rhs(r) = f.values[picks[static_cast<std::size_t>(r)]];
    }
    Eigen::VectorXd coef = X.colPivHouseholderQr().solve(rhs);

    double factorial = 1.0;
    for (int i = 2; i <= order; ++i) factorial *= i;
    return factorial * coef(order) / std::pow(window, order);
}

double fit_derivative(const SampledFunction& f, double t0, int order, FitSide side) {
    if (order <= 2) return fit_derivative(f, t0, order, side, 0.1, 4);
    return fit_derivative(f, t0, order, side, 0.2, 6);
}

double estimate_a_from_step(const SampledFunction& K) {
    if (std::abs(K.t0) > 1e-9 * K.h)
        throw InvalidArgument("step response must be sampled from t = 0");
    const double d1 = fit_derivative(K, 0.0, 1, FitSide::Right);
    const double d2 = fit_derivative(K, 0.0, 2, FitSide::Right);
    if (std::abs(d1) < 1e-12)
        throw NumericError("step response has zero initial slope; a is undetermined");
    return -d2 / d1;
}

double estimate_lambda_from_ramp(const SampledFunction& y) {
    if (std::abs(y.t0) > 1e-9 * y.h)
        throw InvalidArgument("ramp response must be sampled from t = 0");
    return fit_derivative(y, 0.0, 4, FitSide::Right) / 2.0;
}

double estimate_lambda_from_pulse(const SampledFunction& y, double t_off) {
    if (t_off != 1.0)
        throw InvalidArgument("pulse estimator is derived for the unit pulse; t_off must be 1");
    const double slope = fit_derivative(y, t_off, 1, FitSide::Right);
    if (1.0 + slope <= 0.0)
        throw NumericError("slope estimate " + std::to_string(slope) +
                           " leaves 1 + y' nonpositive; cannot take the logarithm");
    return -std::log(1.0 + slope);
}

// ---------------------------------------------------------------------------
// Intervals

Interval make_interval(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
        throw InvalidArgument("interval endpoints must be finite with lo <= hi");
    return Interval{lo, hi};
}

Interval propagate_gray_box(const Interval& kprime0, const Interval& c) {
    make_interval(kprime0.lo, kprime0.hi);
    make_interval(c.lo, c.hi);
    if (c.lo <= 0.0 && c.hi >= 0.0)
        throw InvalidArgument("divisor interval contains zero; b is unbounded");
    const double q1 = kprime0.lo / c.lo;
    const double q2 = kprime0.lo / c.hi;
    const double q3 = kprime0.hi / c.lo;
    const double q4 = kprime0.hi / c.hi;
    return Interval{std::min({q1, q2, q3, q4}), std::max({q1, q2, q3, q4})};
}

} // namespace ioident
