#include "ioident/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace ioident {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_increasing(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw InvalidArgument("sample times must be finite");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw InvalidArgument("sample times must be strictly increasing");
    }
}

// Indices of the grid nodes matching each sample time. The grid was built
// with the sample times pinned, so every lookup must land exactly.
std::vector<std::size_t> locate_samples(const std::vector<double>& grid,
                                        const std::vector<double>& samples, double h) {
    std::vector<std::size_t> idx;
    idx.reserve(samples.size());
    const double tol = 1e-6 * h;
    std::size_t j = 0;
    for (double t : samples) {
        while (j < grid.size() && grid[j] < t - tol) ++j;
        if (j >= grid.size() || std::abs(grid[j] - t) > tol)
            throw NumericError("sample time " + std::to_string(t) + " missing from the grid");
        idx.push_back(j);
    }
    return idx;
}

double span_end(const std::vector<double>& times) {
    if (times.empty()) throw InvalidArgument("need at least one sample time");
    if (!(times.back() > 0.0)) throw InvalidArgument("sample times must extend past t = 0");
    if (times.front() < 0.0) throw InvalidArgument("sample times must be nonnegative");
    return times.back();
}

} // namespace

void validate_experiment(const Experiment& e) {
    validate_signal(e.signal);
    if (e.sample_times.size() != e.observations.size())
        throw InvalidArgument("sample count does not match observation count");
    if (e.sample_times.empty()) throw InvalidArgument("experiment has no samples");
    require_increasing(e.sample_times);
    for (double v : e.observations)
        if (!std::isfinite(v)) throw InvalidArgument("observations must be finite");
    if (!(e.sigma_noise >= 0.0)) throw InvalidArgument("noise level must be nonnegative");
}

Experiment synthesize_data(const GeneralSystem& sys, const ParamMap& params,
                           const InputSignal& sig, std::span<const double> sample_times,
                           double sigma_noise, std::uint64_t seed, const SolverConfig& cfg) {
    if (!(sigma_noise >= 0.0)) throw InvalidArgument("noise level must be nonnegative");
    std::vector<double> times(sample_times.begin(), sample_times.end());
    require_increasing(times);
    const double t1 = span_end(times);

    Trajectory traj = integrate(sys, params, sig, 0.0, t1, cfg, times);
    const auto idx = locate_samples(traj.times, times, cfg.h);

    Experiment e;
    e.signal = sig;
    e.sample_times = times;
    e.sigma_noise = sigma_noise;
    e.observations.reserve(times.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma_noise > 0.0 ? sigma_noise : 1.0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        double y = traj.outputs[idx[i]];
        if (sigma_noise > 0.0) y += gauss(rng);
        e.observations.push_back(y);
    }
    return e;
}

// ---------------------------------------------------------------------------
// Least-squares fitting

namespace {

struct Residuals {
    Eigen::VectorXd r; // weighted residuals
    Eigen::MatrixXd J; // weighted Jacobian, rows aligned with r
    double unweighted_jacobian_max = 0.0;
    double model_output_max = 0.0;
    double cost() const { return r.squaredNorm(); }
};

Residuals evaluate_fit(const GeneralSystem& sys, const std::vector<Experiment>& experiments,
                       const ParamMap& fixed, const std::vector<std::string>& free_names,
                       const Eigen::VectorXd& theta, const SolverConfig& cfg) {
    ParamMap params = fixed;
    for (std::size_t j = 0; j < free_names.size(); ++j)
        params[free_names[j]] = theta(static_cast<Eigen::Index>(j));

    std::size_t total = 0;
    for (const auto& e : experiments) total += e.sample_times.size();

    Residuals out;
    out.r.resize(static_cast<Eigen::Index>(total));
    out.J.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(free_names.size()));

    Eigen::Index row = 0;
    for (const auto& e : experiments) {
        const double t1 = span_end(e.sample_times);
        SensitivityTrajectory sens = sensitivity_trajectories(sys, params, e.signal, 0.0, t1, cfg,
                                                              free_names, e.sample_times);
        const auto idx = locate_samples(sens.times, e.sample_times, cfg.h);
        const double w = e.sigma_noise > 0.0 ? 1.0 / e.sigma_noise : 1.0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const double y = sens.outputs[idx[i]];
            out.model_output_max = std::max(out.model_output_max, std::abs(y));
            out.r(row) = w * (y - e.observations[i]);
            for (Eigen::Index j = 0; j < out.J.cols(); ++j) {
                const double s = sens.dy_dtheta(static_cast<Eigen::Index>(idx[i]), j);
                out.unweighted_jacobian_max = std::max(out.unweighted_jacobian_max, std::abs(s));
                out.J(row, j) = w * s;
            }
            ++row;
        }
    }
    return out;
}

} // namespace

FitResult least_squares_fit(const GeneralSystem& sys, const std::vector<Experiment>& experiments,
                            const ParamMap& fixed_params, const ParamMap& theta0,
                            const Bounds& bounds, const FitOptions& options) {
    validate_system(sys);
    if (experiments.empty()) throw InvalidArgument("need at least one experiment");
    for (const auto& e : experiments) validate_experiment(e);
    if (theta0.empty()) throw InvalidArgument("no free parameters to fit");
    for (const auto& [name, v] : theta0)
        if (fixed_params.count(name))
            throw InvalidArgument("parameter '" + name + "' is both free and fixed");

    std::vector<std::string> free_names;
    for (const auto& [name, v] : theta0) free_names.push_back(name);
    const Eigen::Index p = static_cast<Eigen::Index>(free_names.size());

    // Bounds as aligned vectors; unbounded parameters get infinities.
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(p, -kInf);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(p, kInf);
    for (const auto& [name, range] : bounds) {
        auto it = std::find(free_names.begin(), free_names.end(), name);
        if (it == free_names.end())
            throw InvalidArgument("bound given for '" + name + "' which is not a free parameter");
        if (!(range.first <= range.second))
            throw InvalidArgument("bound for '" + name + "' has lo > hi");
        Eigen::Index j = it - free_names.begin();
        lo(j) = range.first;
        hi(j) = range.second;
    }

    Eigen::VectorXd theta(p);
    {
        Eigen::Index j = 0;
        for (const auto& [name, v] : theta0) {
            if (v < lo(j) || v > hi(j))
                throw InvalidArgument("initial guess for '" + name + "' violates its bounds");
            theta(j++) = v;
        }
    }

    auto project = [&](Eigen::VectorXd v) {
        for (Eigen::Index j = 0; j < p; ++j) v(j) = std::clamp(v(j), lo(j), hi(j));
        return v;
    };

    Residuals cur = evaluate_fit(sys, experiments, fixed_params, free_names, theta, options.solver);
    if (cur.unweighted_jacobian_max <= 1e-9 * std::max(1.0, cur.model_output_max))
        throw NumericError(
            "Jacobian is identically zero at the initial guess: these experiments carry no "
            "information about the free parameters");

    FitResult result;
    result.free_params = free_names;
    double cost = cur.cost();
    double damping = options.initial_damping;
    bool converged = false;
    std::string message;
    int iter = 0;

    for (; iter < options.max_iterations && !converged; ++iter) {
        Eigen::MatrixXd normal = cur.J.transpose() * cur.J;
        normal.diagonal().array() += damping;
        Eigen::VectorXd step = Eigen::LDLT<Eigen::MatrixXd>(normal).solve(-cur.J.transpose() *
                                                                          cur.r);
        if (!step.allFinite()) {
            damping *= 10.0;
            if (damping > 1e12) {
                message = "damping blew up; normal equations unsolvable";
                break;
            }
            continue;
        }
        Eigen::VectorXd trial = project(theta + step);
        Residuals next =
            evaluate_fit(sys, experiments, fixed_params, free_names, trial, options.solver);
        const double trial_cost = next.cost();
        if (trial_cost < cost) {
            const Eigen::VectorXd actual = trial - theta;
            const double cost_drop = (cost - trial_cost) / std::max(cost, 1e-300);
            theta = trial;
            cur = std::move(next);
            cost = trial_cost;
            damping = std::max(damping / 10.0, 1e-15);
            if (actual.norm() <= options.step_tol * (theta.norm() + options.step_tol) ||
                cost_drop < options.cost_tol) {
                converged = true;
                message = "converged";
            }
        } else {
            damping *= 10.0;
            if (damping > 1e12) {
                message = "stalled: no damped step reduces the cost";
                break;
            }
        }
    }
    if (!converged && message.empty()) message = "iteration limit reached";

    result.converged = converged;
    result.iterations = iter;
    result.message = message;
    result.cost = cost;
    for (Eigen::Index j = 0; j < p; ++j) result.theta[free_names[static_cast<std::size_t>(j)]] =
        theta(j);

    Eigen::MatrixXd jtj = cur.J.transpose() * cur.J;
    jtj = 0.5 * (jtj + jtj.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jtj);
    if (es.info() != Eigen::Success) throw NumericError("J^T J eigendecomposition failed");
    result.jtj_eigenvalues = es.eigenvalues().reverse();
    result.jtj_eigenvectors = es.eigenvectors().rowwise().reverse();

    const double lambda_max = std::max(0.0, result.jtj_eigenvalues(0));
    const double cutoff = std::max(1e-12 * lambda_max, 1e-300);
    result.covariance = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const double lambda = result.jtj_eigenvalues(k);
        if (lambda > cutoff)
            result.covariance += result.jtj_eigenvectors.col(k) *
                                 result.jtj_eigenvectors.col(k).transpose() / lambda;
    }
    return result;
}

double fit_direction_variance(const FitResult& fit, const Eigen::VectorXd& direction) {
    if (direction.size() != fit.jtj_eigenvalues.size())
        throw InvalidArgument("direction length does not match the free parameter count");
    const double norm = direction.norm();
    if (norm == 0.0) throw InvalidArgument("direction must be nonzero");
    const Eigen::VectorXd v = direction / norm;
    const double lambda_max = std::max(0.0, fit.jtj_eigenvalues(0));
    const double cutoff = std::max(1e-12 * lambda_max, 1e-300);
    double variance = 0.0;
    double null_mass = 0.0;
    for (Eigen::Index k = 0; k < fit.jtj_eigenvalues.size(); ++k) {
        const double comp = fit.jtj_eigenvectors.col(k).dot(v);
        if (fit.jtj_eigenvalues(k) > cutoff)
            variance += comp * comp / fit.jtj_eigenvalues(k);
        else
            null_mass += comp * comp;
    }
    return null_mass > 1e-12 ? kInf : variance;
}

// ---------------------------------------------------------------------------
// Bayesian grid posterior

std::size_t PosteriorGrid::cell_count() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.size();
    return n;
}

std::vector<double> PosteriorGrid::cell_values(std::size_t flat) const {
    std::vector<double> out(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
        out[d] = axes[d][flat % axes[d].size()];
        flat /= axes[d].size();
    }
    return out;
}

std::vector<double> PosteriorGrid::probabilities() const {
    std::vector<double> out(log_weights.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_weights[i]);
    return out;
}

std::size_t PosteriorGrid::mode() const {
    if (log_weights.empty()) throw InvalidArgument("empty posterior grid");
    return static_cast<std::size_t>(
        std::max_element(log_weights.begin(), log_weights.end()) - log_weights.begin());
}

PosteriorGrid uniform_posterior(const std::vector<std::string>& names,
                                const std::vector<std::pair<double, double>>& ranges,
                                int cells_per_axis) {
    return uniform_posterior(names, ranges,
                             std::vector<int>(names.size(), cells_per_axis));
}

PosteriorGrid uniform_posterior(const std::vector<std::string>& names,
                                const std::vector<std::pair<double, double>>& ranges,
                                const std::vector<int>& cells_per_axis) {
    if (names.empty() || names.size() != ranges.size() || names.size() != cells_per_axis.size())
        throw InvalidArgument("posterior grid needs matching names, ranges and cell counts");
    PosteriorGrid grid;
    grid.param_names = names;
    for (std::size_t d = 0; d < ranges.size(); ++d) {
        const auto [lo, hi] = ranges[d];
        const int cells = cells_per_axis[d];
        if (cells < 2) throw InvalidArgument("need at least two cells per axis");
        if (!(lo < hi)) throw InvalidArgument("grid range requires lo < hi");
        std::vector<double> axis(static_cast<std::size_t>(cells));
        for (int i = 0; i < cells; ++i)
            axis[static_cast<std::size_t>(i)] =
                lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells - 1);
        grid.axes.push_back(std::move(axis));
    }
    grid.log_weights.assign(grid.cell_count(),
                            -std::log(static_cast<double>(grid.cell_count())));
    return grid;
}

namespace {

double log_sum_exp(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (m == -kInf) return -kInf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

} // namespace

PosteriorGrid bayes_update(const PosteriorGrid& prior, const Experiment& e,
                           const GeneralSystem& sys, const ParamMap& fixed_params,
                           const SolverConfig& cfg) {
    validate_experiment(e);
    if (!(e.sigma_noise > 0.0))
        throw InvalidArgument("Bayes update needs a positive noise level");
    if (prior.log_weights.size() != prior.cell_count())
        throw InvalidArgument("posterior grid weights have the wrong size");

    const double t1 = span_end(e.sample_times);
    const double inv_two_var = 0.5 / (e.sigma_noise * e.sigma_noise);

    PosteriorGrid post = prior;
    for (std::size_t cell = 0; cell < post.log_weights.size(); ++cell) {
        if (post.log_weights[cell] == -kInf) continue;
        ParamMap params = fixed_params;
        const auto values = post.cell_values(cell);
        for (std::size_t d = 0; d < prior.param_names.size(); ++d)
            params[prior.param_names[d]] = values[d];
        double ll;
        try {
            Trajectory traj = integrate(sys, params, e.signal, 0.0, t1, cfg, e.sample_times);
            const auto idx = locate_samples(traj.times, e.sample_times, cfg.h);
            ll = 0.0;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                const double d = traj.outputs[idx[i]] - e.observations[i];
                ll -= d * d * inv_two_var;
            }
        } catch (const NumericError&) {
            ll = -kInf; // divergent cells carry no posterior mass
        }
        post.log_weights[cell] += ll;
    }

    const double lse = log_sum_exp(post.log_weights);
    if (lse == -kInf)
        throw NumericError("every grid cell has zero likelihood: model and data are inconsistent");
    for (double& lw : post.log_weights) lw -= lse;
    return post;
}

double posterior_mean(const PosteriorGrid& grid, const std::string& param) {
    auto it = std::find(grid.param_names.begin(), grid.param_names.end(), param);
    if (it == grid.param_names.end()) throw InvalidArgument("unknown posterior parameter");
    const std::size_t d = static_cast<std::size_t>(it - grid.param_names.begin());
    double mean = 0.0;
    for (std::size_t cell = 0; cell < grid.log_weights.size(); ++cell)
        mean += std::exp(grid.log_weights[cell]) * grid.cell_values(cell)[d];
    return mean;
}

double posterior_std(const PosteriorGrid& grid, const std::string& param) {
    const double mean = posterior_mean(grid, param);
    auto it = std::find(grid.param_names.begin(), grid.param_names.end(), param);
    const std::size_t d = static_cast<std::size_t>(it - grid.param_names.begin());
    double var = 0.0;
    for (std::size_t cell = 0; cell < grid.log_weights.size(); ++cell) {
        const double dv = grid.cell_values(cell)[d] - mean;
        var += std::exp(grid.log_weights[cell]) * dv * dv;
    }
    return std::sqrt(std::max(0.0, var));
}

} // namespace ioident
