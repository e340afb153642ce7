#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "ioident/ident.hpp"

namespace ioident {

/// One input/output experiment: the applied signal, sampling instants and
/// observed outputs with a known i.i.d. Gaussian noise level. sigma_noise = 0
/// marks noise-free data; fitting then uses unit weights.
struct Experiment {
    InputSignal signal;
    std::vector<double> sample_times;
    std::vector<double> observations;
    double sigma_noise = 0.0;
};

void validate_experiment(const Experiment& e);

/// Simulates the model and adds seeded Gaussian noise. The integration grid
/// contains every sample time exactly, so sigma_noise = 0 reproduces the
/// solver output bit for bit. Deterministic for a fixed seed.
Experiment synthesize_data(const GeneralSystem& sys, const ParamMap& params,
                           const InputSignal& sig, std::span<const double> sample_times,
                           double sigma_noise, std::uint64_t seed, const SolverConfig& cfg = {});

struct FitOptions {
    int max_iterations = 200;
    double initial_damping = 1e-3; // x10 on a failed step, /10 on success
    double step_tol = 1e-8;        // relative step size convergence test
    double cost_tol = 1e-10;       // relative cost decrease convergence test
    SolverConfig solver;
};

struct FitResult {
    std::vector<std::string> free_params;
    ParamMap theta;
    double cost = 0.0;          // sum of squared noise-scaled residuals
    Eigen::MatrixXd covariance; // pseudo-inverse of J^T J at theta
    Eigen::VectorXd jtj_eigenvalues;  // descending
    Eigen::MatrixXd jtj_eigenvectors; // column i belongs to jtj_eigenvalues(i)
    bool converged = false;
    int iterations = 0;
    std::string message;
};

using Bounds = std::map<std::string, std::pair<double, double>>;

/// Damped Gauss-Newton over all experiments, minimizing
/// sum (y_model - obs)^2 / sigma^2. The free parameters are the keys of
/// theta0; everything else must be bound in fixed_params. Box bounds are
/// enforced by projection. Non-convergence returns the best point found with
/// converged = false; a Jacobian that is identically zero at theta0 throws
/// NumericError (nothing to fit).
FitResult least_squares_fit(const GeneralSystem& sys, const std::vector<Experiment>& experiments,
                            const ParamMap& fixed_params, const ParamMap& theta0,
                            const Bounds& bounds = {}, const FitOptions& options = {});

/// Variance of the fitted parameters along a unit direction; +infinity when
/// the direction overlaps the numerically null space of J^T J.
double fit_direction_variance(const FitResult& fit, const Eigen::VectorXd& direction);

/// Discretized posterior over a parameter box. log_weights are kept
/// normalized (log probabilities), cells enumerated row-major with the last
/// axis fastest.
struct PosteriorGrid {
    std::vector<std::string> param_names;
    std::vector<std::vector<double>> axes;
    std::vector<double> log_weights;

    std::size_t cell_count() const;
    /// Parameter values of a flat cell index.
    std::vector<double> cell_values(std::size_t flat) const;
    std::vector<double> probabilities() const;
    std::size_t mode() const;
};

/// Uniform prior on a box, cells_per_axis grid points per parameter
/// (endpoints included).
PosteriorGrid uniform_posterior(const std::vector<std::string>& names,
                                const std::vector<std::pair<double, double>>& ranges,
                                int cells_per_axis = 141);
PosteriorGrid uniform_posterior(const std::vector<std::string>& names,
                                const std::vector<std::pair<double, double>>& ranges,
                                const std::vector<int>& cells_per_axis);

/// One Bayes step: adds each cell's Gaussian log-likelihood of the experiment
/// (one integration per cell) to the prior log-weights, then renormalizes.
/// Updates with several experiments compose sequentially and commute.
PosteriorGrid bayes_update(const PosteriorGrid& prior, const Experiment& e,
                           const GeneralSystem& sys, const ParamMap& fixed_params,
                           const SolverConfig& cfg = {});

double posterior_mean(const PosteriorGrid& grid, const std::string& param);
double posterior_std(const PosteriorGrid& grid, const std::string& param);

} // namespace ioident
