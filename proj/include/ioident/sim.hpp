#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ioident/systems.hpp"

namespace ioident {

/// Classical fixed-step 4th-order Runge-Kutta is the only method; h is the
/// nominal step, refined where signal breakpoints or requested sample times
/// split an interval.
struct SolverConfig {
    double h = 1e-3;
};

struct Trajectory {
    std::vector<double> times;  // strictly increasing grid
    Eigen::MatrixXd states;     // row i = state vector at times[i]
    std::vector<double> inputs; // u(times[i])
    std::vector<double> outputs;

    std::size_t size() const { return times.size(); }
};

/// Integrates the system under the signal over [t0, t1]. The grid is the
/// uniform h-grid joined with the signal's breakpoints and any `extra_times`
/// (both hit exactly). Each RK step stays inside one smooth segment of the
/// input; the closing stage samples the segment's left limit at a breakpoint.
/// `params` are overrides over nothing — every declared parameter must be
/// bound. Throws NumericError when a state leaves [-1e12, 1e12] or turns
/// non-finite.
Trajectory integrate(const GeneralSystem& sys, const ParamMap& params, const InputSignal& sig,
                     double t0, double t1, const SolverConfig& cfg = {},
                     std::span<const double> extra_times = {});

/// Analytic output for a registered (model, signal-class) pair; `params` are
/// overrides over the model's defaults. Throws InvalidArgument when no closed
/// form is registered for the pair.
double closed_form_output(const std::string& model_id, const ParamMap& params,
                          const InputSignal& sig, double t);
double closed_form_output(const ModelRegistryEntry& entry, const ParamMap& params,
                          const InputSignal& sig, double t);

/// Full closed-form state vector alongside the output.
ClosedFormResult closed_form_full(const ModelRegistryEntry& entry, const ParamMap& params,
                                  const InputSignal& sig, double t);

namespace detail {

using OdeRhs =
    std::function<void(double t, double u, const Eigen::VectorXd& x, Eigen::VectorXd& dx)>;
using GridVisitor =
    std::function<void(std::size_t idx, double t, double u, const Eigen::VectorXd& x)>;

/// Uniform h-grid over [t0, t1] merged with breakpoints and extra times.
/// Breakpoints and extras take precedence over coincident uniform nodes.
std::vector<double> build_grid(double t0, double t1, double h,
                               const std::vector<double>& breakpoints,
                               std::span<const double> extra_times);

/// RK4 across consecutive nodes of a prebuilt grid; `visit` is called at
/// every node including the first, with the right-continuous input value.
void rk4_on_grid(const OdeRhs& rhs, const InputSignal& sig, const Eigen::VectorXd& x0,
                 const std::vector<double>& grid, const GridVisitor& visit);

/// Convenience: builds the breakpoint-aware grid, then runs rk4_on_grid.
void rk4_integrate(const OdeRhs& rhs, const InputSignal& sig, const Eigen::VectorXd& x0,
                   double t0, double t1, double h, std::span<const double> extra_times,
                   const GridVisitor& visit);

} // namespace detail

} // namespace ioident
