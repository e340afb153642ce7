#pragma once

#include <span>
#include <string>
#include <vector>

#include "ioident/lti.hpp"
#include "ioident/sim.hpp"

namespace ioident {

/// Output sensitivities dy/dtheta_j along a trajectory, column order matching
/// free_params. Carries the model output as well, so a fit gets residuals and
/// Jacobian from one augmented integration.
struct SensitivityTrajectory {
    std::vector<double> times;
    std::vector<std::string> free_params;
    Eigen::MatrixXd dy_dtheta; // times x p
    std::vector<double> outputs;
};

/// Integrates the variational system xdot = f, sdot_j = (df/dx) s_j +
/// df/dtheta_j with s_j(0) = 0 (initial conditions are parameter-independent)
/// and assembles dy/dtheta_j = (dg/dx) s_j + dg/dtheta_j on the grid. All
/// partials are exact symbolic derivatives of the model expressions. An empty
/// `free_params` selects every declared parameter.
SensitivityTrajectory sensitivity_trajectories(const GeneralSystem& sys, const ParamMap& params,
                                               const InputSignal& sig, double t0, double t1,
                                               const SolverConfig& cfg = {},
                                               std::vector<std::string> free_params = {},
                                               std::span<const double> extra_times = {});

/// Identifiability Gram matrix report: G = integral of S^T S (trapezoid over
/// the trajectory grid), its eigensystem in descending order, the rank at
/// threshold rel_tol * lambda_max, and the eigenvectors below the threshold
/// (locally unidentifiable directions).
struct GramReport {
    std::vector<std::string> params;
    Eigen::MatrixXd G;
    Eigen::VectorXd eigenvalues;     // descending
    Eigen::MatrixXd eigenvectors;    // column i belongs to eigenvalues(i)
    int rank = 0;
    Eigen::MatrixXd null_directions; // columns
    double threshold = 0.0;          // absolute cutoff applied
};

GramReport gram_matrix(const SensitivityTrajectory& S, double rel_tol = 1e-6);

/// Fisher information over the sample grid (sum, not integral) under i.i.d.
/// Gaussian noise, and the Cramer-Rao variance lower bounds from its
/// pseudo-inverse. A parameter overlapping an information-null direction gets
/// an infinite bound.
struct CramerRaoReport {
    std::vector<std::string> params;
    Eigen::MatrixXd fim;
    Eigen::VectorXd crb;
    double sigma_noise = 0.0;
};

CramerRaoReport fisher_cramer_rao(const SensitivityTrajectory& S, double sigma_noise,
                                  double rel_tol = 1e-6, double abs_tol = 1e-12);

enum class FitSide { Left, Right, Central };

/// order-th derivative of sampled data at t0, from a least-squares polynomial
/// fit of the given degree over a one-sided or centered window. Returns
/// order! times the fitted coefficient. The window must contain at least
/// degree + 2 samples.
double fit_derivative(const SampledFunction& f, double t0, int order, FitSide side, double window,
                      int degree);

/// Defaults: window 0.1 / degree 4 for order <= 2, window 0.2 / degree 6
/// above.
double fit_derivative(const SampledFunction& f, double t0, int order, FitSide side);

/// -K''(0)/K'(0) from a sampled step response starting at t = 0.
double estimate_a_from_step(const SampledFunction& K);

/// y''''(0+)/2 from the lambda-system response to a unit ramp.
double estimate_lambda_from_ramp(const SampledFunction& y);

/// -ln(1 + y'(t_off+)) from the lambda-system response to the unit pulse;
/// only t_off = 1 is supported, matching the formula's derivation.
double estimate_lambda_from_pulse(const SampledFunction& y, double t_off);

/// Closed real interval with double endpoints (no outward rounding).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

Interval make_interval(double lo, double hi);
inline Interval point_interval(double v) { return Interval{v, v}; }

/// Gray-box propagation b = K'(0)/c by exact interval division; the divisor
/// interval must exclude zero.
Interval propagate_gray_box(const Interval& kprime0, const Interval& c);

} // namespace ioident
