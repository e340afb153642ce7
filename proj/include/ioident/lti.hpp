#pragma once

#include <complex>
#include <vector>

#include "ioident/sim.hpp"

namespace ioident {

/// Real-valued function sampled on a uniform grid t0, t0+h, t0+2h, ...
struct SampledFunction {
    double h = 0.0;
    double t0 = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t i) const { return t0 + h * static_cast<double>(i); }
};

/// Validates h > 0 and finite values.
SampledFunction make_sampled(double h, double t0, std::vector<double> values);

/// Extracts the output series of a trajectory whose grid happens to be
/// uniform (tolerance 1e-9 * h); throws InvalidArgument otherwise.
SampledFunction sampled_from_trajectory(const Trajectory& traj);

/// Impulse response k(t) = c e^{At} b, from integrating dx/dt = Ax with
/// x(0) = b; closed form c b e^{-a t} in the scalar case.
double impulse_response(const LinearSystem& sys, double t, const SolverConfig& cfg = {});

/// Step response K(t) = integral of k over [0, t], via a quadrature state
/// appended to the impulse-response ODE.
double step_response(const LinearSystem& sys, double t, const SolverConfig& cfg = {});

/// Whole series on the grid 0, h, .., t1 in one integration; t1 must be a
/// whole number of steps.
SampledFunction impulse_response_series(const LinearSystem& sys, double t1, double h);
SampledFunction step_response_series(const LinearSystem& sys, double t1, double h);

/// Trapezoid-rule discrete convolution (k * u)(t) on the common grid. Both
/// functions must share h and start at t0 = 0, and k must span at least as
/// many samples as u; the result has u's length.
SampledFunction convolve(const SampledFunction& k, const SampledFunction& u);

/// -c A^{-1} b. Throws NumericError when A is singular. Callers probing
/// unstable systems can consult is_hurwitz for a warning.
double steady_state_gain(const LinearSystem& sys);

bool is_hurwitz(const LinearSystem& sys);

/// [c b, c A b, ..., c A^{m-1} b].
std::vector<double> markov_parameters(const LinearSystem& sys, int m);

Eigen::MatrixXd reachability_matrix(const LinearSystem& sys);
Eigen::MatrixXd observability_matrix(const LinearSystem& sys);

struct MinimalityReport {
    int reach_rank = 0;
    int obs_rank = 0;
    bool minimal = false;
};

/// Ranks of the reachability and observability matrices by singular values
/// above tol * sigma_max.
MinimalityReport minimality(const LinearSystem& sys, double tol = 1e-9);

/// True iff the first 2*max(n1, n2) Markov parameters agree within tol
/// relative to the largest magnitude. Both systems must be minimal; throws
/// InvalidArgument otherwise.
bool io_equivalent(const LinearSystem& s1, const LinearSystem& s2, double tol = 1e-9);

/// Change of basis T with (T A1 T^{-1}, T b1, c1 T^{-1}) = (A2, b2, c2),
/// computed from the reachability matrices and verified before returning.
/// Requires equal dimension and i/o equivalence.
Eigen::MatrixXd find_similarity(const LinearSystem& s1, const LinearSystem& s2,
                                double tol = 1e-9);

/// c (sigma I - A)^{-1} b. Throws NumericError at eigenvalues of A.
std::complex<double> frequency_response(const LinearSystem& sys, std::complex<double> sigma);

/// Pass as `ridge` to request the default data-scaled regularization
/// 1e-8 * trace(M^T M) / m.
inline constexpr double kAutoRidge = -1.0;

/// Recovers the impulse response from y = k * u by solving the trapezoid
/// convolution system. With ridge = 0 the triangular system is solved by
/// forward substitution (requires u's first sample nonzero); with ridge > 0
/// (or kAutoRidge) a dense ridge least-squares problem is solved, practical
/// up to a few thousand samples.
SampledFunction deconvolve_impulse(const SampledFunction& y, const SampledFunction& u,
                                   double ridge = kAutoRidge);

struct ScalarTriple {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// The rescaling family (a, T b, c / T), T != 0; a and the product b*c are
/// preserved.
ScalarTriple symmetry_orbit(const ScalarTriple& triple, double T);

} // namespace ioident
