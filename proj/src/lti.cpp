#include "ioident/lti.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace ioident {

namespace {

constexpr double kGridTol = 1e-9;

long series_step_count(double t1, double h) {
    if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
    if (!(t1 > 0.0)) throw InvalidArgument("series end time must be positive");
    long count = std::lround(t1 / h);
    if (count < 1 || std::abs(static_cast<double>(count) * h - t1) > 1e-6 * h)
        throw InvalidArgument("series span must be a whole number of steps");
    return count;
}

// One RK4 sweep of dw/dt = f(w) over the uniform grid, recording g(w) at
// every node. Homogeneous problems only, so no input handling is needed.
template <typename Rhs, typename Record>
void rk4_sweep(const Eigen::VectorXd& w0, double h, long steps, Rhs rhs, Record record) {
    Eigen::VectorXd w = w0;
    const Eigen::Index n = w.size();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n);
    record(0, w);
    for (long i = 1; i <= steps; ++i) {
        rhs(w, k1);
        rhs(w + 0.5 * h * k1, k2);
        rhs(w + 0.5 * h * k2, k3);
        rhs(w + h * k3, k4);
        w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!w.allFinite()) throw NumericError("response integration diverged");
        record(i, w);
    }
}

void check_response_time(double t) {
    if (!(t >= 0.0)) throw InvalidArgument("response time must be nonnegative");
}

} // namespace

SampledFunction make_sampled(double h, double t0, std::vector<double> values) {
    if (!(h > 0.0)) throw InvalidArgument("sample step must be positive");
    if (!std::isfinite(t0)) throw InvalidArgument("start time must be finite");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidArgument("sampled values must be finite");
    return SampledFunction{h, t0, std::move(values)};
}

SampledFunction sampled_from_trajectory(const Trajectory& traj) {
    if (traj.times.size() < 2) throw InvalidArgument("trajectory too short to sample");
    const double h = traj.times[1] - traj.times[0];
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        double expected = traj.times[0] + h * static_cast<double>(i);
        if (std::abs(traj.times[i] - expected) > kGridTol * h)
            throw InvalidArgument("trajectory grid is not uniform");
    }
    return make_sampled(h, traj.times[0], traj.outputs);
}

double impulse_response(const LinearSystem& sys, double t, const SolverConfig& cfg) {
    check_response_time(t);
    if (sys.n() == 1) return sys.c(0) * sys.b(0) * std::exp(sys.A(0, 0) * t);
    if (t == 0.0) return sys.c * sys.b;
    long steps = std::max<long>(1, std::lround(std::ceil(t / cfg.h)));
    double h = t / static_cast<double>(steps);
    double out = 0.0;
    rk4_sweep(
        sys.b, h, steps, [&](const Eigen::VectorXd& w, Eigen::VectorXd& dw) { dw = sys.A * w; },
        [&](long i, const Eigen::VectorXd& w) {
            if (i == steps) out = sys.c * w;
        });
    return out;
}

double step_response(const LinearSystem& sys, double t, const SolverConfig& cfg) {
    check_response_time(t);
    if (t == 0.0) return 0.0;
    const int n = sys.n();
    long steps = std::max<long>(1, std::lround(std::ceil(t / cfg.h)));
    double h = t / static_cast<double>(steps);
    Eigen::VectorXd w0(n + 1);
    w0.head(n) = sys.b;
    w0(n) = 0.0;
    double out = 0.0;
    rk4_sweep(
        w0, h, steps,
        [&](const Eigen::VectorXd& w, Eigen::VectorXd& dw) {
            dw.head(n) = sys.A * w.head(n);
            dw(n) = sys.c * w.head(n);
        },
        [&](long i, const Eigen::VectorXd& w) {
            if (i == steps) out = w(n);
        });
    return out;
}

SampledFunction impulse_response_series(const LinearSystem& sys, double t1, double h) {
    long steps = series_step_count(t1, h);
    std::vector<double> values(static_cast<std::size_t>(steps) + 1);
    rk4_sweep(
        sys.b, h, steps, [&](const Eigen::VectorXd& w, Eigen::VectorXd& dw) { dw = sys.A * w; },
        [&](long i, const Eigen::VectorXd& w) { values[static_cast<std::size_t>(i)] = sys.c * w; });
    return SampledFunction{h, 0.0, std::move(values)};
}

SampledFunction step_response_series(const LinearSystem& sys, double t1, double h) {
    long steps = series_step_count(t1, h);
    const int n = sys.n();
    Eigen::VectorXd w0(n + 1);
    w0.head(n) = sys.b;
    w0(n) = 0.0;
    std::vector<double> values(static_cast<std::size_t>(steps) + 1);
    rk4_sweep(
        w0, h, steps,
        [&](const Eigen::VectorXd& w, Eigen::VectorXd& dw) {
            dw.head(n) = sys.A * w.head(n);
            dw(n) = sys.c * w.head(n);
        },
        [&](long i, const Eigen::VectorXd& w) { values[static_cast<std::size_t>(i)] = w(n); });
    return SampledFunction{h, 0.0, std::move(values)};
}

SampledFunction convolve(const SampledFunction& k, const SampledFunction& u) {
    if (k.size() < 2 || u.size() < 2) throw InvalidArgument("convolution needs >= 2 samples");
    if (std::abs(k.h - u.h) > kGridTol * k.h) throw InvalidArgument("grid steps differ");
    if (std::abs(k.t0) > kGridTol * k.h || std::abs(u.t0) > kGridTol * u.h)
        throw InvalidArgument("convolution inputs must start at t = 0");
    if (k.size() < u.size())
        throw InvalidArgument("impulse-response samples must cover the input span");
    const double h = k.h;
    const std::size_t n = u.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.5 * (k.values[i] * u.values[0] + k.values[0] * u.values[i]);
        for (std::size_t j = 1; j < i; ++j) acc += k.values[i - j] * u.values[j];
        y[i] = h * acc;
    }
    return SampledFunction{h, 0.0, std::move(y)};
}

double steady_state_gain(const LinearSystem& sys) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.A);
    if (!lu.isInvertible()) throw NumericError("steady-state gain undefined: A is singular");
    return -(sys.c * lu.solve(sys.b))(0);
}

bool is_hurwitz(const LinearSystem& sys) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A, false);
    return es.eigenvalues().real().maxCoeff() < 0.0;
}

std::vector<double> markov_parameters(const LinearSystem& sys, int m) {
    if (m < 1) throw InvalidArgument("need at least one Markov parameter");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m));
    Eigen::VectorXd v = sys.b;
    for (int i = 0; i < m; ++i) {
        out.push_back(sys.c * v);
        v = sys.A * v;
    }
    return out;
}

Eigen::MatrixXd reachability_matrix(const LinearSystem& sys) {
    const int n = sys.n();
    Eigen::MatrixXd R(n, n);
    Eigen::VectorXd v = sys.b;
    for (int j = 0; j < n; ++j) {
        R.col(j) = v;
        v = sys.A * v;
    }
    return R;
}

Eigen::MatrixXd observability_matrix(const LinearSystem& sys) {
    const int n = sys.n();
    Eigen::MatrixXd O(n, n);
    Eigen::RowVectorXd w = sys.c;
    for (int i = 0; i < n; ++i) {
        O.row(i) = w;
        w = w * sys.A;
    }
    return O;
}

namespace {

int rank_by_svd(const Eigen::MatrixXd& M, double tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0)) ++rank;
    return rank;
}

} // namespace

MinimalityReport minimality(const LinearSystem& sys, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("rank tolerance must be positive");
    MinimalityReport report;
    report.reach_rank = rank_by_svd(reachability_matrix(sys), tol);
    report.obs_rank = rank_by_svd(observability_matrix(sys), tol);
    report.minimal = report.reach_rank == sys.n() && report.obs_rank == sys.n();
    return report;
}

bool io_equivalent(const LinearSystem& s1, const LinearSystem& s2, double tol) {
    if (!minimality(s1).minimal || !minimality(s2).minimal)
        throw InvalidArgument("i/o equivalence test requires minimal systems");
    const int m = 2 * std::max(s1.n(), s2.n());
    const auto m1 = markov_parameters(s1, m);
    const auto m2 = markov_parameters(s2, m);
    double scale = 0.0;
    for (int i = 0; i < m; ++i)
        scale = std::max({scale, std::abs(m1[static_cast<std::size_t>(i)]),
                          std::abs(m2[static_cast<std::size_t>(i)])});
    if (scale == 0.0) return true;
    for (int i = 0; i < m; ++i)
        if (std::abs(m1[static_cast<std::size_t>(i)] - m2[static_cast<std::size_t>(i)]) >
            tol * scale)
            return false;
    return true;
}

Eigen::MatrixXd find_similarity(const LinearSystem& s1, const LinearSystem& s2, double tol) {
    if (s1.n() != s2.n()) throw InvalidArgument("similarity requires equal state dimension");
    if (!io_equivalent(s1, s2, tol)) throw NumericError("systems are not i/o equivalent");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(reachability_matrix(s1));
    if (!lu.isInvertible()) throw NumericError("singular reachability matrix");
    Eigen::MatrixXd T = reachability_matrix(s2) * lu.inverse();

    Eigen::FullPivLU<Eigen::MatrixXd> luT(T);
    if (!luT.isInvertible()) throw NumericError("similarity transform is singular");
    Eigen::MatrixXd Tinv = luT.inverse();

    const double certificate = (T * s1.A * Tinv - s2.A).norm() + (T * s1.b - s2.b).norm() +
                               (s1.c * Tinv - s2.c).norm();
    const double scale = 1.0 + s2.A.norm() + s2.b.norm() + s2.c.norm();
    if (certificate > 1e-6 * scale)
        throw NumericError("similarity certificate failed (residual " +
                           std::to_string(certificate) + ")");
    return T;
}

std::complex<double> frequency_response(const LinearSystem& sys, std::complex<double> sigma) {
    const int n = sys.n();
    Eigen::MatrixXcd M = sigma * Eigen::MatrixXcd::Identity(n, n) - sys.A.cast<std::complex<double>>();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible())
        throw NumericError("resolvent is singular: sigma is an eigenvalue of A");
    Eigen::VectorXcd x = lu.solve(sys.b.cast<std::complex<double>>());
    return (sys.c.cast<std::complex<double>>() * x)(0);
}

SampledFunction deconvolve_impulse(const SampledFunction& y, const SampledFunction& u,
                                   double ridge) {
    const std::size_t n = y.size();
    if (n < 3 || u.size() != n) throw InvalidArgument("deconvolution needs matching grids (>= 3 samples)");
    if (std::abs(y.h - u.h) > kGridTol * y.h) throw InvalidArgument("grid steps differ");
    if (std::abs(y.t0) > kGridTol * y.h || std::abs(u.t0) > kGridTol * u.h)
        throw InvalidArgument("deconvolution inputs must start at t = 0");
    const double h = y.h;
    double umax = 0.0;
    for (double v : u.values) umax = std::max(umax, std::abs(v));
    if (umax == 0.0) throw InvalidArgument("cannot deconvolve: input is identically zero");

    std::vector<double> k(n, 0.0);

    if (ridge == 0.0) {
        // Forward substitution on the triangular system. The first-kind
        // discretization leaves one degree of freedom; it is closed by a
        // vanishing second difference of k at the start, solved jointly with
        // the first two equations.
        if (std::abs(u.values[0]) <= 1e-12 * umax)
            throw NumericError(
                "triangular deconvolution needs a nonzero first input sample; use ridge > 0");
        Eigen::Matrix3d Mstart;
        Eigen::Vector3d rstart;
        Mstart << 0.5 * u.values[1], 0.5 * u.values[0], 0.0, //
            0.5 * u.values[2], u.values[1], 0.5 * u.values[0], //
            1.0, -2.0, 1.0;
        rstart << y.values[1] / h, y.values[2] / h, 0.0;
        Eigen::FullPivLU<Eigen::Matrix3d> lu(Mstart);
        if (!lu.isInvertible()) throw NumericError("deconvolution starter system is singular");
        Eigen::Vector3d kstart = lu.solve(rstart);
        k[0] = kstart(0);
        k[1] = kstart(1);
        k[2] = kstart(2);
        for (std::size_t i = 3; i < n; ++i) {
            double acc = 0.5 * u.values[i] * k[0];
            for (std::size_t j = 1; j < i; ++j) acc += u.values[j] * k[i - j];
            k[i] = (y.values[i] / h - acc) / (0.5 * u.values[0]);
        }
    } else {
        constexpr std::size_t kDenseLimit = 2048;
        if (n > kDenseLimit)
            throw InvalidArgument(
                "ridge-regularized deconvolution is dense; limit the record to " +
                std::to_string(kDenseLimit) + " samples or use ridge = 0");
        const Eigen::Index rows = static_cast<Eigen::Index>(n) - 1;
        const Eigen::Index cols = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
        Eigen::VectorXd rhs(rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const std::size_t i = static_cast<std::size_t>(r) + 1;
            M(r, 0) = 0.5 * h * u.values[i];
            M(r, static_cast<Eigen::Index>(i)) += 0.5 * h * u.values[0];
            for (std::size_t j = 1; j < i; ++j)
                M(r, static_cast<Eigen::Index>(i - j)) += h * u.values[j];
            rhs(r) = y.values[i];
        }
        Eigen::MatrixXd normal = M.transpose() * M;
        double lambda = ridge;
        if (lambda < 0.0) lambda = 1e-8 * normal.trace() / static_cast<double>(rows);
        normal.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
        if (ldlt.info() != Eigen::Success)
            throw NumericError("deconvolution normal equations are not solvable");
        Eigen::VectorXd sol = ldlt.solve(M.transpose() * rhs);
        for (std::size_t i = 0; i < n; ++i) k[i] = sol(static_cast<Eigen::Index>(i));
    }
    return SampledFunction{h, 0.0, std::move(k)};
}

ScalarTriple symmetry_orbit(const ScalarTriple& triple, double T) {
    if (T == 0.0) throw InvalidArgument("symmetry scale T must be nonzero");
    return ScalarTriple{triple.a, T * triple.b, triple.c / T};
}

} // namespace ioident
