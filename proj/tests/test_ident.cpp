#include <doctest.h>

#include <cmath>
#include <limits>

#include "ioident/ident.hpp"
#include "testutil.hpp"

using namespace ioident;

namespace {

SampledFunction sample_closed_form(const ModelRegistryEntry& entry, const ParamMap& params,
                                   const InputSignal& probe, double t1, double h) {
    std::vector<double> values;
    const auto steps = static_cast<std::size_t>(std::lround(t1 / h));
    values.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        values.push_back(closed_form_output(entry, params, probe, h * static_cast<double>(i)));
    return make_sampled(h, 0.0, std::move(values));
}

} // namespace

TEST_CASE("step input carries no lambda sensitivity; ramps do") {
    auto entry = get_registry_model("lambda-system");
    const ParamMap params{{"lambda", 1.0}, {"a_tot", 2.0}};

    SensitivityTrajectory step_sens = sensitivity_trajectories(
        entry.system, params, sig::Step{1.0}, 0.0, 5.0, {}, {"lambda"});
    CHECK(step_sens.dy_dtheta.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(step_sens.dy_dtheta(0, 0) == 0.0); // zero at t = 0 with fixed x0

    SensitivityTrajectory ramp_sens = sensitivity_trajectories(
        entry.system, params, sig::Ramp{1.0}, 0.0, 5.0, {}, {"lambda"});
    CHECK(ramp_sens.dy_dtheta.cwiseAbs().maxCoeff() >= 0.05);
}

TEST_CASE("scalar-lti sensitivities match the differentiated closed form") {
    auto entry = get_registry_model("scalar-lti");
    SensitivityTrajectory sens = sensitivity_trajectories(
        entry.system, entry.default_params, sig::Step{1.0}, 0.0, 5.0);
    REQUIRE(sens.free_params == std::vector<std::string>({"a", "b", "c"}));
    // d/db and d/dc of (bc/a)(1 - e^{-at}) u0 at (1,1,1) are both 1 - e^{-t}.
    double worst = 0.0;
    for (std::size_t i = 0; i < sens.times.size(); ++i) {
        const double expected = 1.0 - std::exp(-sens.times[i]);
        worst = std::max(worst, std::abs(sens.dy_dtheta(static_cast<Eigen::Index>(i), 1) -
                                         expected));
        worst = std::max(worst, std::abs(sens.dy_dtheta(static_cast<Eigen::Index>(i), 2) -
                                         expected));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("sensitivities agree with central differences (spot check)") {
    auto entry = get_registry_model("lambda-system");
    const InputSignal probe = sig::Ramp{1.0};
    SensitivityTrajectory sens =
        sensitivity_trajectories(entry.system, entry.default_params, probe, 0.0, 3.0);
    for (std::size_t j = 0; j < sens.free_params.size(); ++j) {
        const std::string& name = sens.free_params[j];
        const double theta = entry.default_params.at(name);
        const double delta = 1e-5 * std::max(1.0, std::abs(theta));
        ParamMap hi = entry.default_params, lo = entry.default_params;
        hi[name] += delta;
        lo[name] -= delta;
        Trajectory up = integrate(entry.system, hi, probe, 0.0, 3.0);
        Trajectory dn = integrate(entry.system, lo, probe, 0.0, 3.0);
        for (std::size_t i = 0; i < up.size(); i += 100) {
            const double fd = (up.outputs[i] - dn.outputs[i]) / (2.0 * delta);
            const double sym =
                sens.dy_dtheta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            CHECK(std::abs(sym - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("free parameter selection validates names") {
    auto entry = get_registry_model("lambda-system");
    CHECK_THROWS_AS(sensitivity_trajectories(entry.system, entry.default_params, sig::Step{1.0},
                                             0.0, 1.0, {}, {"zeta"}),
                    InvalidArgument);
    CHECK_THROWS_AS(sensitivity_trajectories(entry.system, entry.default_params, sig::Step{1.0},
                                             0.0, 1.0, {}, {"lambda", "lambda"}),
                    InvalidArgument);
}

TEST_CASE("Gram spectrum splits identifiable and dead directions") {
    auto entry = get_registry_model("scalar-lti");
    SensitivityTrajectory sens = sensitivity_trajectories(
        entry.system, entry.default_params, sig::Step{1.0}, 0.0, 10.0);
    GramReport gram = gram_matrix(sens);
    CHECK(gram.rank == 2);
    REQUIRE(gram.null_directions.cols() == 1);
    Eigen::Vector3d expected(0.0, 1.0, -1.0); // (0, b, -c) at b = c = 1
    expected.normalize();
    CHECK(std::abs(expected.dot(gram.null_directions.col(0))) >= 0.999);
    // G is the eigenvector-weighted reconstruction of its spectrum.
    const Eigen::MatrixXd rebuilt = gram.eigenvectors *
                                    gram.eigenvalues.asDiagonal() *
                                    gram.eigenvectors.transpose();
    CHECK((rebuilt - gram.G).norm() <= 1e-10 * gram.G.norm());

    SensitivityTrajectory zero;
    zero.times = {0.0, 1.0, 2.0};
    zero.free_params = {"p"};
    zero.dy_dtheta = Eigen::MatrixXd::Zero(3, 1);
    zero.outputs = {0.0, 0.0, 0.0};
    GramReport empty = gram_matrix(zero);
    CHECK(empty.rank == 0);
    CHECK(empty.G(0, 0) == 0.0);

    SensitivityTrajectory tiny = zero;
    tiny.times = {0.0};
    tiny.dy_dtheta = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(gram_matrix(tiny), InvalidArgument);
}

TEST_CASE("Cramer-Rao bounds flag dead directions and scale with noise") {
    auto entry = get_registry_model("lambda-system");
    SensitivityTrajectory sens = sensitivity_trajectories(
        entry.system, entry.default_params, sig::Step{1.0}, 0.0, 5.0, {}, {"lambda", "a_tot"});
    CramerRaoReport crb = fisher_cramer_rao(sens, 0.01);
    CHECK(std::isinf(crb.crb(0)));   // lambda is invisible
    CHECK(std::isfinite(crb.crb(1))); // a_tot is not

    SensitivityTrajectory informative = sensitivity_trajectories(
        entry.system, entry.default_params, sig::Ramp{1.0}, 0.0, 5.0, {}, {"lambda"});
    const double v1 = fisher_cramer_rao(informative, 0.01).crb(0);
    const double v2 = fisher_cramer_rao(informative, 0.02).crb(0);
    CHECK(std::isfinite(v1));
    CHECK(testutil::close(v2 / v1, 4.0, 1e-12)); // doubling sigma quadruples the bound

    CHECK_THROWS_AS(fisher_cramer_rao(informative, 0.0), InvalidArgument);
}

TEST_CASE("near-degenerate rates blow up the lambda_x bound") {
    auto entry = get_registry_model("lambda-system-split");
    auto crb_at = [&](double lambda_z) {
        SensitivityTrajectory sens = sensitivity_trajectories(
            entry.system, {{"lambda_x", 1.0}, {"lambda_z", lambda_z}, {"a_tot", 2.0}},
            sig::Step{1.0}, 0.0, 5.0, {}, {"lambda_x", "lambda_z"});
        return fisher_cramer_rao(sens, 0.01).crb(0);
    };
    const double far = crb_at(0.5);
    const double near = crb_at(0.95);
    CHECK(std::isfinite(far));
    CHECK(near >= 10.0 * far);
}

TEST_CASE("appending samples never shrinks the information spectrum") {
    auto entry = get_registry_model("lambda-system");
    SensitivityTrajectory sens = sensitivity_trajectories(
        entry.system, entry.default_params, sig::Pulse{1.0, 0.0, 1.0}, 0.0, 4.0);
    Eigen::VectorXd previous;
    for (std::size_t cut : {1000UL, 2000UL, 3000UL, sens.times.size()}) {
        SensitivityTrajectory head;
        head.free_params = sens.free_params;
        head.times.assign(sens.times.begin(), sens.times.begin() + static_cast<long>(cut));
        head.dy_dtheta = sens.dy_dtheta.topRows(static_cast<Eigen::Index>(cut));
        const CramerRaoReport report = fisher_cramer_rao(head, 0.01);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.fim);
        if (previous.size()) {
            for (Eigen::Index i = 0; i < previous.size(); ++i)
                CHECK(es.eigenvalues()(i) >= previous(i) - 1e-9 * std::abs(previous(i)) - 1e-12);
        }
        previous = es.eigenvalues();
    }
}

TEST_CASE("windowed polynomial fits extract one-sided derivatives") {
    // K(t) = 1 - e^{-t}: K'(0) = 1.
    const double h = 1e-3;
    std::vector<double> K(201);
    for (std::size_t i = 0; i < K.size(); ++i)
        K[i] = 1.0 - std::exp(-h * static_cast<double>(i));
    const SampledFunction f = make_sampled(h, 0.0, std::move(K));
    CHECK(testutil::close(fit_derivative(f, 0.0, 1, FitSide::Right, 0.1, 4), 1.0, 1e-4));

    // Exact quadratic: the second derivative is exact everywhere, any side.
    std::vector<double> sq(401);
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double t = -0.2 + h * static_cast<double>(i);
        sq[i] = t * t;
    }
    const SampledFunction parabola = make_sampled(h, -0.2, std::move(sq));
    CHECK(testutil::close(fit_derivative(parabola, 0.0, 2, FitSide::Central, 0.1, 4), 2.0, 1e-9));
    CHECK(testutil::close(fit_derivative(parabola, 0.0, 2, FitSide::Left, 0.1, 4), 2.0, 1e-9));
    CHECK(testutil::close(fit_derivative(parabola, 0.0, 0, FitSide::Right, 0.1, 2), 0.0, 1e-12));

    CHECK_THROWS_AS(fit_derivative(f, 0.0, 2, FitSide::Right, 0.1, 1), InvalidArgument);
    CHECK_THROWS_AS(fit_derivative(f, 0.0, 1, FitSide::Right, 0.002, 4), InvalidArgument);
    CHECK_THROWS_AS(fit_derivative(f, 0.0, 5, FitSide::Right, 0.1, 6), InvalidArgument);
}

TEST_CASE("a recovered from sampled step responses") {
    struct Case {
        double a, b, c;
    };
    for (const Case& cs : {Case{2.0, 3.0, 0.5}, Case{1.0, 1.0, 1.0}}) {
        const SampledFunction K = step_response_series(scalar_lti(cs.a, cs.b, cs.c), 1.0, 1e-3);
        CHECK(testutil::close(estimate_a_from_step(K), cs.a, 1e-3 * cs.a));
    }
    SampledFunction flat = make_sampled(1e-3, 0.0, std::vector<double>(200, 0.0));
    CHECK_THROWS_AS(estimate_a_from_step(flat), NumericError);
}

TEST_CASE("lambda from the ramp's fourth derivative, closed-form data") {
    auto entry = get_registry_model("lambda-system");
    for (double lambda : {0.5, 1.0, 2.0}) {
        const SampledFunction y = sample_closed_form(
            entry, {{"lambda", lambda}, {"a_tot", 2.0}}, sig::Ramp{1.0}, 0.5, 1e-3);
        CHECK(testutil::close(estimate_lambda_from_ramp(y), lambda, 0.02 * lambda));
    }
}

TEST_CASE("lambda from the pulse's exit slope, closed-form data") {
    auto entry = get_registry_model("lambda-system");
    for (double lambda : {0.5, 1.0, 2.0}) {
        const SampledFunction y = sample_closed_form(
            entry, {{"lambda", lambda}, {"a_tot", 2.0}}, sig::Pulse{1.0, 0.0, 1.0}, 2.0, 1e-3);
        const double slope = fit_derivative(y, 1.0, 1, FitSide::Right);
        CHECK(testutil::close(slope, std::exp(-lambda) - 1.0, 1e-4));
        CHECK(testutil::close(estimate_lambda_from_pulse(y, 1.0), lambda, 1e-3));
    }
    // A slope below -1 has no admissible lambda.
    std::vector<double> bad(1301);
    for (std::size_t i = 0; i < bad.size(); ++i)
        bad[i] = 2.0 - 1.1 * (1e-3 * static_cast<double>(i));
    const SampledFunction steep = make_sampled(1e-3, 0.0, std::move(bad));
    CHECK_THROWS_AS(estimate_lambda_from_pulse(steep, 1.0), NumericError);
    CHECK_THROWS_AS(estimate_lambda_from_pulse(steep, 0.5), InvalidArgument);
}

TEST_CASE("gray-box interval division") {
    const Interval wide = propagate_gray_box(point_interval(1.0), make_interval(0.01, 0.1));
    CHECK(wide.lo == 10.0);
    CHECK(wide.hi == 100.0);
    const Interval pt = propagate_gray_box(point_interval(1.5), point_interval(0.5));
    CHECK(pt.lo == 3.0);
    CHECK(pt.hi == 3.0);
    const Interval neg = propagate_gray_box(point_interval(1.0), make_interval(-0.2, -0.1));
    CHECK(neg.lo == -10.0);
    CHECK(neg.hi == -5.0);
    CHECK_THROWS_AS(propagate_gray_box(point_interval(1.0), make_interval(-0.1, 0.1)),
                    InvalidArgument);
    CHECK_THROWS_AS(make_interval(2.0, 1.0), InvalidArgument);
}
