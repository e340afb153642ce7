#include <doctest.h>

#include <cmath>
#include <random>

#include "ioident/lti.hpp"
#include "testutil.hpp"

using namespace ioident;

TEST_CASE("impulse response values") {
    CHECK(impulse_response(scalar_lti(1.0, 1.0, 1.0), 0.0) == 1.0); // k(0) = c b
    const LinearSystem s = scalar_lti(2.0, 3.0, 0.5);
    CHECK(impulse_response(s, 0.0) == 1.5);
    // k'(0) = -a c b = -3, probed by a one-sided difference quotient.
    const double eps = 1e-7;
    const double slope = (impulse_response(s, eps) - impulse_response(s, 0.0)) / eps;
    CHECK(testutil::close(slope, -3.0, 1e-5));

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = -1.0;
    A(1, 1) = -2.0;
    const LinearSystem diag =
        build_linear_system(A, Eigen::VectorXd::Ones(2), Eigen::RowVectorXd::Ones(2));
    // Oracle: e^{-t} + e^{-2t} at t = 1.
    CHECK(testutil::close(impulse_response(diag, 1.0), 0.50321472440805503, 1e-9));

    CHECK_THROWS_AS(impulse_response(scalar_lti(1, 1, 1), -0.5), InvalidArgument);
}

TEST_CASE("step response values") {
    const LinearSystem unit = scalar_lti(1.0, 1.0, 1.0);
    CHECK(step_response(unit, 0.0) == 0.0);
    CHECK(testutil::close(step_response(unit, 1.0), 0.63212055882855767, 1e-9));
    CHECK(testutil::close(step_response(scalar_lti(2.0, 1.0, 2.0), 1.0), 0.86466471676338730,
                          1e-9));
    CHECK_THROWS_AS(step_response(unit, -1.0), InvalidArgument);
}

TEST_CASE("response series need whole-step spans") {
    const LinearSystem unit = scalar_lti(1.0, 1.0, 1.0);
    const SampledFunction k = impulse_response_series(unit, 2.0, 1e-3);
    CHECK(k.size() == 2001);
    CHECK(k.values[0] == 1.0);
    CHECK_THROWS_AS(impulse_response_series(unit, 2.0005, 1e-3), InvalidArgument);
}

TEST_CASE("convolution against the quadrature step response") {
    const LinearSystem unit = scalar_lti(1.0, 1.0, 1.0);
    const double h = 1e-3;
    const SampledFunction k = impulse_response_series(unit, 2.0, h);
    SampledFunction u = make_sampled(h, 0.0, std::vector<double>(k.size(), 1.0));
    const SampledFunction y = convolve(k, u);
    const SampledFunction K = step_response_series(unit, 2.0, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        worst = std::max(worst, std::abs(y.values[i] - K.values[i]));
    CHECK(worst <= 1e-5);

    // Zero input convolves to zero.
    SampledFunction zero = make_sampled(h, 0.0, std::vector<double>(200, 0.0));
    const SampledFunction yz = convolve(k, zero);
    for (double v : yz.values) CHECK(v == 0.0);

    SampledFunction coarse = make_sampled(2.0 * h, 0.0, std::vector<double>(100, 1.0));
    CHECK_THROWS_AS(convolve(k, coarse), InvalidArgument);
}

TEST_CASE("a unit-mass spike convolves to a one-sample shift") {
    // Spike with unit trapezoid mass: [0, 1/h, 0, ...]. Convolving it with a
    // smooth u reproduces u delayed by one sample, within 2 max|u'| h.
    const double h = 1e-2;
    const std::size_t n = 301;
    std::vector<double> spike(n, 0.0);
    spike[1] = 1.0 / h;
    const SampledFunction delta = make_sampled(h, 0.0, std::move(spike));
    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i)
        smooth[i] = 2.0 + std::sin(h * static_cast<double>(i));
    const SampledFunction u = make_sampled(h, 0.0, std::move(smooth));
    const SampledFunction y = convolve(delta, u);
    double worst = 0.0;
    for (std::size_t i = 2; i < n; ++i) {
        const double shifted = 2.0 + std::sin(h * static_cast<double>(i - 1));
        worst = std::max(worst, std::abs(y.values[i] - shifted));
    }
    CHECK(worst <= 2.0 * 1.0 * h);
}

TEST_CASE("steady-state gain") {
    CHECK(steady_state_gain(scalar_lti(1.0, 1.0, 1.0)) == 1.0);
    CHECK(steady_state_gain(scalar_lti(2.0, 1.0, 2.0)) == 1.0);
    CHECK_THROWS_AS(steady_state_gain(scalar_lti(0.0, 1.0, 1.0)), NumericError);
    CHECK(is_hurwitz(scalar_lti(1.0, 1.0, 1.0)));
    CHECK_FALSE(is_hurwitz(scalar_lti(-0.5, 1.0, 1.0)));
}

TEST_CASE("Markov parameters") {
    CHECK(markov_parameters(scalar_lti(1.0, 2.0, 3.0), 3) == std::vector<double>{6.0, -6.0, 6.0});
    CHECK(markov_parameters(scalar_lti(1.0, 6.0, 1.0), 3) == std::vector<double>{6.0, -6.0, 6.0});
    // The equal-gain pair still differs in its Markov data: -1 vs -4.
    const auto m1 = markov_parameters(scalar_lti(1.0, 1.0, 1.0), 2);
    const auto m2 = markov_parameters(scalar_lti(2.0, 1.0, 2.0), 2);
    CHECK(m1[1] == -1.0);
    CHECK(m2[1] == -4.0);
    CHECK_THROWS_AS(markov_parameters(scalar_lti(1, 1, 1), 0), InvalidArgument);
}

TEST_CASE("minimality ranks") {
    auto ok = minimality(scalar_lti(1.0, 1.0, 1.0));
    CHECK(ok.reach_rank == 1);
    CHECK(ok.obs_rank == 1);
    CHECK(ok.minimal);

    auto dead_input = minimality(scalar_lti(1.0, 0.0, 1.0));
    CHECK(dead_input.reach_rank == 0);
    CHECK_FALSE(dead_input.minimal);

    Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(2, 2);
    const LinearSystem repeated =
        build_linear_system(A, Eigen::VectorXd::Ones(2), Eigen::RowVectorXd::Ones(2));
    auto rep = minimality(repeated);
    CHECK(rep.reach_rank == 1); // [b, -b] collapses
    CHECK_FALSE(rep.minimal);
}

TEST_CASE("i/o equivalence and similarity certificates") {
    CHECK(io_equivalent(scalar_lti(1, 2, 3), scalar_lti(1, 6, 1)));
    CHECK_FALSE(io_equivalent(scalar_lti(1, 1, 1), scalar_lti(2, 1, 2)));
    CHECK_FALSE(io_equivalent(scalar_lti(1, 1, 1), scalar_lti(1, 2, 1)));
    CHECK_THROWS_AS(io_equivalent(scalar_lti(1, 0, 1), scalar_lti(1, 1, 1)), InvalidArgument);

    Eigen::MatrixXd T = find_similarity(scalar_lti(1, 2, 3), scalar_lti(1, 6, 1));
    CHECK(testutil::close(T(0, 0), 3.0, 1e-12));
    Eigen::MatrixXd identity = find_similarity(scalar_lti(1, 2, 3), scalar_lti(1, 2, 3));
    CHECK(testutil::close(identity(0, 0), 1.0, 1e-12));
    CHECK_THROWS_AS(find_similarity(scalar_lti(1, 1, 1), scalar_lti(2, 1, 2)), NumericError);

    // A genuine 2-state change of basis is recovered and certified.
    Eigen::MatrixXd A(2, 2);
    A << -1.0, 0.3, 0.2, -2.0;
    Eigen::VectorXd b(2);
    b << 1.0, -0.5;
    Eigen::RowVectorXd c(2);
    c << 0.7, 1.1;
    const LinearSystem s1 = build_linear_system(A, b, c);
    Eigen::MatrixXd P(2, 2);
    P << 2.0, 1.0, 0.5, 1.5;
    const Eigen::MatrixXd Pinv = P.inverse();
    const LinearSystem s2 = build_linear_system(P * A * Pinv, P * b, c * Pinv);
    CHECK(io_equivalent(s1, s2, 1e-8));
    Eigen::MatrixXd found = find_similarity(s1, s2, 1e-8);
    CHECK((found - P).norm() <= 1e-8 * P.norm());
}

TEST_CASE("frequency response") {
    CHECK(testutil::close(frequency_response(scalar_lti(1, 1, 1), {0.0, 0.0}).real(), 1.0,
                          1e-14));
    CHECK(testutil::close(frequency_response(scalar_lti(2, 3, 0.5), {2.0, 0.0}).real(), 0.375,
                          1e-14));
    CHECK_THROWS_AS(frequency_response(scalar_lti(1, 1, 1), {-1.0, 0.0}), NumericError);
}

TEST_CASE("deconvolution recovers the impulse response from step data") {
    const LinearSystem unit = scalar_lti(1.0, 1.0, 1.0);
    const double h = 1e-3;
    const SampledFunction y = step_response_series(unit, 2.0, h);
    SampledFunction u = make_sampled(h, 0.0, std::vector<double>(y.size(), 1.0));
    const SampledFunction k = deconvolve_impulse(y, u, 0.0);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double exact = std::exp(-k.time_at(i));
        num += (k.values[i] - exact) * (k.values[i] - exact);
        den += exact * exact;
    }
    CHECK(std::sqrt(num / den) <= 1e-2);

    SampledFunction silent = make_sampled(h, 0.0, std::vector<double>(y.size(), 0.0));
    CHECK_THROWS_AS(deconvolve_impulse(y, silent, 0.0), InvalidArgument);
}

TEST_CASE("probing with a near-impulse returns the response itself") {
    // The response to a unit-mass spike at one sample is k; deconvolving it
    // against that spike must reproduce the measured curve (one regularized
    // sample at the start aside).
    const LinearSystem unit = scalar_lti(1.0, 1.0, 1.0);
    const double h = 5e-3;
    const std::size_t n = 401;
    std::vector<double> y_values(n);
    for (std::size_t i = 0; i < n; ++i)
        y_values[i] = impulse_response(unit, h * static_cast<double>(i));
    const SampledFunction y = make_sampled(h, 0.0, std::move(y_values));
    std::vector<double> spike(n, 0.0);
    spike[1] = 1.0 / h;
    const SampledFunction u = make_sampled(h, 0.0, std::move(spike));

    const SampledFunction k = deconvolve_impulse(y, u, kAutoRidge);
    double worst = 0.0;
    for (std::size_t i = 1; i + 5 < n; ++i)
        worst = std::max(worst, std::abs(k.values[i] - y.values[i]));
    CHECK(worst <= 2.0 * h); // off by at most the one-sample shift

    // The dense ridge path refuses records it cannot hold.
    const std::size_t big = 3000;
    SampledFunction long_y = make_sampled(h, 0.0, std::vector<double>(big, 1.0));
    SampledFunction long_u = make_sampled(h, 0.0, std::vector<double>(big, 1.0));
    CHECK_THROWS_AS(deconvolve_impulse(long_y, long_u, 1e-8), InvalidArgument);
}

TEST_CASE("narrow unit-area pulses converge to the impulse response") {
    Eigen::MatrixXd A(2, 2);
    A << -1.0, 0.4, 0.0, -2.0;
    Eigen::VectorXd b(2);
    b << 1.0, 1.0;
    Eigen::RowVectorXd c(2);
    c << 1.0, 0.5;
    const LinearSystem lin = build_linear_system(A, b, c);
    const GeneralSystem gen = lti_to_general(lin);

    auto mollified_error = [&](double width) {
        Trajectory traj = integrate(gen, {}, sig::ImpulseApprox{1.0, width}, 0.0, 3.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (traj.times[i] < 0.5) continue; // compare after the pulse has ended
            worst = std::max(worst,
                             std::abs(traj.outputs[i] - impulse_response(lin, traj.times[i])));
        }
        return worst;
    };
    const double coarse = mollified_error(0.2);
    const double medium = mollified_error(0.1);
    const double fine = mollified_error(0.05);
    CHECK(medium < coarse);
    CHECK(fine < medium);
    CHECK(fine <= 0.05);
}

TEST_CASE("symmetry orbit preserves the i/o invariants") {
    const ScalarTriple t1 = symmetry_orbit({1.0, 2.0, 3.0}, 3.0);
    CHECK(t1.a == 1.0);
    CHECK(t1.b == 6.0);
    CHECK(t1.c == 1.0);
    const ScalarTriple same = symmetry_orbit({2.0, 3.0, 0.5}, 1.0);
    CHECK(same.b == 3.0);
    CHECK(same.c == 0.5);
    const ScalarTriple flipped = symmetry_orbit({2.0, 3.0, 0.5}, -1.0);
    const auto before = markov_parameters(scalar_lti(2.0, 3.0, 0.5), 6);
    const auto after = markov_parameters(scalar_lti(flipped.a, flipped.b, flipped.c), 6);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
    CHECK_THROWS_AS(symmetry_orbit({1.0, 1.0, 1.0}, 0.0), InvalidArgument);
}

TEST_CASE("orbit invariance holds across random triples and scales") {
    std::mt19937_64 rng(445566);
    std::uniform_real_distribution<double> coeff(0.2, 3.0);
    std::uniform_real_distribution<double> scale(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
        double T = scale(rng);
        if (std::abs(T) < 0.05) T = 0.5;
        const ScalarTriple orbit = symmetry_orbit({a, b, c}, T);
        const auto before = markov_parameters(scalar_lti(a, b, c), 6);
        const auto after = markov_parameters(scalar_lti(orbit.a, orbit.b, orbit.c), 6);
        for (std::size_t i = 0; i < before.size(); ++i)
            CHECK(std::abs(before[i] - after[i]) <=
                  1e-12 * std::max(1.0, std::abs(before[i])));
    }
}

TEST_CASE("scalar equivalence criterion over the reference grid") {
    const std::vector<double> as{0.5, 1.0, 2.0};
    const std::vector<double> gains{0.5, 1.0, 2.0, 4.0};
    for (double a1 : as)
        for (double b1 : gains)
            for (double c1 : gains)
                for (double a2 : as)
                    for (double b2 : gains)
                        for (double c2 : gains) {
                            const bool law = a1 == a2 && b1 * c1 == b2 * c2;
                            CHECK(io_equivalent(scalar_lti(a1, b1, c1),
                                                scalar_lti(a2, b2, c2)) == law);
                        }
}

TEST_CASE("differentiating K recovers k and integrating k recovers K") {
    const LinearSystem s = scalar_lti(1.3, 0.8, 1.1);
    const double h = 1e-3;
    const SampledFunction K = step_response_series(s, 2.0, h);
    const SampledFunction k = impulse_response_series(s, 2.0, h);

    double diff_err = 0.0;
    for (std::size_t i = 1; i + 1 < K.size(); ++i) {
        const double dK = (K.values[i + 1] - K.values[i - 1]) / (2.0 * h);
        diff_err = std::max(diff_err, std::abs(dK - k.values[i]));
    }
    CHECK(diff_err <= 1e-4);

    double acc = 0.0, int_err = 0.0;
    for (std::size_t i = 1; i < k.size(); ++i) {
        acc += 0.5 * h * (k.values[i - 1] + k.values[i]);
        int_err = std::max(int_err, std::abs(acc - K.values[i]));
    }
    CHECK(int_err <= 1e-6);
}

TEST_CASE("sampled functions load only from uniform trajectories") {
    auto entry = get_registry_model("scalar-lti");
    // The 0.35 breakpoint falls off the h = 0.2 lattice, so the grid is not uniform.
    Trajectory traj = integrate(entry.system, entry.default_params, sig::Pulse{1.0, 0.35, 2.0},
                                0.0, 1.0, SolverConfig{0.2});
    CHECK_THROWS_AS(sampled_from_trajectory(traj), InvalidArgument);
    Trajectory ok = integrate(entry.system, entry.default_params, sig::Step{1.0}, 0.0, 1.0,
                              SolverConfig{0.2});
    CHECK(sampled_from_trajectory(ok).size() == ok.size());
}
