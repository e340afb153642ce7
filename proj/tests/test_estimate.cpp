#include <doctest.h>

#include <cmath>

#include "ioident/estimate.hpp"
#include "testutil.hpp"

using namespace ioident;
using testutil::linspace;

TEST_CASE("synthesized data is exact when noise-free and deterministic when seeded") {
    auto entry = get_registry_model("scalar-lti");
    const std::vector<double> times{0.5, 1.0};
    Experiment e = synthesize_data(entry.system, entry.default_params, sig::Step{1.0}, times, 0.0,
                                   99);
    CHECK(testutil::close(e.observations[1], 0.63212055882855767, 1e-8));
    CHECK(e.sigma_noise == 0.0);

    Experiment n1 = synthesize_data(entry.system, entry.default_params, sig::Step{1.0}, times,
                                    0.05, 1234);
    Experiment n2 = synthesize_data(entry.system, entry.default_params, sig::Step{1.0}, times,
                                    0.05, 1234);
    Experiment n3 = synthesize_data(entry.system, entry.default_params, sig::Step{1.0}, times,
                                    0.05, 1235);
    CHECK(n1.observations == n2.observations);
    CHECK(n1.observations != n3.observations);
}

TEST_CASE("noise magnitude matches the requested level") {
    auto entry = get_registry_model("scalar-lti");
    const auto times = linspace(0.01, 2.0, 1000);
    Experiment clean = synthesize_data(entry.system, entry.default_params, sig::Step{1.0}, times,
                                       0.0, 7);
    Experiment noisy = synthesize_data(entry.system, entry.default_params, sig::Step{1.0}, times,
                                       0.01, 7);
    double acc = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double d = noisy.observations[i] - clean.observations[i];
        acc += d * d;
    }
    const double sample_std = std::sqrt(acc / static_cast<double>(times.size()));
    CHECK(sample_std >= 0.008);
    CHECK(sample_std <= 0.012);
}

TEST_CASE("experiment validation") {
    Experiment e;
    e.signal = sig::Step{1.0};
    e.sample_times = {0.5, 0.4};
    e.observations = {1.0, 2.0};
    CHECK_THROWS_AS(validate_experiment(e), InvalidArgument);
    e.sample_times = {0.4};
    CHECK_THROWS_AS(validate_experiment(e), InvalidArgument); // size mismatch
    e.observations = {1.0};
    CHECK_NOTHROW(validate_experiment(e));
    e.sigma_noise = -1.0;
    CHECK_THROWS_AS(validate_experiment(e), InvalidArgument);
}

TEST_CASE("one ramp experiment pins lambda; bounds are honored") {
    auto entry = get_registry_model("lambda-system");
    Experiment ramp = synthesize_data(entry.system, {{"lambda", 1.0}, {"a_tot", 2.0}},
                                      sig::Ramp{1.0}, linspace(0.1, 5.0, 25), 0.0, 3);
    FitResult fit = least_squares_fit(entry.system, {ramp}, {{"a_tot", 2.0}}, {{"lambda", 0.3}},
                                      {{"lambda", {0.01, 10.0}}});
    CHECK(fit.converged);
    CHECK(testutil::close(fit.theta.at("lambda"), 1.0, 1e-6));
    CHECK(fit.cost <= 1e-12);

    CHECK_THROWS_AS(least_squares_fit(entry.system, {ramp}, {{"a_tot", 2.0}},
                                      {{"lambda", 50.0}}, {{"lambda", {0.01, 10.0}}}),
                    InvalidArgument); // theta0 outside its box
    CHECK_THROWS_AS(least_squares_fit(entry.system, {ramp}, {{"lambda", 1.0}, {"a_tot", 2.0}},
                                      {{"lambda", 0.3}}),
                    InvalidArgument); // free and fixed at once
}

TEST_CASE("step experiments carry no information about lambda") {
    auto entry = get_registry_model("lambda-system");
    Experiment step = synthesize_data(entry.system, {{"lambda", 1.0}, {"a_tot", 2.0}},
                                      sig::Step{1.0}, linspace(0.1, 5.0, 25), 0.0, 4);
    CHECK_THROWS_AS(
        least_squares_fit(entry.system, {step}, {{"a_tot", 2.0}}, {{"lambda", 0.3}}),
        NumericError);
}

TEST_CASE("only the product bc is identifiable from i/o data") {
    auto entry = get_registry_model("scalar-lti");
    Experiment step = synthesize_data(entry.system, entry.default_params, sig::Step{1.0},
                                      linspace(0.1, 5.0, 30), 0.0, 5);
    FitResult fit = least_squares_fit(entry.system, {step}, {{"a", 1.0}},
                                      {{"b", 1.3}, {"c", 0.8}});
    CHECK(testutil::close(fit.theta.at("b") * fit.theta.at("c"), 1.0, 1e-6));

    // At the solution the flat direction is (b, -c) and the informative one is
    // the product gradient (c, b).
    const double b_hat = fit.theta.at("b");
    const double c_hat = fit.theta.at("c");
    Eigen::VectorXd flat(2);
    flat << b_hat, -c_hat;
    CHECK(fit_direction_variance(fit, flat) >= 1e6);
    Eigen::VectorXd informative(2);
    informative << c_hat, b_hat;
    CHECK(std::isfinite(fit_direction_variance(fit, informative)));
}

TEST_CASE("fitting pools several experiments") {
    auto entry = get_registry_model("lambda-system");
    const ParamMap truth{{"lambda", 0.8}, {"a_tot", 2.0}};
    Experiment ramp = synthesize_data(entry.system, truth, sig::Ramp{1.0},
                                      linspace(0.2, 4.0, 15), 0.01, 21);
    ramp.sigma_noise = 0.01;
    Experiment pulse = synthesize_data(entry.system, truth, sig::Pulse{1.0, 0.0, 1.0},
                                       linspace(1.1, 3.0, 15), 0.01, 22);
    pulse.sigma_noise = 0.01;
    FitResult fit = least_squares_fit(entry.system, {ramp, pulse}, {{"a_tot", 2.0}},
                                      {{"lambda", 2.5}});
    CHECK(fit.converged);
    CHECK(testutil::close(fit.theta.at("lambda"), 0.8, 0.05));
}

TEST_CASE("posterior grids normalize, peak at the truth, and ignore dead probes") {
    auto entry = get_registry_model("lambda-system");
    const ParamMap truth{{"lambda", 1.0}, {"a_tot", 2.0}};
    const ParamMap fixed{{"a_tot", 2.0}};
    const PosteriorGrid prior = uniform_posterior({"lambda"}, {{0.2, 3.0}}, 141);
    CHECK(prior.cell_count() == 141);

    Experiment pulse = synthesize_data(entry.system, truth, sig::Pulse{1.0, 0.0, 1.0},
                                       linspace(1.05, 2.95, 16), 0.0, 7);
    pulse.sigma_noise = 0.01;
    PosteriorGrid post = bayes_update(prior, pulse, entry.system, fixed);
    double total = 0.0;
    for (double p : post.probabilities()) total += p;
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(std::abs(post.cell_values(post.mode())[0] - 1.0) <= (3.0 - 0.2) / 140.0 + 1e-12);

    Experiment step = synthesize_data(entry.system, truth, sig::Step{1.0},
                                      linspace(0.25, 3.0, 10), 0.0, 8);
    step.sigma_noise = 0.01;
    PosteriorGrid unchanged = bayes_update(prior, step, entry.system, fixed);
    for (double p : unchanged.probabilities()) CHECK(std::abs(p - 1.0 / 141.0) <= 1e-12);

    CHECK_THROWS_AS(bayes_update(prior, step, entry.system, fixed, SolverConfig{0.0}),
                    InvalidArgument);
    Experiment no_sigma = pulse;
    no_sigma.sigma_noise = 0.0;
    CHECK_THROWS_AS(bayes_update(prior, no_sigma, entry.system, fixed), InvalidArgument);
}

TEST_CASE("updates with independent experiments commute") {
    auto entry = get_registry_model("lambda-system");
    const ParamMap truth{{"lambda", 1.2}, {"a_tot", 2.0}};
    const ParamMap fixed{{"a_tot", 2.0}};
    const PosteriorGrid prior = uniform_posterior({"lambda"}, {{0.4, 2.4}}, 41);
    Experiment e1 = synthesize_data(entry.system, truth, sig::Pulse{1.0, 0.0, 1.0},
                                    linspace(1.05, 2.0, 8), 0.0, 31);
    e1.sigma_noise = 0.02;
    Experiment e2 = synthesize_data(entry.system, truth, sig::Ramp{1.0},
                                    linspace(0.3, 2.0, 8), 0.0, 32);
    e2.sigma_noise = 0.02;

    PosteriorGrid ab = bayes_update(bayes_update(prior, e1, entry.system, fixed), e2,
                                    entry.system, fixed);
    PosteriorGrid ba = bayes_update(bayes_update(prior, e2, entry.system, fixed), e1,
                                    entry.system, fixed);
    for (std::size_t cell = 0; cell < ab.log_weights.size(); ++cell)
        CHECK(std::abs(ab.log_weights[cell] - ba.log_weights[cell]) <= 1e-10);
}

TEST_CASE("posterior spread contracts as pulse samples accumulate") {
    auto entry = get_registry_model("lambda-system");
    const ParamMap truth{{"lambda", 1.0}, {"a_tot", 2.0}};
    const ParamMap fixed{{"a_tot", 2.0}};
    const PosteriorGrid prior = uniform_posterior({"lambda"}, {{0.4, 2.0}}, 41);

    auto posterior_with = [&](int samples) {
        Experiment e = synthesize_data(entry.system, truth, sig::Pulse{1.0, 0.0, 1.0},
                                       linspace(1.02, 3.0, samples), 0.01, 77);
        return posterior_std(bayes_update(prior, e, entry.system, fixed), "lambda");
    };
    const double few = posterior_with(10);
    const double many = posterior_with(50);
    CHECK(many < few);
}

TEST_CASE("a posterior with no viable cells is an error") {
    // Unstable growth model: every grid cell diverges over a long horizon.
    GeneralSystem runaway = make_general_system({"x"}, {"lambda"}, {"lambda*x + u^2"}, "x");
    Experiment e;
    e.signal = sig::Step{1.0};
    e.sample_times = {30.0};
    e.observations = {1.0};
    e.sigma_noise = 0.1;
    const PosteriorGrid prior = uniform_posterior({"lambda"}, {{5.0, 10.0}}, 5);
    CHECK_THROWS_AS(bayes_update(prior, e, runaway, {}), NumericError);
}

TEST_CASE("multi-parameter grids enumerate cells in row-major order") {
    PosteriorGrid grid = uniform_posterior({"p", "q"}, {{0.0, 1.0}, {10.0, 20.0}}, 3);
    CHECK(grid.cell_count() == 9);
    CHECK(grid.cell_values(0) == std::vector<double>{0.0, 10.0});
    CHECK(grid.cell_values(1) == std::vector<double>{0.0, 15.0}); // last axis fastest
    CHECK(grid.cell_values(8) == std::vector<double>{1.0, 20.0});
    CHECK(testutil::close(posterior_mean(grid, "p"), 0.5, 1e-12));
}
