#include "ioident/demo.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace ioident::demo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Battery {
    BatteryReport report;
    std::vector<std::string> failures; // within the check being built

    void op(const char* name) { report.exercised_ops.insert(name); }

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }

    void expect_le(double value, double limit, const std::string& what) {
        expect(value <= limit, what + " = " + num(value) + " exceeds " + num(limit));
    }

    void expect_ge(double value, double limit, const std::string& what) {
        expect(value >= limit, what + " = " + num(value) + " is below " + num(limit));
    }

    void finish(const std::string& name, const std::string& pass_detail) {
        CheckResult r;
        r.name = name;
        r.pass = failures.empty();
        if (r.pass) {
            r.detail = pass_detail;
        } else {
            std::string joined;
            for (std::size_t i = 0; i < failures.size() && i < 3; ++i)
                joined += (i ? "; " : "") + failures[i];
            if (failures.size() > 3) joined += "; ...";
            r.detail = joined;
        }
        report.checks.push_back(std::move(r));
        failures.clear();
    }

    void run_guarded(const std::string& name, const std::function<void()>& body,
                     const std::string& pass_detail) {
        try {
            body();
        } catch (const std::exception& e) {
            failures.push_back(std::string("exception: ") + e.what());
        }
        finish(name, pass_detail);
    }
};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / static_cast<double>(n - 1);
    return out;
}

// ---------------------------------------------------------------------------

void check_transient_distinction(Battery& bat) {
    bat.run_guarded(
        "transient-distinction",
        [&] {
            bat.op("get_registry_model");
            bat.op("integrate");
            bat.op("steady_state_gain");
            bat.op("build_linear_system");
            auto model = get_registry_model("scalar-lti");
            const InputSignal step = sig::Step{1.0};
            const SolverConfig cfg;

            auto run = [&](double a, double b, double c) {
                ParamMap p{{"a", a}, {"b", b}, {"c", c}};
                return integrate(model.system, resolve_params(model.system, model.default_params, p),
                                 step, 0.0, 5.0, cfg);
            };
            Trajectory y1 = run(1.0, 1.0, 1.0);
            Trajectory y2 = run(2.0, 1.0, 2.0);

            double err1 = 0.0, err2 = 0.0, gap = 0.0;
            for (std::size_t i = 0; i < y1.size(); ++i) {
                const double t = y1.times[i];
                err1 = std::max(err1, std::abs(y1.outputs[i] - (1.0 - std::exp(-t))));
                err2 = std::max(err2, std::abs(y2.outputs[i] - (1.0 - std::exp(-2.0 * t))));
                gap = std::max(gap, std::abs(y1.outputs[i] - y2.outputs[i]));
            }
            bat.expect_le(err1, 1e-6, "error of (1,1,1) step output vs 1-exp(-t)");
            bat.expect_le(err2, 1e-6, "error of (2,1,2) step output vs 1-exp(-2t)");

            const double g1 = steady_state_gain(scalar_lti(1.0, 1.0, 1.0));
            const double g2 = steady_state_gain(scalar_lti(2.0, 1.0, 2.0));
            bat.expect(g1 == 1.0, "gain of (1,1,1) is " + num(g1) + ", want exactly 1");
            bat.expect(g2 == 1.0, "gain of (2,1,2) is " + num(g2) + ", want exactly 1");
            bat.expect_ge(gap, 0.19, "max transient separation of the equal-gain pair");
        },
        "equal gains, step outputs match 1-exp(-t) and 1-exp(-2t) to 1e-6, transients differ");
}

void check_equivalence_law(Battery& bat) {
    bat.run_guarded(
        "scalar-equivalence-law",
        [&] {
            bat.op("io_equivalent");
            bat.op("minimality");
            bat.op("markov_parameters");
            bat.op("find_similarity");
            bat.op("symmetry_orbit");
            const std::vector<double> as{0.5, 1.0, 2.0};
            const std::vector<double> bcs{0.5, 1.0, 2.0, 4.0};

            struct Triple {
                double a, b, c;
            };
            std::vector<Triple> triples;
            for (double a : as)
                for (double b : bcs)
                    for (double c : bcs) triples.push_back({a, b, c});

            int law_mismatches = 0;
            for (const auto& t1 : triples)
                for (const auto& t2 : triples) {
                    const bool predicted = t1.a == t2.a && t1.b * t1.c == t2.b * t2.c;
                    const bool tested = io_equivalent(scalar_lti(t1.a, t1.b, t1.c),
                                                      scalar_lti(t2.a, t2.b, t2.c));
                    if (predicted != tested) ++law_mismatches;
                }
            bat.expect(law_mismatches == 0,
                       std::to_string(law_mismatches) + " grid pairs break a,bc equivalence law");

            // Equivalent pairs must be indistinguishable under every probe.
            auto model = get_registry_model("scalar-lti");
            const std::vector<InputSignal> probes{sig::Step{1.0}, sig::Pulse{1.0, 0.0, 1.0},
                                                  sig::Ramp{1.0}};
            double worst = 0.0;
            for (std::size_t i = 0; i < triples.size(); ++i)
                for (std::size_t j = i + 1; j < triples.size(); ++j) {
                    const auto& t1 = triples[i];
                    const auto& t2 = triples[j];
                    if (!(t1.a == t2.a && t1.b * t1.c == t2.b * t2.c)) continue;
                    for (const auto& probe : probes) {
                        Trajectory y1 =
                            integrate(model.system, {{"a", t1.a}, {"b", t1.b}, {"c", t1.c}}, probe,
                                      0.0, 5.0);
                        Trajectory y2 =
                            integrate(model.system, {{"a", t2.a}, {"b", t2.b}, {"c", t2.c}}, probe,
                                      0.0, 5.0);
                        for (std::size_t k = 0; k < y1.size(); ++k)
                            worst = std::max(worst, std::abs(y1.outputs[k] - y2.outputs[k]));
                    }
                }
            bat.expect_le(worst, 1e-8, "max output gap over equivalent pairs and probes");

            // Orbit witness: (1,2,3) ~ (1,6,1) via T = 3, certified explicitly.
            const ScalarTriple orbit = symmetry_orbit({1.0, 2.0, 3.0}, 3.0);
            bat.expect(orbit.a == 1.0 && orbit.b == 6.0 && orbit.c == 1.0,
                       "orbit of (1,2,3) under T=3 is not (1,6,1)");
            const auto mk1 = markov_parameters(scalar_lti(1.0, 2.0, 3.0), 6);
            const auto mk2 = markov_parameters(scalar_lti(orbit.a, orbit.b, orbit.c), 6);
            for (std::size_t k = 0; k < mk1.size(); ++k)
                bat.expect(mk1[k] == mk2[k], "Markov parameter " + std::to_string(k) +
                                                 " changed along the symmetry orbit");
            Eigen::MatrixXd T =
                find_similarity(scalar_lti(1.0, 2.0, 3.0), scalar_lti(1.0, 6.0, 1.0));
            bat.expect(std::abs(T(0, 0) - 3.0) <= 1e-12, "similarity T is " + num(T(0, 0)) +
                                                             ", want 3");
            const auto min_report = minimality(scalar_lti(1.0, 2.0, 3.0));
            bat.expect(min_report.minimal, "scalar (1,2,3) should be minimal");
        },
        "io_equivalent matches the (a, b*c) law on the grid; equivalent pairs agree to 1e-8 "
        "under step, pulse and ramp");
}

void check_a_recovery(Battery& bat) {
    bat.run_guarded(
        "a-recovery",
        [&] {
            bat.op("step_response");
            bat.op("estimate_a_from_step");
            bat.op("fit_derivative");
            struct Case {
                double a, b, c;
            };
            for (const Case& cs : {Case{2.0, 3.0, 0.5}, Case{1.0, 1.0, 1.0}}) {
                const LinearSystem sys = scalar_lti(cs.a, cs.b, cs.c);
                const SampledFunction K = step_response_series(sys, 1.0, 1e-3);
                const double a_hat = estimate_a_from_step(K);
                bat.expect_le(std::abs(a_hat - cs.a) / cs.a, 1e-3,
                              "relative error of a estimated from K for a=" + num(cs.a));
                // Spot value: K(1) from the quadrature route vs the exact integral.
                const double K1 = step_response(sys, 1.0);
                const double exact = cs.c * cs.b / cs.a * (1.0 - std::exp(-cs.a));
                bat.expect_le(std::abs(K1 - exact), 1e-9, "K(1) quadrature error");
            }
        },
        "a = -K''(0)/K'(0) recovered within 0.1% for (2,3,0.5) and (1,1,1)");
}

void check_step_invisibility(Battery& bat) {
    bat.run_guarded(
        "step-invisibility",
        [&] {
            bat.op("sensitivity_trajectories");
            bat.op("gram_matrix");
            bat.op("fisher_cramer_rao");
            auto model = get_registry_model("lambda-system");
            const double a_tot = 2.0;
            for (double lambda : {0.5, 1.0, 2.0}) {
                for (double u0 : {0.5, 1.0, 2.0}) {
                    const InputSignal step = sig::Step{u0};
                    const ParamMap params{{"lambda", lambda}, {"a_tot", a_tot}};
                    Trajectory traj = integrate(model.system, params, step, 0.0, 5.0);
                    double dev = 0.0;
                    for (double y : traj.outputs) dev = std::max(dev, std::abs(y - a_tot * u0));
                    bat.expect_le(dev, 1e-6, "max |y - a_tot*u0| for lambda=" + num(lambda) +
                                                 ", u0=" + num(u0));

                    SensitivityTrajectory sens = sensitivity_trajectories(
                        model.system, params, step, 0.0, 5.0, {}, {"lambda", "a_tot"});
                    GramReport gram = gram_matrix(sens);
                    const double lambda_col =
                        std::max(std::abs(gram.G(0, 0)), std::abs(gram.G(0, 1)));
                    bat.expect_le(lambda_col, 1e-10 * gram.eigenvalues(0),
                                  "lambda column of the Gram matrix");

                    CramerRaoReport crb = fisher_cramer_rao(sens, 0.01);
                    bat.expect(std::isinf(crb.crb(0)),
                               "crb(lambda) should be infinite under steps, got " +
                                   num(crb.crb(0)));

                    // With lambda alone free the information is zero outright.
                    SensitivityTrajectory only = sensitivity_trajectories(
                        model.system, params, step, 0.0, 5.0, {}, {"lambda"});
                    GramReport gram1 = gram_matrix(only);
                    bat.expect_le(std::abs(gram1.G(0, 0)), 1e-12, "1x1 Gram entry for lambda");
                    bat.expect(gram1.rank == 0, "lambda-only Gram rank should be 0");
                }
            }
        },
        "steps pin y = a_tot*u0 to 1e-6; zero Gram column and infinite crb(lambda) for all "
        "lambda, u0 in {0.5,1,2}");
}

void check_ramp_identification(Battery& bat) {
    bat.run_guarded(
        "ramp-identification",
        [&] {
            bat.op("estimate_lambda_from_ramp");
            auto model = get_registry_model("lambda-system");
            for (double lambda : {0.5, 1.0, 2.0}) {
                Trajectory traj = integrate(model.system, {{"lambda", lambda}, {"a_tot", 2.0}},
                                            sig::Ramp{1.0}, 0.0, 0.5);
                const SampledFunction y = sampled_from_trajectory(traj);
                const double fourth = fit_derivative(y, 0.0, 4, FitSide::Right);
                bat.expect_le(std::abs(fourth - 2.0 * lambda) / (2.0 * lambda), 0.02,
                              "relative error of y''''(0+) vs 2*lambda at lambda=" + num(lambda));
                const double lambda_hat = estimate_lambda_from_ramp(y);
                bat.expect_le(std::abs(lambda_hat - lambda) / lambda, 0.02,
                              "relative error of lambda from the ramp at lambda=" + num(lambda));
            }
        },
        "y''''(0+) = 2*lambda and the ramp estimator land within 2% for lambda in {0.5,1,2}");
}

void check_pulse_identification(Battery& bat) {
    bat.run_guarded(
        "pulse-identification",
        [&] {
            bat.op("estimate_lambda_from_pulse");
            auto model = get_registry_model("lambda-system");
            for (double lambda : {0.5, 1.0, 2.0}) {
                Trajectory traj = integrate(model.system, {{"lambda", lambda}, {"a_tot", 2.0}},
                                            sig::Pulse{1.0, 0.0, 1.0}, 0.0, 2.0);
                const SampledFunction y = sampled_from_trajectory(traj);
                const double slope = fit_derivative(y, 1.0, 1, FitSide::Right);
                const double slope_exact = std::exp(-lambda) - 1.0;
                bat.expect_le(std::abs(slope - slope_exact), 1e-4,
                              "error of y'(1+) vs exp(-lambda)-1 at lambda=" + num(lambda));
                const double lambda_hat = estimate_lambda_from_pulse(y, 1.0);
                bat.expect_le(std::abs(lambda_hat - lambda), 1e-3,
                              "error of lambda from the pulse at lambda=" + num(lambda));
            }
        },
        "y'(1+) = exp(-lambda)-1 within 1e-4 and lambda recovered within 1e-3 for lambda in "
        "{0.5,1,2}");
}

void check_symmetry_null_space(Battery& bat) {
    bat.run_guarded(
        "symmetry-null-space",
        [&] {
            auto model = get_registry_model("scalar-lti");
            std::mt19937_64 rng(20240817);
            std::uniform_real_distribution<double> rate(0.3, 3.0);
            std::uniform_real_distribution<double> gain(0.3, 4.0);
            for (int trial = 0; trial < 20; ++trial) {
                const double a = rate(rng), b = gain(rng), c = gain(rng);
                SensitivityTrajectory sens =
                    sensitivity_trajectories(model.system, {{"a", a}, {"b", b}, {"c", c}},
                                             sig::Step{1.0}, 0.0, 10.0);
                GramReport gram = gram_matrix(sens);
                bat.expect(gram.rank == 2, "Gram rank is " + std::to_string(gram.rank) +
                                               " for (a,b,c)=(" + num(a) + "," + num(b) + "," +
                                               num(c) + "), want 2");
                if (gram.null_directions.cols() != 1) continue;
                Eigen::Vector3d expected(0.0, b, -c);
                expected.normalize();
                const double cosine = std::abs(expected.dot(gram.null_directions.col(0)));
                bat.expect_ge(cosine, 0.999, "cosine of null direction with (0,b,-c)");
            }
        },
        "20 random scalar triples: Gram rank 2 with null direction along (0,b,-c)");
}

void check_gray_box(Battery& bat) {
    bat.run_guarded(
        "gray-box-interval",
        [&] {
            bat.op("propagate_gray_box");
            const Interval b = propagate_gray_box(point_interval(1.0), make_interval(0.01, 0.1));
            bat.expect(b.lo == 10.0 && b.hi == 100.0,
                       "K'(0)=1, c in [0.01,0.1] gives b in [" + num(b.lo) + "," + num(b.hi) +
                           "], want exactly [10,100]");
            const Interval pt = propagate_gray_box(point_interval(1.5), point_interval(0.5));
            bat.expect(pt.lo == 3.0 && pt.hi == 3.0, "point division 1.5/0.5 should be 3");
        },
        "b = K'(0)/c maps [0.01,0.1] to exactly [10,100]");
}

void check_bayes(Battery& bat) {
    bat.run_guarded(
        "bayes-posterior",
        [&] {
            bat.op("synthesize_data");
            bat.op("bayes_update");
            auto model = get_registry_model("lambda-system");
            const ParamMap truth{{"lambda", 1.0}, {"a_tot", 2.0}};
            const ParamMap fixed{{"a_tot", 2.0}};
            const PosteriorGrid prior = uniform_posterior({"lambda"}, {{0.2, 3.0}}, 141);

            // Noise-free pulse data, assumed noise level 0.01 in the likelihood.
            Experiment pulse = synthesize_data(model.system, truth, sig::Pulse{1.0, 0.0, 1.0},
                                               linspace(1.05, 2.95, 20), 0.0, 7);
            pulse.sigma_noise = 0.01;
            PosteriorGrid post = bayes_update(prior, pulse, model.system, fixed);

            const auto probs = post.probabilities();
            double total = 0.0;
            for (double p : probs) total += p;
            bat.expect_le(std::abs(total - 1.0), 1e-12, "posterior probability total minus 1");

            const double cell_width = (3.0 - 0.2) / 140.0;
            const double mode_lambda = post.cell_values(post.mode())[0];
            bat.expect_le(std::abs(mode_lambda - 1.0), cell_width + 1e-12,
                          "distance of the posterior mode from the true lambda");

            // A step experiment leaves the posterior untouched.
            Experiment step = synthesize_data(model.system, truth, sig::Step{1.0},
                                              linspace(0.25, 3.0, 12), 0.0, 8);
            step.sigma_noise = 0.01;
            PosteriorGrid post_step = bayes_update(prior, step, model.system, fixed);
            const auto step_probs = post_step.probabilities();
            double dev = 0.0;
            for (double p : step_probs) dev = std::max(dev, std::abs(p - 1.0 / 141.0));
            bat.expect_le(dev, 1e-12, "max per-cell deviation of the step posterior from uniform");
        },
        "pulse data peaks the posterior at the true lambda; step data returns the prior");
}

void check_quasi_steady_state(Battery& bat) {
    bat.run_guarded(
        "quasi-steady-state",
        [&] {
            auto model = get_registry_model("fast-reporter-linear");
            const double c = 1.0;
            Trajectory traj = integrate(model.system,
                                        {{"a", 1.0}, {"b", 1.0}, {"c", c}, {"eps", 1e-3}},
                                        sig::Step{1.0}, 0.0, 5.0);
            double dev = 0.0;
            for (std::size_t i = 0; i < traj.size(); ++i) {
                if (traj.times[i] < 0.1) continue;
                dev = std::max(dev, std::abs(traj.outputs[i] -
                                             c * traj.states(static_cast<Eigen::Index>(i), 0)));
            }
            bat.expect_le(dev, 1e-2, "sup_{t>=0.1} |y_full - c*x| at eps=1e-3");
        },
        "the eps=1e-3 reporter tracks c*x within 1e-2 after the initial layer");
}

void check_near_degeneracy(Battery& bat) {
    bat.run_guarded(
        "near-degenerate-rates",
        [&] {
            auto model = get_registry_model("lambda-system-split");
            auto crb_lambda_x = [&](double lambda_z) {
                SensitivityTrajectory sens = sensitivity_trajectories(
                    model.system,
                    {{"lambda_x", 1.0}, {"lambda_z", lambda_z}, {"a_tot", 2.0}}, sig::Step{1.0},
                    0.0, 5.0, {}, {"lambda_x", "lambda_z"});
                return fisher_cramer_rao(sens, 0.01).crb(0);
            };
            const double far = crb_lambda_x(0.5);
            const double near = crb_lambda_x(0.95);
            bat.expect(std::isfinite(far), "crb(lambda_x) at gap 0.5 should be finite");
            bat.expect(near >= 10.0 * far,
                       "crb growth factor is " + num(near / far) + ", want >= 10");
        },
        "closing the rate gap from 0.5 to 0.05 inflates crb(lambda_x) at least tenfold");
}

void check_deconvolution(Battery& bat) {
    bat.run_guarded(
        "deconvolution",
        [&] {
            bat.op("deconvolve_impulse");
            bat.op("convolve");
            bat.op("impulse_response");
            bat.op("eval_signal");
            const LinearSystem sys = scalar_lti(1.0, 1.0, 1.0);
            const double h = 1e-3;
            const SampledFunction y = step_response_series(sys, 4.0, h);
            std::vector<double> ones(y.size());
            const InputSignal step = sig::Step{1.0};
            for (std::size_t i = 0; i < ones.size(); ++i)
                ones[i] = eval_signal(step, h * static_cast<double>(i));
            const SampledFunction u = make_sampled(h, 0.0, std::move(ones));

            const SampledFunction k_hat = deconvolve_impulse(y, u, 0.0);
            double num_acc = 0.0, den_acc = 0.0;
            for (std::size_t i = 0; i < k_hat.size(); ++i) {
                const double exact = std::exp(-k_hat.time_at(i));
                num_acc += (k_hat.values[i] - exact) * (k_hat.values[i] - exact);
                den_acc += exact * exact;
            }
            const double rel_l2 = std::sqrt(num_acc / den_acc);
            bat.expect_le(rel_l2, 1e-2, "relative L2 error of the recovered impulse response");

            // Scalar impulse response comes from the closed form; cross-check one point.
            bat.expect_le(std::abs(impulse_response(sys, 1.0) - std::exp(-1.0)), 1e-9,
                          "impulse response at t=1");

            // Closing the loop: convolving the estimate with the input rebuilds y.
            const SampledFunction y_back = convolve(k_hat, u);
            double back_err = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i)
                back_err = std::max(back_err, std::abs(y_back.values[i] - y.values[i]));
            bat.expect_le(back_err, 1e-6, "max error of k_hat * u vs the measured step output");
        },
        "k recovered from the (1,1,1) step response with relative L2 error below 1e-2");
}

void check_numerical_hygiene(Battery& bat) {
    bat.run_guarded(
        "numerical-hygiene",
        [&] {
            bat.op("parse_expression");
            bat.op("evaluate_expression");
            bat.op("differentiate_expression");
            bat.op("signal_breakpoints");
            bat.op("closed_form_output");

            // Symbolic machinery spot checks.
            const std::vector<std::string> states{"x", "z"};
            const std::vector<std::string> params{"lambda", "a_tot"};
            const ExprPtr rhs = parse_expression("-lambda*x + u^2", states, params);
            OwnedEnv env;
            env.bind("lambda", 3.0);
            env.bind("x", 2.0);
            env.bind("z", 0.0);
            env.bind("a_tot", 2.0);
            env.input = 1.0;
            bat.expect(evaluate_expression(rhs, env.view()) == -5.0,
                       "-lambda*x + u^2 at lambda=3, x=2, u=1 should be -5");
            const ExprPtr out_expr = parse_expression("x + u*(a_tot - z)", states, params);
            const ExprPtr dz = differentiate_expression(out_expr, "z");
            bat.expect(evaluate_expression(dz, env.view()) == -1.0,
                       "d/dz of x + u*(a_tot - z) should evaluate to -u");

            const auto bps = signal_breakpoints(InputSignal{sig::Pulse{1.0, 0.0, 1.0}});
            bat.expect(bps.size() == 2 && bps[0] == 0.0 && bps[1] == 1.0,
                       "pulse breakpoints should be {0, 1}");

            // Symbolic sensitivities against central differences, every
            // registry model crossed with every probe class.
            const std::vector<InputSignal> probes{sig::Zero{}, sig::Step{1.0},
                                                  sig::Pulse{1.0, 0.0, 1.0}, sig::Ramp{1.0},
                                                  sig::ImpulseApprox{1.0, 0.05}};
            for (const auto& id : registry_model_ids()) {
                auto model = get_registry_model(id);
                for (const auto& probe : probes) {
                    SensitivityTrajectory sens = sensitivity_trajectories(
                        model.system, model.default_params, probe, 0.0, 3.0);
                    for (std::size_t j = 0; j < sens.free_params.size(); ++j) {
                        const std::string& name = sens.free_params[j];
                        const double theta = model.default_params.at(name);
                        const double delta = 1e-5 * std::max(1.0, std::abs(theta));
                        ParamMap hi = model.default_params, lo = model.default_params;
                        hi[name] = theta + delta;
                        lo[name] = theta - delta;
                        Trajectory up = integrate(model.system, hi, probe, 0.0, 3.0);
                        Trajectory dn = integrate(model.system, lo, probe, 0.0, 3.0);
                        double worst = 0.0, scale = 0.0;
                        for (std::size_t i = 0; i < up.size(); ++i) {
                            const double fd =
                                (up.outputs[i] - dn.outputs[i]) / (2.0 * delta);
                            const double sym =
                                sens.dy_dtheta(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j));
                            worst = std::max(worst, std::abs(sym - fd));
                            scale = std::max(scale, std::abs(fd));
                        }
                        bat.expect_le(worst, 1e-4 * std::max(1e-2, scale),
                                      "sensitivity mismatch for " + id + "/" +
                                          signal_class_name(probe) + "/" + name);
                    }
                }
            }

            // Fourth-order convergence: halving h shrinks the worst grid error
            // by at least 12 (16 in theory).
            auto model = get_registry_model("scalar-lti");
            auto max_err = [&](double h) {
                Trajectory traj = integrate(model.system, model.default_params, sig::Step{1.0},
                                            0.0, 5.0, SolverConfig{h});
                double err = 0.0;
                for (std::size_t i = 0; i < traj.size(); ++i)
                    err = std::max(err, std::abs(traj.outputs[i] -
                                                 closed_form_output(model, {}, sig::Step{1.0},
                                                                    traj.times[i])));
                return err;
            };
            const double coarse = max_err(0.1);
            const double fine = max_err(0.05);
            bat.expect_ge(coarse / fine, 12.0, "RK4 error reduction factor on step halving");
        },
        "symbolic sensitivities match central differences on every model x signal class; RK4 "
        "shows 4th-order convergence");
}

void check_laplace_consistency(Battery& bat) {
    bat.run_guarded(
        "laplace-consistency",
        [&] {
            bat.op("frequency_response");
            bat.op("signal_laplace");
            const LinearSystem sys = scalar_lti(1.0, 1.0, 1.0);
            auto model = get_registry_model("scalar-lti");
            Trajectory traj =
                integrate(model.system, model.default_params, sig::Step{1.0}, 0.0, 30.0);
            for (double s : {0.5, 1.0, 2.0}) {
                const std::complex<double> sigma(s, 0.0);
                const std::complex<double> predicted =
                    frequency_response(sys, sigma) * signal_laplace(sig::Step{1.0}, sigma);
                // Trapezoid Laplace transform of the simulated output.
                double acc = 0.0;
                for (std::size_t i = 1; i < traj.size(); ++i) {
                    const double f0 = traj.outputs[i - 1] * std::exp(-s * traj.times[i - 1]);
                    const double f1 = traj.outputs[i] * std::exp(-s * traj.times[i]);
                    acc += 0.5 * (f0 + f1) * (traj.times[i] - traj.times[i - 1]);
                }
                bat.expect_le(std::abs(predicted.real() - acc), 1e-3,
                              "Laplace mismatch at sigma=" + num(s));
            }
            // W(0+) recovers the steady-state gain.
            const std::complex<double> w0 = frequency_response(sys, {1e-9, 0.0});
            bat.expect_le(std::abs(w0.real() - 1.0), 1e-6, "W(0) vs the steady-state gain");
        },
        "W(sigma) * u_hat(sigma) matches the transformed step output at sigma in {0.5,1,2}");
}

void check_least_squares(Battery& bat) {
    bat.run_guarded(
        "least-squares-recovery",
        [&] {
            bat.op("least_squares_fit");
            auto model = get_registry_model("lambda-system");
            const ParamMap truth{{"lambda", 1.0}, {"a_tot", 2.0}};
            Experiment ramp = synthesize_data(model.system, truth, sig::Ramp{1.0},
                                              linspace(0.1, 5.0, 25), 0.0, 3);
            FitResult fit = least_squares_fit(model.system, {ramp}, {{"a_tot", 2.0}},
                                              {{"lambda", 0.3}});
            bat.expect(fit.converged, "ramp fit did not converge: " + fit.message);
            bat.expect_le(std::abs(fit.theta.at("lambda") - 1.0), 1e-6,
                          "error of the fitted lambda from one ramp experiment");

            // Step experiments carry no lambda information: the fit must refuse.
            Experiment step = synthesize_data(model.system, truth, sig::Step{1.0},
                                              linspace(0.1, 5.0, 25), 0.0, 4);
            bool refused = false;
            try {
                least_squares_fit(model.system, {step}, {{"a_tot", 2.0}}, {{"lambda", 0.3}});
            } catch (const NumericError&) {
                refused = true;
            }
            bat.expect(refused, "fitting lambda from step data should report a dead Jacobian");
        },
        "a single noise-free ramp experiment pins lambda to 1e-6; step data is rejected as "
        "uninformative");
}

} // namespace

bool BatteryReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

BatteryReport run_battery() {
    Battery bat;
    check_transient_distinction(bat);
    check_equivalence_law(bat);
    check_a_recovery(bat);
    check_step_invisibility(bat);
    check_ramp_identification(bat);
    check_pulse_identification(bat);
    check_symmetry_null_space(bat);
    check_gray_box(bat);
    check_bayes(bat);
    check_quasi_steady_state(bat);
    check_near_degeneracy(bat);
    check_deconvolution(bat);
    check_numerical_hygiene(bat);
    check_laplace_consistency(bat);
    check_least_squares(bat);
    return std::move(bat.report);
}

std::string format_battery_report(const BatteryReport& report) {
    std::ostringstream out;
    int failed = 0;
    for (const auto& c : report.checks) {
        out << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) out << ": " << c.detail;
        out << '\n';
        if (!c.pass) ++failed;
    }
    out << (failed == 0 ? "all checks passed"
                        : std::to_string(failed) + " of " +
                              std::to_string(report.checks.size()) + " checks FAILED")
        << '\n';
    return out.str();
}

} // namespace ioident::demo
