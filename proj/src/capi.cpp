#include "ioident/ioident.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <optional>
#include <string>

#include "ioident/csv.hpp"
#include "ioident/demo.hpp"

using namespace ioident;

struct ioid_model {
    GeneralSystem system;
    ParamMap defaults;
};
struct ioid_signal {
    InputSignal value;
};
struct ioid_trajectory {
    Trajectory traj;
    std::vector<std::string> state_names;
};
struct ioid_lti {
    LinearSystem sys;
};
struct ioid_sampled {
    SampledFunction f;
};
struct ioid_experiment {
    Experiment e;
};
struct ioid_ident_report {
    GramReport gram;
    std::optional<CramerRaoReport> crb;
};
struct ioid_fit_result {
    FitResult fit;
};
struct ioid_posterior {
    PosteriorGrid grid;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what ? what : "unknown error"; }

template <typename F>
ioid_status wrap(F&& body) {
    try {
        body();
        return IOID_OK;
    } catch (const ParseError& e) {
        set_error(e.what());
        return IOID_ERR_PARSE;
    } catch (const NumericError& e) {
        set_error(e.what());
        return IOID_ERR_NUMERIC;
    } catch (const InvalidArgument& e) {
        set_error(e.what());
        return IOID_ERR_INVALID;
    } catch (const std::exception& e) {
        set_error(e.what());
        return IOID_ERR_INVALID;
    }
}

void require(const void* ptr, const char* what) {
    if (!ptr) throw InvalidArgument(std::string("null ") + what);
}

ParamMap to_overrides(const char* const* names, const double* values, int n) {
    ParamMap out;
    if (n == 0) return out;
    require(names, "parameter name array");
    require(values, "parameter value array");
    for (int i = 0; i < n; ++i) {
        require(names[i], "parameter name");
        out[names[i]] = values[i];
    }
    return out;
}

SolverConfig solver_for(double h) {
    SolverConfig cfg;
    if (h > 0.0) cfg.h = h;
    return cfg;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void write_out(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    write_text_file(path, content);
}

} // namespace

extern "C" {

const char* ioid_version(void) { return "0.1.0"; }

const char* ioid_last_error(void) { return g_last_error.c_str(); }

void ioid_string_free(char* s) { std::free(s); }

/* ------------------------------------------------------------------ models */

ioid_status ioid_model_from_registry(const char* id, ioid_model** out) {
    return wrap([&] {
        require(id, "registry id");
        require(out, "output handle");
        ModelRegistryEntry entry = get_registry_model(id);
        *out = new ioid_model{std::move(entry.system), std::move(entry.default_params)};
    });
}

ioid_status ioid_model_from_json(const char* json_text, ioid_model** out) {
    return wrap([&] {
        require(json_text, "model text");
        require(out, "output handle");
        LoadedModel model = model_from_json(json_text);
        *out = new ioid_model{std::move(model.system), std::move(model.defaults)};
    });
}

ioid_status ioid_model_from_file(const char* path, ioid_model** out) {
    return wrap([&] {
        require(path, "model path");
        require(out, "output handle");
        LoadedModel model = model_from_json(read_text_file(path));
        *out = new ioid_model{std::move(model.system), std::move(model.defaults)};
    });
}

void ioid_model_free(ioid_model* model) { delete model; }

int ioid_model_state_count(const ioid_model* model) {
    return model ? static_cast<int>(model->system.state_names.size()) : 0;
}

int ioid_model_param_count(const ioid_model* model) {
    return model ? static_cast<int>(model->system.param_names.size()) : 0;
}

const char* ioid_model_state_name(const ioid_model* model, int index) {
    if (!model || index < 0 || index >= ioid_model_state_count(model)) return nullptr;
    return model->system.state_names[static_cast<std::size_t>(index)].c_str();
}

const char* ioid_model_param_name(const ioid_model* model, int index) {
    if (!model || index < 0 || index >= ioid_model_param_count(model)) return nullptr;
    return model->system.param_names[static_cast<std::size_t>(index)].c_str();
}

int ioid_model_param_default(const ioid_model* model, const char* name, double* value) {
    if (!model || !name) return 0;
    auto it = model->defaults.find(name);
    if (it == model->defaults.end()) return 0;
    if (value) *value = it->second;
    return 1;
}

/* ----------------------------------------------------------------- signals */

ioid_status ioid_signal_parse(const char* spec, ioid_signal** out) {
    return wrap([&] {
        require(spec, "signal spec");
        require(out, "output handle");
        *out = new ioid_signal{parse_signal_spec(spec)};
    });
}

void ioid_signal_free(ioid_signal* s) { delete s; }

ioid_status ioid_signal_eval(const ioid_signal* s, double t, double* out) {
    return wrap([&] {
        require(s, "signal");
        require(out, "output value");
        *out = eval_signal(s->value, t);
    });
}

/* -------------------------------------------------------------- simulation */

ioid_status ioid_simulate(const ioid_model* model, const char* const* names, const double* values,
                          int n_overrides, const ioid_signal* s, double t0, double t1, double h,
                          ioid_trajectory** out) {
    return wrap([&] {
        require(model, "model");
        require(s, "signal");
        require(out, "output handle");
        const ParamMap params = resolve_params(model->system, model->defaults,
                                               to_overrides(names, values, n_overrides));
        Trajectory traj = integrate(model->system, params, s->value, t0, t1, solver_for(h));
        *out = new ioid_trajectory{std::move(traj), model->system.state_names};
    });
}

void ioid_trajectory_free(ioid_trajectory* traj) { delete traj; }

size_t ioid_trajectory_size(const ioid_trajectory* traj) { return traj ? traj->traj.size() : 0; }

ioid_status ioid_trajectory_point(const ioid_trajectory* traj, size_t index, double* t, double* u,
                                  double* y) {
    return wrap([&] {
        require(traj, "trajectory");
        if (index >= traj->traj.size()) throw InvalidArgument("trajectory index out of range");
        if (t) *t = traj->traj.times[index];
        if (u) *u = traj->traj.inputs[index];
        if (y) *y = traj->traj.outputs[index];
    });
}

ioid_status ioid_trajectory_write_csv(const ioid_trajectory* traj, const char* path) {
    return wrap([&] {
        require(traj, "trajectory");
        require(path, "path");
        write_out(path, trajectory_to_csv(traj->traj, traj->state_names));
    });
}

ioid_status ioid_trajectory_outputs(const ioid_trajectory* traj, ioid_sampled** out) {
    return wrap([&] {
        require(traj, "trajectory");
        require(out, "output handle");
        *out = new ioid_sampled{sampled_from_trajectory(traj->traj)};
    });
}

/* ------------------------------------------------------------ LTI analysis */

ioid_status ioid_lti_create(int n, const double* A, const double* b, const double* c,
                            ioid_lti** out) {
    return wrap([&] {
        require(A, "A matrix");
        require(b, "b vector");
        require(c, "c vector");
        require(out, "output handle");
        if (n < 1) throw InvalidArgument("system dimension must be >= 1");
        Eigen::MatrixXd Am(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Am(i, j) = A[i * n + j];
        Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b, n);
        Eigen::RowVectorXd cv = Eigen::Map<const Eigen::RowVectorXd>(c, n);
        *out = new ioid_lti{build_linear_system(Am, bv, cv)};
    });
}

void ioid_lti_free(ioid_lti* sys) { delete sys; }

ioid_status ioid_lti_impulse(const ioid_lti* sys, double t, double* out) {
    return wrap([&] {
        require(sys, "system");
        require(out, "output value");
        *out = impulse_response(sys->sys, t);
    });
}

ioid_status ioid_lti_step(const ioid_lti* sys, double t, double* out) {
    return wrap([&] {
        require(sys, "system");
        require(out, "output value");
        *out = step_response(sys->sys, t);
    });
}

ioid_status ioid_lti_impulse_series(const ioid_lti* sys, double t1, double h, ioid_sampled** out) {
    return wrap([&] {
        require(sys, "system");
        require(out, "output handle");
        *out = new ioid_sampled{impulse_response_series(sys->sys, t1, h)};
    });
}

ioid_status ioid_lti_step_series(const ioid_lti* sys, double t1, double h, ioid_sampled** out) {
    return wrap([&] {
        require(sys, "system");
        require(out, "output handle");
        *out = new ioid_sampled{step_response_series(sys->sys, t1, h)};
    });
}

ioid_status ioid_lti_gain(const ioid_lti* sys, double* out) {
    return wrap([&] {
        require(sys, "system");
        require(out, "output value");
        *out = steady_state_gain(sys->sys);
    });
}

ioid_status ioid_lti_is_hurwitz(const ioid_lti* sys, int* out) {
    return wrap([&] {
        require(sys, "system");
        require(out, "output value");
        *out = is_hurwitz(sys->sys) ? 1 : 0;
    });
}

ioid_status ioid_lti_markov(const ioid_lti* sys, int m, double* out) {
    return wrap([&] {
        require(sys, "system");
        require(out, "output array");
        const auto values = markov_parameters(sys->sys, m);
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i];
    });
}

ioid_status ioid_lti_minimality(const ioid_lti* sys, double tol, int* reach_rank, int* obs_rank,
                                int* minimal) {
    return wrap([&] {
        require(sys, "system");
        const MinimalityReport report = minimality(sys->sys, tol > 0.0 ? tol : 1e-9);
        if (reach_rank) *reach_rank = report.reach_rank;
        if (obs_rank) *obs_rank = report.obs_rank;
        if (minimal) *minimal = report.minimal ? 1 : 0;
    });
}

ioid_status ioid_lti_equivalent(const ioid_lti* s1, const ioid_lti* s2, double tol,
                                int* equivalent) {
    return wrap([&] {
        require(s1, "system");
        require(s2, "system");
        require(equivalent, "output value");
        *equivalent = io_equivalent(s1->sys, s2->sys, tol > 0.0 ? tol : 1e-9) ? 1 : 0;
    });
}

ioid_status ioid_lti_similarity(const ioid_lti* s1, const ioid_lti* s2, double tol, double* T) {
    return wrap([&] {
        require(s1, "system");
        require(s2, "system");
        require(T, "output matrix");
        const Eigen::MatrixXd M = find_similarity(s1->sys, s2->sys, tol > 0.0 ? tol : 1e-9);
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            for (Eigen::Index j = 0; j < M.cols(); ++j) T[i * M.cols() + j] = M(i, j);
    });
}

ioid_status ioid_lti_frequency_response(const ioid_lti* sys, double sigma_re, double sigma_im,
                                        double* out_re, double* out_im) {
    return wrap([&] {
        require(sys, "system");
        const std::complex<double> w = frequency_response(sys->sys, {sigma_re, sigma_im});
        if (out_re) *out_re = w.real();
        if (out_im) *out_im = w.imag();
    });
}

ioid_status ioid_symmetry_orbit(double a, double b, double c, double T, double* out) {
    return wrap([&] {
        require(out, "output array");
        const ScalarTriple orbit = symmetry_orbit({a, b, c}, T);
        out[0] = orbit.a;
        out[1] = orbit.b;
        out[2] = orbit.c;
    });
}

/* ------------------------------------------------------- sampled functions */

ioid_status ioid_sampled_create(double h, double t0, const double* values, size_t n,
                                ioid_sampled** out) {
    return wrap([&] {
        require(values, "value array");
        require(out, "output handle");
        *out = new ioid_sampled{make_sampled(h, t0, std::vector<double>(values, values + n))};
    });
}

void ioid_sampled_free(ioid_sampled* f) { delete f; }

size_t ioid_sampled_size(const ioid_sampled* f) { return f ? f->f.size() : 0; }

double ioid_sampled_step(const ioid_sampled* f) { return f ? f->f.h : 0.0; }

double ioid_sampled_start(const ioid_sampled* f) { return f ? f->f.t0 : 0.0; }

ioid_status ioid_sampled_values(const ioid_sampled* f, double* out) {
    return wrap([&] {
        require(f, "sampled function");
        require(out, "output array");
        for (std::size_t i = 0; i < f->f.size(); ++i) out[i] = f->f.values[i];
    });
}

ioid_status ioid_sampled_write_csv(const ioid_sampled* f, const char* path) {
    return wrap([&] {
        require(f, "sampled function");
        require(path, "path");
        write_out(path, sampled_to_csv(f->f));
    });
}

ioid_status ioid_sampled_read_csv(const char* path, ioid_sampled** out) {
    return wrap([&] {
        require(path, "path");
        require(out, "output handle");
        *out = new ioid_sampled{sampled_from_csv(read_text_file(path))};
    });
}

ioid_status ioid_convolve(const ioid_sampled* k, const ioid_sampled* u, ioid_sampled** out) {
    return wrap([&] {
        require(k, "impulse response");
        require(u, "input");
        require(out, "output handle");
        *out = new ioid_sampled{convolve(k->f, u->f)};
    });
}

ioid_status ioid_deconvolve_impulse(const ioid_sampled* y, const ioid_sampled* u, double ridge,
                                    ioid_sampled** out) {
    return wrap([&] {
        require(y, "output samples");
        require(u, "input samples");
        require(out, "output handle");
        *out = new ioid_sampled{deconvolve_impulse(y->f, u->f, ridge)};
    });
}

/* --------------------------------------------- derivative-based estimators */

ioid_status ioid_fit_derivative(const ioid_sampled* f, double t0, int order, int side,
                                double window, int degree, double* out) {
    return wrap([&] {
        require(f, "sampled function");
        require(out, "output value");
        FitSide fit_side;
        switch (side) {
            case 0: fit_side = FitSide::Left; break;
            case 1: fit_side = FitSide::Right; break;
            case 2: fit_side = FitSide::Central; break;
            default: throw InvalidArgument("side must be 0 (left), 1 (right) or 2 (central)");
        }
        *out = window > 0.0 ? fit_derivative(f->f, t0, order, fit_side, window, degree)
                            : fit_derivative(f->f, t0, order, fit_side);
    });
}

ioid_status ioid_estimate_a_from_step(const ioid_sampled* K, double* out) {
    return wrap([&] {
        require(K, "step response");
        require(out, "output value");
        *out = estimate_a_from_step(K->f);
    });
}

ioid_status ioid_estimate_lambda_from_ramp(const ioid_sampled* y, double* out) {
    return wrap([&] {
        require(y, "ramp response");
        require(out, "output value");
        *out = estimate_lambda_from_ramp(y->f);
    });
}

ioid_status ioid_estimate_lambda_from_pulse(const ioid_sampled* y, double t_off, double* out) {
    return wrap([&] {
        require(y, "pulse response");
        require(out, "output value");
        *out = estimate_lambda_from_pulse(y->f, t_off);
    });
}

ioid_status ioid_gray_box_interval(double num_lo, double num_hi, double den_lo, double den_hi,
                                   double* out_lo, double* out_hi) {
    return wrap([&] {
        require(out_lo, "output low");
        require(out_hi, "output high");
        const Interval b =
            propagate_gray_box(make_interval(num_lo, num_hi), make_interval(den_lo, den_hi));
        *out_lo = b.lo;
        *out_hi = b.hi;
    });
}

/* --------------------------------------------------------- identifiability */

ioid_status ioid_identify(const ioid_model* model, const char* const* names, const double* values,
                          int n_overrides, const char* const* free_names, int n_free,
                          const ioid_signal* s, double t0, double t1, double h,
                          double sigma_noise, double gram_tol, ioid_ident_report** out) {
    return wrap([&] {
        require(model, "model");
        require(s, "signal");
        require(out, "output handle");
        const ParamMap params = resolve_params(model->system, model->defaults,
                                               to_overrides(names, values, n_overrides));
        std::vector<std::string> free_list;
        if (n_free > 0) {
            require(free_names, "free parameter array");
            for (int i = 0; i < n_free; ++i) {
                require(free_names[i], "free parameter name");
                free_list.emplace_back(free_names[i]);
            }
        }
        SensitivityTrajectory sens = sensitivity_trajectories(model->system, params, s->value, t0,
                                                              t1, solver_for(h), free_list);
        auto* report = new ioid_ident_report{
            gram_matrix(sens, gram_tol > 0.0 ? gram_tol : 1e-6), std::nullopt};
        if (sigma_noise > 0.0) report->crb = fisher_cramer_rao(sens, sigma_noise);
        *out = report;
    });
}

void ioid_ident_report_free(ioid_ident_report* report) { delete report; }

int ioid_ident_report_param_count(const ioid_ident_report* report) {
    return report ? static_cast<int>(report->gram.params.size()) : 0;
}

int ioid_ident_report_rank(const ioid_ident_report* report) {
    return report ? report->gram.rank : 0;
}

ioid_status ioid_ident_report_crb(const ioid_ident_report* report, double* out) {
    return wrap([&] {
        require(report, "report");
        require(out, "output array");
        if (!report->crb) throw InvalidArgument("report was built without a noise level");
        for (Eigen::Index i = 0; i < report->crb->crb.size(); ++i) out[i] = report->crb->crb(i);
    });
}

ioid_status ioid_ident_report_text(const ioid_ident_report* report, char** out) {
    return wrap([&] {
        require(report, "report");
        require(out, "output string");
        *out = dup_string(
            format_ident_report(report->gram, report->crb ? &*report->crb : nullptr));
    });
}

/* ------------------------------------------------- experiments and fitting */

ioid_status ioid_experiment_create(const ioid_signal* s, const double* times, const double* obs,
                                   size_t n, double sigma, ioid_experiment** out) {
    return wrap([&] {
        require(s, "signal");
        require(times, "time array");
        require(obs, "observation array");
        require(out, "output handle");
        Experiment e;
        e.signal = s->value;
        e.sample_times.assign(times, times + n);
        e.observations.assign(obs, obs + n);
        e.sigma_noise = sigma;
        validate_experiment(e);
        *out = new ioid_experiment{std::move(e)};
    });
}

ioid_status ioid_experiment_read_csv(const char* path, const ioid_signal* s, double sigma,
                                     ioid_experiment** out) {
    return wrap([&] {
        require(path, "path");
        require(s, "signal");
        require(out, "output handle");
        Experiment e;
        e.signal = s->value;
        e.sigma_noise = sigma;
        observations_from_csv(read_text_file(path), e.sample_times, e.observations);
        validate_experiment(e);
        *out = new ioid_experiment{std::move(e)};
    });
}

ioid_status ioid_experiment_write_csv(const ioid_experiment* e, const char* path) {
    return wrap([&] {
        require(e, "experiment");
        require(path, "path");
        write_out(path, observations_to_csv(e->e.sample_times, e->e.observations));
    });
}

void ioid_experiment_free(ioid_experiment* e) { delete e; }

ioid_status ioid_synthesize(const ioid_model* model, const char* const* names,
                            const double* values, int n_overrides, const ioid_signal* s,
                            const double* times, size_t n_times, double sigma, uint64_t seed,
                            double h, ioid_experiment** out) {
    return wrap([&] {
        require(model, "model");
        require(s, "signal");
        require(times, "time array");
        require(out, "output handle");
        const ParamMap params = resolve_params(model->system, model->defaults,
                                               to_overrides(names, values, n_overrides));
        *out = new ioid_experiment{synthesize_data(model->system, params, s->value,
                                                   std::span<const double>(times, n_times), sigma,
                                                   seed, solver_for(h))};
    });
}

ioid_status ioid_fit(const ioid_model* model, const char* const* names, const double* values,
                     int n_overrides, const ioid_experiment* const* experiments,
                     int n_experiments, const char* const* init_names, const double* init_values,
                     int n_init, const double* lo, const double* hi, double h,
                     ioid_fit_result** out) {
    return wrap([&] {
        require(model, "model");
        require(experiments, "experiment array");
        require(init_names, "initial guess names");
        require(init_values, "initial guess values");
        require(out, "output handle");
        if (n_experiments < 1) throw InvalidArgument("need at least one experiment");
        if (n_init < 1) throw InvalidArgument("need at least one free parameter");

        std::vector<Experiment> exps;
        for (int i = 0; i < n_experiments; ++i) {
            require(experiments[i], "experiment");
            exps.push_back(experiments[i]->e);
        }
        ParamMap theta0;
        Bounds bounds;
        for (int i = 0; i < n_init; ++i) {
            require(init_names[i], "free parameter name");
            theta0[init_names[i]] = init_values[i];
            if (lo && hi) bounds[init_names[i]] = {lo[i], hi[i]};
        }
        // Fixed values = defaults overlaid with overrides, minus the free
        // parameters. Completeness is checked by the fit itself, where the
        // free values fill the gaps.
        ParamMap fixed = model->defaults;
        for (const auto& [name, v] : to_overrides(names, values, n_overrides)) {
            if (std::find(model->system.param_names.begin(), model->system.param_names.end(),
                          name) == model->system.param_names.end())
                throw InvalidArgument("unknown parameter '" + name + "'");
            fixed[name] = v;
        }
        for (const auto& [name, v] : theta0) fixed.erase(name);

        FitOptions options;
        options.solver = solver_for(h);
        *out = new ioid_fit_result{
            least_squares_fit(model->system, exps, fixed, theta0, bounds, options)};
    });
}

void ioid_fit_result_free(ioid_fit_result* fit) { delete fit; }

int ioid_fit_result_converged(const ioid_fit_result* fit) {
    return fit && fit->fit.converged ? 1 : 0;
}

ioid_status ioid_fit_result_value(const ioid_fit_result* fit, const char* name, double* out) {
    return wrap([&] {
        require(fit, "fit result");
        require(name, "parameter name");
        require(out, "output value");
        auto it = fit->fit.theta.find(name);
        if (it == fit->fit.theta.end())
            throw InvalidArgument("'" + std::string(name) + "' was not a fitted parameter");
        *out = it->second;
    });
}

ioid_status ioid_fit_result_text(const ioid_fit_result* fit, char** out) {
    return wrap([&] {
        require(fit, "fit result");
        require(out, "output string");
        *out = dup_string(format_fit_report(fit->fit));
    });
}

/* ------------------------------------------------------ Bayesian posterior */

ioid_status ioid_posterior_uniform(const char* const* names, const double* lo, const double* hi,
                                   const int* cells, int n_params, ioid_posterior** out) {
    return wrap([&] {
        require(names, "parameter names");
        require(lo, "low bounds");
        require(hi, "high bounds");
        require(out, "output handle");
        if (n_params < 1) throw InvalidArgument("need at least one parameter");
        std::vector<std::string> name_list;
        std::vector<std::pair<double, double>> ranges;
        std::vector<int> cell_counts;
        for (int i = 0; i < n_params; ++i) {
            require(names[i], "parameter name");
            name_list.emplace_back(names[i]);
            ranges.emplace_back(lo[i], hi[i]);
            cell_counts.push_back(cells && cells[i] > 0 ? cells[i] : 141);
        }
        *out = new ioid_posterior{uniform_posterior(name_list, ranges, cell_counts)};
    });
}

void ioid_posterior_free(ioid_posterior* grid) { delete grid; }

ioid_status ioid_bayes_update(ioid_posterior* grid, const ioid_model* model,
                              const char* const* names, const double* values, int n_overrides,
                              const ioid_experiment* e, double h) {
    return wrap([&] {
        require(grid, "posterior grid");
        require(model, "model");
        require(e, "experiment");
        ParamMap fixed = model->defaults;
        for (const auto& [name, v] : to_overrides(names, values, n_overrides)) fixed[name] = v;
        for (const auto& name : grid->grid.param_names) fixed.erase(name);
        grid->grid = bayes_update(grid->grid, e->e, model->system, fixed, solver_for(h));
    });
}

size_t ioid_posterior_cell_count(const ioid_posterior* grid) {
    return grid ? grid->grid.cell_count() : 0;
}

ioid_status ioid_posterior_mode(const ioid_posterior* grid, double* out) {
    return wrap([&] {
        require(grid, "posterior grid");
        require(out, "output array");
        const auto values = grid->grid.cell_values(grid->grid.mode());
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i];
    });
}

ioid_status ioid_posterior_write_csv(const ioid_posterior* grid, const char* path) {
    return wrap([&] {
        require(grid, "posterior grid");
        require(path, "path");
        write_out(path, posterior_to_csv(grid->grid));
    });
}

/* -------------------------------------------------------------------- demo */

ioid_status ioid_demo_run(char** report, int* n_checks, int* n_failed) {
    return wrap([&] {
        require(report, "report string");
        const demo::BatteryReport battery = demo::run_battery();
        *report = dup_string(demo::format_battery_report(battery));
        if (n_checks) *n_checks = static_cast<int>(battery.checks.size());
        if (n_failed) {
            int failed = 0;
            for (const auto& c : battery.checks)
                if (!c.pass) ++failed;
            *n_failed = failed;
        }
    });
}

} /* extern "C" */
