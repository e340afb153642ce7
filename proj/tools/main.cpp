// ioident command-line front end. Talks to the engine exclusively through
// the C API in ioident/ioident.h.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 input parse
// error.

#include <ioident/ioident.h>

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
    ioid_status status;
    ApiError(ioid_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(ioid_status status) {
    if (status != IOID_OK) throw ApiError(status, ioid_last_error());
}

template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    ~Handle() { Free(ptr); }
    Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    T** slot() { return &ptr; }
    T* get() const { return ptr; }
};

using ModelHandle = Handle<ioid_model, ioid_model_free>;
using SignalHandle = Handle<ioid_signal, ioid_signal_free>;
using TrajectoryHandle = Handle<ioid_trajectory, ioid_trajectory_free>;
using LtiHandle = Handle<ioid_lti, ioid_lti_free>;
using SampledHandle = Handle<ioid_sampled, ioid_sampled_free>;
using ExperimentHandle = Handle<ioid_experiment, ioid_experiment_free>;
using ReportHandle = Handle<ioid_ident_report, ioid_ident_report_free>;
using FitHandle = Handle<ioid_fit_result, ioid_fit_result_free>;
using PosteriorHandle = Handle<ioid_posterior, ioid_posterior_free>;

struct OwnedCString {
    char* ptr = nullptr;
    ~OwnedCString() { ioid_string_free(ptr); }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string token;
    for (char c : text) {
        if (c == sep) {
            out.push_back(token);
            token.clear();
        } else {
            token += c;
        }
    }
    out.push_back(token);
    return out;
}

double parse_number(const std::string& token, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw UsageError("bad number '" + token + "' in " + what);
    }
}

// "name=value[,name=value...]"; a repeatable flag may supply one pair each.
void parse_assignments(const std::vector<std::string>& specs, std::vector<std::string>& names,
                       std::vector<double>& values) {
    for (const auto& spec : specs) {
        for (const auto& pair : split(spec, ',')) {
            if (pair.empty()) continue;
            const auto eq = pair.find('=');
            if (eq == std::string::npos || eq == 0)
                throw UsageError("expected name=value, got '" + pair + "'");
            names.push_back(pair.substr(0, eq));
            values.push_back(parse_number(pair.substr(eq + 1), "'" + pair + "'"));
        }
    }
}

std::vector<const char*> c_names(const std::vector<std::string>& names) {
    std::vector<const char*> out;
    for (const auto& n : names) out.push_back(n.c_str());
    return out;
}

void print_string(const std::string& path, const char* text) {
    if (path == "-" || path.empty()) {
        std::fputs(text, stdout);
        return;
    }
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw UsageError("cannot write '" + path + "'");
    std::fputs(text, f);
    std::fclose(f);
}

// Shared model/parameter options.
struct ModelArgs {
    std::string registry_id;
    std::string model_path;
    std::vector<std::string> params;

    void attach(CLI::App* cmd) {
        auto* reg = cmd->add_option("--registry", registry_id, "built-in model id");
        cmd->add_option("--model", model_path, "model JSON file")->excludes(reg);
        cmd->add_option("--params,-p", params,
                        "parameter overrides, name=value[,name=value...] (repeatable)");
    }

    ioid_model* load(ModelHandle& handle) const {
        if (registry_id.empty() == model_path.empty())
            throw UsageError("give exactly one of --registry or --model");
        if (!registry_id.empty())
            check(ioid_model_from_registry(registry_id.c_str(), handle.slot()));
        else
            check(ioid_model_from_file(model_path.c_str(), handle.slot()));
        return handle.get();
    }

    void overrides(std::vector<std::string>& names, std::vector<double>& values) const {
        parse_assignments(params, names, values);
    }
};

// Scalar triple or explicit matrices for one LTI system. Scalar flags follow
// the convention dx/dt = -a x + b u, y = c x.
struct LtiArgs {
    double a = 0.0, b = 0.0, c = 0.0;
    CLI::Option* scalar_opt = nullptr;
    std::string A_text, B_text, C_text;
    mutable int dim = 0;

    void attach(CLI::App* cmd, const std::string& suffix) {
        scalar_opt = cmd->add_option("--a" + suffix, a, "scalar decay rate (A = [-a])");
        auto* bo = cmd->add_option("--b" + suffix, b, "scalar input gain");
        auto* co = cmd->add_option("--c" + suffix, c, "scalar output gain");
        scalar_opt->needs(bo);
        scalar_opt->needs(co);
        cmd->add_option("--A" + suffix, A_text, "matrix rows 'a11,a12;a21,a22'");
        cmd->add_option("--B" + suffix, B_text, "input column 'b1,b2,...'");
        cmd->add_option("--C" + suffix, C_text, "output row 'c1,c2,...'");
    }

    ioid_lti* build(LtiHandle& handle) const {
        if (scalar_opt && scalar_opt->count() > 0) {
            const double A = -a;
            check(ioid_lti_create(1, &A, &b, &c, handle.slot()));
            dim = 1;
            return handle.get();
        }
        if (A_text.empty() || B_text.empty() || C_text.empty())
            throw UsageError("give either scalar --a/--b/--c or matrices --A/--B/--C");
        const auto rows = split(A_text, ';');
        const std::size_t n = rows.size();
        std::vector<double> A_values;
        for (const auto& row : rows) {
            const auto cells = split(row, ',');
            if (cells.size() != n) throw UsageError("A must be square");
            for (const auto& cell : cells) A_values.push_back(parse_number(cell, "--A"));
        }
        std::vector<double> B_values, C_values;
        for (const auto& cell : split(B_text, ',')) B_values.push_back(parse_number(cell, "--B"));
        for (const auto& cell : split(C_text, ',')) C_values.push_back(parse_number(cell, "--C"));
        if (B_values.size() != n || C_values.size() != n)
            throw UsageError("B and C must have one entry per state");
        check(ioid_lti_create(static_cast<int>(n), A_values.data(), B_values.data(),
                              C_values.data(), handle.slot()));
        dim = static_cast<int>(n);
        return handle.get();
    }
};

struct ExperimentArgs {
    std::vector<std::string> data_paths;
    std::vector<std::string> signal_specs;
    std::vector<double> sigmas;

    void attach(CLI::App* cmd) {
        cmd->add_option("--data", data_paths, "experiment CSV (t,observation); repeatable")
            ->required();
        cmd->add_option("--signal", signal_specs,
                        "input signal spec per --data (a single value is shared)")
            ->required();
        cmd->add_option("--sigma", sigmas,
                        "known noise std dev per --data (a single value is shared; default 0)");
    }

    std::vector<ExperimentHandle> load() const {
        if (signal_specs.size() != 1 && signal_specs.size() != data_paths.size())
            throw UsageError("--signal count must be 1 or match --data count");
        if (!sigmas.empty() && sigmas.size() != 1 && sigmas.size() != data_paths.size())
            throw UsageError("--sigma count must be 1 or match --data count");
        std::vector<ExperimentHandle> out(data_paths.size());
        for (std::size_t i = 0; i < data_paths.size(); ++i) {
            const std::string& spec = signal_specs.size() == 1 ? signal_specs[0] : signal_specs[i];
            const double sigma =
                sigmas.empty() ? 0.0 : (sigmas.size() == 1 ? sigmas[0] : sigmas[i]);
            SignalHandle sig;
            check(ioid_signal_parse(spec.c_str(), sig.slot()));
            check(ioid_experiment_read_csv(data_paths[i].c_str(), sig.get(), sigma,
                                           out[i].slot()));
        }
        return out;
    }
};

std::vector<double> parse_times(const std::string& times_list, const std::string& grid_spec) {
    if (times_list.empty() == grid_spec.empty())
        throw UsageError("give exactly one of --times or --grid");
    std::vector<double> out;
    if (!times_list.empty()) {
        for (const auto& cell : split(times_list, ',')) out.push_back(parse_number(cell, "--times"));
        return out;
    }
    const auto parts = split(grid_spec, ':');
    if (parts.size() != 3) throw UsageError("--grid must be lo:hi:count");
    const double lo = parse_number(parts[0], "--grid");
    const double hi = parse_number(parts[1], "--grid");
    const int count = static_cast<int>(parse_number(parts[2], "--grid"));
    if (count < 2 || !(lo < hi)) throw UsageError("--grid needs lo < hi and count >= 2");
    for (int i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulate input/output ODE models under structured probe signals and analyze "
                 "which parameters the data can identify"};
    // --h is the step-size flag, so help is long-form only.
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    std::function<int()> action;
    auto add_subcommand = [&](const std::string& name, const std::string& desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->set_help_flag("--help", "print help");
        return cmd;
    };

    // simulate --------------------------------------------------------------
    auto* simulate = add_subcommand("simulate", "integrate a model and emit a trajectory CSV");
    ModelArgs sim_model;
    sim_model.attach(simulate);
    std::string sim_signal;
    double sim_t0 = 0.0, sim_t1 = 5.0, sim_h = 1e-3;
    std::string sim_out = "-";
    simulate->add_option("--signal", sim_signal, "input signal spec")->required();
    simulate->add_option("--t0", sim_t0, "span start");
    simulate->add_option("--t1", sim_t1, "span end");
    simulate->add_option("--h", sim_h, "RK4 step size");
    simulate->add_option("--out", sim_out, "output CSV path ('-' = stdout)");
    simulate->callback([&] {
        action = [&]() {
            ModelHandle model;
            sim_model.load(model);
            SignalHandle sig;
            check(ioid_signal_parse(sim_signal.c_str(), sig.slot()));
            std::vector<std::string> names;
            std::vector<double> values;
            sim_model.overrides(names, values);
            auto cn = c_names(names);
            TrajectoryHandle traj;
            check(ioid_simulate(model.get(), cn.data(), values.data(),
                                static_cast<int>(cn.size()), sig.get(), sim_t0, sim_t1, sim_h,
                                traj.slot()));
            check(ioid_trajectory_write_csv(traj.get(), sim_out.c_str()));
            return 0;
        };
    });

    // respond ---------------------------------------------------------------
    auto* respond =
        add_subcommand("respond", "impulse and step response series of an LTI system");
    LtiArgs respond_sys;
    respond_sys.attach(respond, "");
    double respond_t1 = 5.0, respond_h = 1e-3;
    std::string impulse_out = "impulse.csv", step_out = "step.csv";
    respond->add_option("--t1", respond_t1, "series end time");
    respond->add_option("--h", respond_h, "sample step");
    respond->add_option("--impulse-out", impulse_out, "impulse response CSV ('-' = stdout)");
    respond->add_option("--step-out", step_out, "step response CSV ('-' = stdout)");
    respond->callback([&] {
        action = [&]() {
            LtiHandle sys;
            respond_sys.build(sys);
            SampledHandle impulse, step;
            check(ioid_lti_impulse_series(sys.get(), respond_t1, respond_h, impulse.slot()));
            check(ioid_lti_step_series(sys.get(), respond_t1, respond_h, step.slot()));
            check(ioid_sampled_write_csv(impulse.get(), impulse_out.c_str()));
            check(ioid_sampled_write_csv(step.get(), step_out.c_str()));
            return 0;
        };
    });

    // gain ------------------------------------------------------------------
    auto* gain = add_subcommand("gain", "steady-state gain -c A^{-1} b");
    LtiArgs gain_sys;
    gain_sys.attach(gain, "");
    gain->callback([&] {
        action = [&]() {
            LtiHandle sys;
            gain_sys.build(sys);
            double value = 0.0;
            check(ioid_lti_gain(sys.get(), &value));
            int hurwitz = 0;
            check(ioid_lti_is_hurwitz(sys.get(), &hurwitz));
            if (!hurwitz)
                std::fprintf(stderr, "warning: A is not Hurwitz; no steady state is reached\n");
            std::printf("%s\n", fmt(value).c_str());
            return 0;
        };
    });

    // equiv -----------------------------------------------------------------
    auto* equiv = add_subcommand("equiv", "test two LTI systems for i/o equivalence");
    LtiArgs equiv1, equiv2;
    equiv1.attach(equiv, "1");
    equiv2.attach(equiv, "2");
    double equiv_tol = 1e-9;
    equiv->add_option("--tol", equiv_tol, "relative Markov-parameter tolerance");
    equiv->callback([&] {
        action = [&]() {
            LtiHandle s1, s2;
            equiv1.build(s1);
            equiv2.build(s2);
            int equivalent = 0;
            check(ioid_lti_equivalent(s1.get(), s2.get(), equiv_tol, &equivalent));
            if (!equivalent) {
                std::printf("not equivalent\n");
                return 0;
            }
            if (equiv1.dim == equiv2.dim) {
                std::vector<double> T(static_cast<std::size_t>(equiv1.dim) *
                                      static_cast<std::size_t>(equiv1.dim));
                check(ioid_lti_similarity(s1.get(), s2.get(), equiv_tol, T.data()));
                if (equiv1.dim == 1) {
                    std::printf("equivalent, T=%s\n", fmt(T[0]).c_str());
                } else {
                    std::printf("equivalent, T=\n");
                    for (int i = 0; i < equiv1.dim; ++i) {
                        for (int j = 0; j < equiv1.dim; ++j)
                            std::printf("%s%s", j ? "," : "  ",
                                        fmt(T[static_cast<std::size_t>(i * equiv1.dim + j)])
                                            .c_str());
                        std::printf("\n");
                    }
                }
            } else {
                std::printf("equivalent\n");
            }
            return 0;
        };
    });

    // identify ---------------------------------------------------------------
    auto* identify = add_subcommand(
        "identify", "sensitivity Gram spectrum, null directions and Cramer-Rao bounds");
    ModelArgs id_model;
    id_model.attach(identify);
    std::string id_signal;
    std::vector<std::string> id_free;
    double id_t0 = 0.0, id_t1 = 10.0, id_h = 1e-3, id_sigma = 0.0, id_tol = 1e-6;
    std::string id_out = "-";
    identify->add_option("--signal", id_signal, "input signal spec")->required();
    identify->add_option("--free", id_free, "free parameter (repeatable; default: all)");
    identify->add_option("--t0", id_t0, "span start");
    identify->add_option("--t1", id_t1, "span end");
    identify->add_option("--h", id_h, "RK4 step size");
    identify->add_option("--sigma", id_sigma,
                         "noise std dev for Cramer-Rao bounds (0 skips them)");
    identify->add_option("--tol", id_tol, "relative Gram rank threshold");
    identify->add_option("--out", id_out, "report path ('-' = stdout)");
    identify->callback([&] {
        action = [&]() {
            ModelHandle model;
            id_model.load(model);
            SignalHandle sig;
            check(ioid_signal_parse(id_signal.c_str(), sig.slot()));
            std::vector<std::string> names;
            std::vector<double> values;
            id_model.overrides(names, values);
            auto cn = c_names(names);
            auto cf = c_names(id_free);
            ReportHandle report;
            check(ioid_identify(model.get(), cn.data(), values.data(),
                                static_cast<int>(cn.size()), cf.data(),
                                static_cast<int>(cf.size()), sig.get(), id_t0, id_t1, id_h,
                                id_sigma, id_tol, report.slot()));
            OwnedCString text;
            check(ioid_ident_report_text(report.get(), &text.ptr));
            print_string(id_out, text.ptr);
            return 0;
        };
    });

    // fit ---------------------------------------------------------------------
    auto* fit = add_subcommand("fit", "least-squares parameter fit from experiment CSVs");
    ModelArgs fit_model;
    fit_model.attach(fit);
    ExperimentArgs fit_data;
    fit_data.attach(fit);
    std::vector<std::string> fit_init;
    std::vector<std::string> fit_bounds;
    double fit_h = 1e-3;
    fit->add_option("--init", fit_init, "initial guesses, name=value (repeatable)")->required();
    fit->add_option("--bounds", fit_bounds, "box bounds, name=lo:hi (repeatable)");
    fit->add_option("--h", fit_h, "RK4 step size");
    fit->callback([&] {
        action = [&]() {
            ModelHandle model;
            fit_model.load(model);
            auto experiments = fit_data.load();
            std::vector<const ioid_experiment*> exp_ptrs;
            for (const auto& e : experiments) exp_ptrs.push_back(e.get());

            std::vector<std::string> fixed_names;
            std::vector<double> fixed_values;
            fit_model.overrides(fixed_names, fixed_values);
            std::vector<std::string> init_names;
            std::vector<double> init_values;
            parse_assignments(fit_init, init_names, init_values);

            std::vector<double> lo(init_names.size(), -HUGE_VAL);
            std::vector<double> hi(init_names.size(), HUGE_VAL);
            bool any_bound = false;
            for (const auto& spec : fit_bounds) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos) throw UsageError("--bounds needs name=lo:hi");
                const std::string name = spec.substr(0, eq);
                const auto parts = split(spec.substr(eq + 1), ':');
                if (parts.size() != 2) throw UsageError("--bounds needs name=lo:hi");
                bool found = false;
                for (std::size_t i = 0; i < init_names.size(); ++i) {
                    if (init_names[i] == name) {
                        lo[i] = parse_number(parts[0], "--bounds");
                        hi[i] = parse_number(parts[1], "--bounds");
                        found = any_bound = true;
                    }
                }
                if (!found)
                    throw UsageError("bound for '" + name + "' does not match any --init name");
            }

            auto c_fixed = c_names(fixed_names);
            auto c_init = c_names(init_names);
            FitHandle result;
            check(ioid_fit(model.get(), c_fixed.data(), fixed_values.data(),
                           static_cast<int>(c_fixed.size()), exp_ptrs.data(),
                           static_cast<int>(exp_ptrs.size()), c_init.data(), init_values.data(),
                           static_cast<int>(c_init.size()), any_bound ? lo.data() : nullptr,
                           any_bound ? hi.data() : nullptr, fit_h, result.slot()));
            OwnedCString text;
            check(ioid_fit_result_text(result.get(), &text.ptr));
            std::fputs(text.ptr, stdout);
            return ioid_fit_result_converged(result.get()) ? 0 : 2;
        };
    });

    // posterior ---------------------------------------------------------------
    auto* posterior =
        add_subcommand("posterior", "Bayesian grid posterior from experiment CSVs");
    ModelArgs post_model;
    post_model.attach(posterior);
    ExperimentArgs post_data;
    post_data.attach(posterior);
    std::vector<std::string> post_priors;
    double post_h = 1e-3;
    std::string post_out = "-";
    posterior->add_option("--prior", post_priors,
                          "uniform prior axis, name=lo:hi[:cells] (repeatable; default 141 "
                          "cells)")
        ->required();
    posterior->add_option("--h", post_h, "RK4 step size");
    posterior->add_option("--out", post_out, "posterior CSV path ('-' = stdout)");
    posterior->callback([&] {
        action = [&]() {
            ModelHandle model;
            post_model.load(model);
            auto experiments = post_data.load();

            std::vector<std::string> prior_names;
            std::vector<double> lo, hi;
            std::vector<int> cells;
            for (const auto& spec : post_priors) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos) throw UsageError("--prior needs name=lo:hi[:cells]");
                const auto parts = split(spec.substr(eq + 1), ':');
                if (parts.size() != 2 && parts.size() != 3)
                    throw UsageError("--prior needs name=lo:hi[:cells]");
                prior_names.push_back(spec.substr(0, eq));
                lo.push_back(parse_number(parts[0], "--prior"));
                hi.push_back(parse_number(parts[1], "--prior"));
                cells.push_back(parts.size() == 3
                                    ? static_cast<int>(parse_number(parts[2], "--prior"))
                                    : 141);
            }
            auto cp = c_names(prior_names);
            PosteriorHandle grid;
            check(ioid_posterior_uniform(cp.data(), lo.data(), hi.data(), cells.data(),
                                         static_cast<int>(cp.size()), grid.slot()));

            std::vector<std::string> fixed_names;
            std::vector<double> fixed_values;
            post_model.overrides(fixed_names, fixed_values);
            auto c_fixed = c_names(fixed_names);
            for (const auto& e : experiments)
                check(ioid_bayes_update(grid.get(), model.get(), c_fixed.data(),
                                        fixed_values.data(), static_cast<int>(c_fixed.size()),
                                        e.get(), post_h));
            check(ioid_posterior_write_csv(grid.get(), post_out.c_str()));
            return 0;
        };
    });

    // synth ---------------------------------------------------------------------
    auto* synth =
        add_subcommand("synth", "synthesize a noisy experiment CSV from a model");
    ModelArgs synth_model;
    synth_model.attach(synth);
    std::string synth_signal, synth_times, synth_grid;
    double synth_sigma = 0.0, synth_h = 1e-3;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "-";
    synth->add_option("--signal", synth_signal, "input signal spec")->required();
    synth->add_option("--times", synth_times, "comma-separated sample times");
    synth->add_option("--grid", synth_grid, "uniform sample times lo:hi:count");
    synth->add_option("--sigma", synth_sigma, "Gaussian noise std dev (0 = exact)");
    synth->add_option("--seed", synth_seed, "noise generator seed");
    synth->add_option("--h", synth_h, "RK4 step size");
    synth->add_option("--out", synth_out, "experiment CSV path ('-' = stdout)");
    synth->callback([&] {
        action = [&]() {
            ModelHandle model;
            synth_model.load(model);
            SignalHandle sig;
            check(ioid_signal_parse(synth_signal.c_str(), sig.slot()));
            const std::vector<double> times = parse_times(synth_times, synth_grid);
            std::vector<std::string> names;
            std::vector<double> values;
            synth_model.overrides(names, values);
            auto cn = c_names(names);
            ExperimentHandle e;
            check(ioid_synthesize(model.get(), cn.data(), values.data(),
                                  static_cast<int>(cn.size()), sig.get(), times.data(),
                                  times.size(), synth_sigma, synth_seed, synth_h, e.slot()));
            check(ioid_experiment_write_csv(e.get(), synth_out.c_str()));
            return 0;
        };
    });

    // deconv ---------------------------------------------------------------------
    auto* deconv = add_subcommand(
        "deconv", "recover the impulse response from response and input CSVs");
    std::string deconv_y, deconv_u, deconv_out = "-";
    double deconv_ridge = -1.0;
    deconv->add_option("--response", deconv_y, "output samples CSV (t,value)")->required();
    deconv->add_option("--input", deconv_u, "input samples CSV (t,value)")->required();
    deconv->add_option("--ridge", deconv_ridge,
                       "ridge weight; 0 = exact triangular solve, negative = auto "
                       "(1e-8 tr(M^T M)/m)");
    deconv->add_option("--out", deconv_out, "recovered impulse response CSV ('-' = stdout)");
    deconv->callback([&] {
        action = [&]() {
            SampledHandle y, u, k;
            check(ioid_sampled_read_csv(deconv_y.c_str(), y.slot()));
            check(ioid_sampled_read_csv(deconv_u.c_str(), u.slot()));
            check(ioid_deconvolve_impulse(y.get(), u.get(), deconv_ridge, k.slot()));
            check(ioid_sampled_write_csv(k.get(), deconv_out.c_str()));
            return 0;
        };
    });

    // demo ---------------------------------------------------------------------
    auto* demo = add_subcommand("demo", "run a built-in demonstration");
    std::string demo_topic;
    demo->add_option("topic", demo_topic, "'paper': the full verification battery")->required();
    demo->callback([&] {
        action = [&]() {
            if (demo_topic != "paper")
                throw UsageError("unknown demo topic '" + demo_topic + "' (try 'paper')");
            OwnedCString text;
            int n_checks = 0, n_failed = 0;
            check(ioid_demo_run(&text.ptr, &n_checks, &n_failed));
            std::fputs(text.ptr, stdout);
            return n_failed == 0 ? 0 : 2;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return action ? action() : 1;
    } catch (const ApiError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.status);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
