#include "ioident/sim.hpp"

#include <algorithm>
#include <cmath>

namespace ioident {

namespace detail {

std::vector<double> build_grid(double t0, double t1, double h,
                               const std::vector<double>& breakpoints,
                               std::span<const double> extra_times) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t0 < t1))
        throw InvalidArgument("integration span requires finite t0 < t1");
    if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
    if (h > (t1 - t0) * (1.0 + 1e-12)) throw InvalidArgument("step size exceeds the span");
    if ((t1 - t0) / h > 2e7)
        throw InvalidArgument("grid would exceed 2e7 nodes; enlarge h or shrink the span");

    const double tol = 1e-9 * h;
    struct Point {
        double t;
        bool pinned; // breakpoints and requested sample times win over uniform nodes
    };
    std::vector<Point> pts;
    for (long k = 0;; ++k) {
        double t = t0 + static_cast<double>(k) * h;
        if (t >= t1 - tol) break;
        pts.push_back({t, false});
    }
    pts.push_back({t1, true});
    pts[0].pinned = true;

    auto add_pinned = [&](double t) {
        if (t > t0 + tol && t < t1 - tol) pts.push_back({t, true});
    };
    for (double b : breakpoints) add_pinned(b);
    for (double e : extra_times) add_pinned(e);

    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.t < b.t; });

    std::vector<double> grid;
    grid.reserve(pts.size());
    for (const auto& p : pts) {
        if (grid.empty() || p.t - grid.back() > tol) {
            grid.push_back(p.t);
        } else if (p.pinned) {
            grid.back() = p.t; // snap the coincident uniform node onto the exact time
        }
    }
    return grid;
}

void rk4_on_grid(const OdeRhs& rhs, const InputSignal& sig, const Eigen::VectorXd& x0,
                 const std::vector<double>& grid, const GridVisitor& visit) {
    const Eigen::Index n = x0.size();
    Eigen::VectorXd x = x0, k1(n), k2(n), k3(n), k4(n), xt(n);

    auto check = [&](double t) {
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12)
            throw NumericError("state diverged near t = " + std::to_string(t));
    };

    check(grid[0]);
    visit(0, grid[0], eval_signal(sig, grid[0]), x);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double ta = grid[i - 1], tb = grid[i];
        const double hs = tb - ta;
        const double tm = ta + 0.5 * hs;
        const double ua = eval_signal(sig, ta);
        const double um = eval_signal(sig, tm);
        const double ub = eval_signal_left(sig, tb); // stay inside the smooth segment

        rhs(ta, ua, x, k1);
        xt = x + 0.5 * hs * k1;
        rhs(tm, um, xt, k2);
        xt = x + 0.5 * hs * k2;
        rhs(tm, um, xt, k3);
        xt = x + hs * k3;
        rhs(tb, ub, xt, k4);
        x += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        check(tb);
        visit(i, tb, eval_signal(sig, tb), x);
    }
}

void rk4_integrate(const OdeRhs& rhs, const InputSignal& sig, const Eigen::VectorXd& x0,
                   double t0, double t1, double h, std::span<const double> extra_times,
                   const GridVisitor& visit) {
    rk4_on_grid(rhs, sig, x0, build_grid(t0, t1, h, signal_breakpoints(sig), extra_times), visit);
}

} // namespace detail

Trajectory integrate(const GeneralSystem& sys, const ParamMap& params, const InputSignal& sig,
                     double t0, double t1, const SolverConfig& cfg,
                     std::span<const double> extra_times) {
    validate_system(sys);
    validate_signal(sig);
    const ParamMap full = resolve_params(sys, {}, params);
    const std::size_t n = sys.state_names.size();

    std::vector<double> param_values;
    std::vector<std::string> param_names = sys.param_names;
    for (const auto& name : param_names) param_values.push_back(full.at(name));

    EvalEnv env;
    env.state_names = &sys.state_names;
    env.param_names = &param_names;
    env.param_values = param_values.data();

    auto rhs = [&](double t, double u, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        env.state_values = x.data();
        env.input = u;
        env.time = t;
        for (std::size_t i = 0; i < n; ++i) dx[static_cast<Eigen::Index>(i)] =
            evaluate_expression(*sys.rhs[i], env);
    };

    const std::vector<double> grid =
        detail::build_grid(t0, t1, cfg.h, signal_breakpoints(sig), extra_times);
    const std::size_t count = grid.size();
    Trajectory traj;
    traj.times.resize(count);
    traj.states.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(n));
    traj.inputs.resize(count);
    traj.outputs.resize(count);

    detail::rk4_on_grid(rhs, sig, sys.x0, grid,
                        [&](std::size_t i, double t, double u, const Eigen::VectorXd& x) {
                            traj.times[i] = t;
                            traj.states.row(static_cast<Eigen::Index>(i)) = x.transpose();
                            traj.inputs[i] = u;
                            env.state_values = x.data();
                            env.input = u;
                            env.time = t;
                            traj.outputs[i] = evaluate_expression(*sys.output, env);
                        });
    return traj;
}

ClosedFormResult closed_form_full(const ModelRegistryEntry& entry, const ParamMap& params,
                                  const InputSignal& sig, double t) {
    auto it = entry.closed_forms.find(sig.index());
    if (it == entry.closed_forms.end())
        throw InvalidArgument("no closed form registered for model '" + entry.id +
                              "' under signal class '" + signal_class_name(sig) + "'");
    const ParamMap full = resolve_params(entry.system, entry.default_params, params);
    return it->second(full, sig, t);
}

double closed_form_output(const ModelRegistryEntry& entry, const ParamMap& params,
                          const InputSignal& sig, double t) {
    return closed_form_full(entry, params, sig, t).y;
}

double closed_form_output(const std::string& model_id, const ParamMap& params,
                          const InputSignal& sig, double t) {
    return closed_form_output(get_registry_model(model_id), params, sig, t);
}

} // namespace ioident
