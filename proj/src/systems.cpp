#include "ioident/systems.hpp"

#include <algorithm>
#include <cmath>

namespace ioident {

LinearSystem build_linear_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                 const Eigen::RowVectorXd& c) {
    if (A.rows() < 1 || A.rows() != A.cols())
        throw InvalidArgument("A must be square with n >= 1");
    if (b.size() != A.rows())
        throw InvalidArgument("b length " + std::to_string(b.size()) + " does not match n = " +
                              std::to_string(A.rows()));
    if (c.size() != A.rows())
        throw InvalidArgument("c length " + std::to_string(c.size()) + " does not match n = " +
                              std::to_string(A.rows()));
    if (!A.allFinite() || !b.allFinite() || !c.allFinite())
        throw InvalidArgument("system entries must be finite");
    return LinearSystem{A, b, c};
}

LinearSystem scalar_lti(double a, double b, double c) {
    Eigen::MatrixXd A(1, 1);
    A(0, 0) = -a;
    Eigen::VectorXd bv(1);
    bv(0) = b;
    Eigen::RowVectorXd cv(1);
    cv(0) = c;
    return build_linear_system(A, bv, cv);
}

void validate_system(const GeneralSystem& sys) {
    if (sys.state_names.empty()) throw InvalidArgument("system needs at least one state");
    if (sys.rhs.size() != sys.state_names.size())
        throw InvalidArgument("rhs count does not match state count");
    if (!sys.output) throw InvalidArgument("system needs an output expression");
    if (sys.x0.size() != static_cast<Eigen::Index>(sys.state_names.size()))
        throw InvalidArgument("x0 length does not match state count");
    if (!sys.x0.allFinite()) throw InvalidArgument("x0 must be finite");

    auto declared = [&](const std::string& name) {
        return std::find(sys.state_names.begin(), sys.state_names.end(), name) !=
                   sys.state_names.end() ||
               std::find(sys.param_names.begin(), sys.param_names.end(), name) !=
                   sys.param_names.end();
    };
    auto check_expr = [&](const ExprPtr& e, const std::string& where) {
        if (!e) throw InvalidArgument("missing expression for " + where);
        for (const auto& name : referenced_names(e))
            if (!declared(name))
                throw InvalidArgument("expression for " + where + " references undeclared name '" +
                                      name + "'");
    };
    for (std::size_t i = 0; i < sys.rhs.size(); ++i)
        check_expr(sys.rhs[i], "state '" + sys.state_names[i] + "'");
    check_expr(sys.output, "the output");
}

GeneralSystem make_general_system(std::vector<std::string> state_names,
                                  std::vector<std::string> param_names,
                                  const std::vector<std::string>& rhs_text,
                                  const std::string& output_text, std::vector<double> x0) {
    GeneralSystem sys;
    sys.state_names = std::move(state_names);
    sys.param_names = std::move(param_names);
    for (const auto& text : rhs_text)
        sys.rhs.push_back(parse_expression(text, sys.state_names, sys.param_names));
    sys.output = parse_expression(output_text, sys.state_names, sys.param_names);
    if (x0.empty()) {
        sys.x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.state_names.size()));
    } else {
        sys.x0 = Eigen::Map<Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    }
    validate_system(sys);
    return sys;
}

GeneralSystem lti_to_general(const LinearSystem& lin) {
    const int n = lin.n();
    GeneralSystem sys;
    for (int i = 0; i < n; ++i) sys.state_names.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) {
        ExprPtr sum;
        for (int j = 0; j < n; ++j) {
            if (lin.A(i, j) == 0.0) continue;
            ExprPtr term = Expression::mul(Expression::constant(lin.A(i, j)),
                                           Expression::state(sys.state_names[j]));
            sum = sum ? Expression::add(sum, term) : term;
        }
        if (lin.b(i) != 0.0) {
            ExprPtr term = Expression::mul(Expression::constant(lin.b(i)), Expression::input());
            sum = sum ? Expression::add(sum, term) : term;
        }
        sys.rhs.push_back(sum ? sum : Expression::constant(0.0));
    }
    ExprPtr out;
    for (int j = 0; j < n; ++j) {
        if (lin.c(j) == 0.0) continue;
        ExprPtr term = Expression::mul(Expression::constant(lin.c(j)),
                                       Expression::state(sys.state_names[j]));
        out = out ? Expression::add(out, term) : term;
    }
    sys.output = out ? out : Expression::constant(0.0);
    sys.x0 = Eigen::VectorXd::Zero(n);
    validate_system(sys);
    return sys;
}

ParamMap resolve_params(const GeneralSystem& sys, const ParamMap& defaults,
                        const ParamMap& overrides) {
    ParamMap full = defaults;
    for (const auto& [name, value] : overrides) {
        if (std::find(sys.param_names.begin(), sys.param_names.end(), name) ==
            sys.param_names.end())
            throw InvalidArgument("unknown parameter '" + name + "'");
        full[name] = value;
    }
    for (const auto& name : sys.param_names)
        if (!full.count(name)) throw InvalidArgument("parameter '" + name + "' is unbound");
    return full;
}

// ---------------------------------------------------------------------------
// Model registry

namespace {

double param(const ParamMap& p, const std::string& name) {
    auto it = p.find(name);
    if (it == p.end()) throw InvalidArgument("parameter '" + name + "' is unbound");
    return it->second;
}

[[noreturn]] void no_closed_form(const std::string& why) {
    throw InvalidArgument("no closed form registered: " + why);
}

// Response of dx/dt = -a x + q, x(t_ref) = x_ref, held forcing q, at t >= t_ref.
double decay_step(double a, double q, double x_ref, double dt) {
    if (a == 0.0) return x_ref + q * dt;
    return q / a + (x_ref - q / a) * std::exp(-a * dt);
}

ClosedFormResult scalar_lti_closed(const ParamMap& p, const InputSignal& s, double t) {
    const double a = param(p, "a"), b = param(p, "b"), c = param(p, "c");
    double x = 0.0;
    if (t >= 0.0) {
        if (const auto* step = std::get_if<sig::Step>(&s)) {
            x = decay_step(a, b * step->u0, 0.0, t);
        } else if (const auto* pulse = std::get_if<sig::Pulse>(&s)) {
            if (t >= pulse->t_on) {
                double rise_end = std::min(t, pulse->t_off);
                x = decay_step(a, b * pulse->u0, 0.0, rise_end - pulse->t_on);
                if (t >= pulse->t_off) x = decay_step(a, 0.0, x, t - pulse->t_off);
            }
        } else if (const auto* ramp = std::get_if<sig::Ramp>(&s)) {
            const double s0 = ramp->slope;
            if (a == 0.0)
                x = b * s0 * t * t / 2.0;
            else
                x = b * s0 / (a * a) * (a * t - 1.0 + std::exp(-a * t));
        } else if (std::holds_alternative<sig::Zero>(s)) {
            x = 0.0;
        } else {
            no_closed_form("scalar-lti supports zero, step, pulse and ramp");
        }
    }
    ClosedFormResult out;
    out.x = Eigen::VectorXd::Constant(1, x);
    out.y = c * x;
    return out;
}

ClosedFormResult lambda_system_closed(const ParamMap& p, const InputSignal& s, double t) {
    const double lam = param(p, "lambda"), a_tot = param(p, "a_tot");
    if (lam == 0.0) no_closed_form("lambda must be nonzero");
    double x = 0.0, z = 0.0;
    if (t >= 0.0) {
        if (const auto* step = std::get_if<sig::Step>(&s)) {
            const double u0 = step->u0;
            x = u0 * u0 / lam * (1.0 - std::exp(-lam * t));
            z = u0 / lam * (1.0 - std::exp(-lam * t));
        } else if (const auto* pulse = std::get_if<sig::Pulse>(&s)) {
            if (pulse->t_on != 0.0) no_closed_form("lambda-system pulses must start at t = 0");
            const double u0 = pulse->u0;
            const double rise_end = std::min(t, pulse->t_off);
            x = u0 * u0 / lam * (1.0 - std::exp(-lam * rise_end));
            z = u0 / lam * (1.0 - std::exp(-lam * rise_end));
            if (t >= pulse->t_off) {
                const double decay = std::exp(-lam * (t - pulse->t_off));
                x *= decay;
                z *= decay;
            }
        } else if (const auto* ramp = std::get_if<sig::Ramp>(&s)) {
            const double s0 = ramp->slope;
            const double e = std::exp(-lam * t);
            x = s0 * s0 *
                (t * t / lam - 2.0 * t / (lam * lam) + 2.0 / (lam * lam * lam) * (1.0 - e));
            z = s0 * (t / lam - 1.0 / (lam * lam) * (1.0 - e));
        } else if (std::holds_alternative<sig::Zero>(s)) {
            x = z = 0.0;
        } else {
            no_closed_form("lambda-system supports zero, step, pulse and ramp");
        }
    }
    ClosedFormResult out;
    out.x = Eigen::VectorXd(2);
    out.x << x, z;
    out.y = x + eval_signal(s, t) * (a_tot - z);
    return out;
}

ClosedFormResult lambda_split_closed(const ParamMap& p, const InputSignal& s, double t) {
    const double lx = param(p, "lambda_x"), lz = param(p, "lambda_z"), a_tot = param(p, "a_tot");
    if (lx == 0.0 || lz == 0.0) no_closed_form("rates must be nonzero");
    double x = 0.0, z = 0.0;
    if (t >= 0.0) {
        if (const auto* step = std::get_if<sig::Step>(&s)) {
            const double u0 = step->u0;
            x = u0 * u0 / lx * (1.0 - std::exp(-lx * t));
            z = u0 / lz * (1.0 - std::exp(-lz * t));
        } else if (std::holds_alternative<sig::Zero>(s)) {
            x = z = 0.0;
        } else {
            no_closed_form("lambda-system-split supports zero and step");
        }
    }
    ClosedFormResult out;
    out.x = Eigen::VectorXd(2);
    out.x << x, z;
    out.y = x + eval_signal(s, t) * (a_tot - z);
    return out;
}

std::size_t kind_index(const InputSignal& s) { return s.index(); }

ModelRegistryEntry make_scalar_lti() {
    ModelRegistryEntry e;
    e.id = "scalar-lti";
    e.system = make_general_system({"x"}, {"a", "b", "c"}, {"-a*x + b*u"}, "c*x");
    e.default_params = {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}};
    for (auto k : {InputSignal{sig::Zero{}}, InputSignal{sig::Step{}}, InputSignal{sig::Pulse{}},
                   InputSignal{sig::Ramp{}}})
        e.closed_forms[kind_index(k)] = scalar_lti_closed;
    return e;
}

ModelRegistryEntry make_lambda_system() {
    ModelRegistryEntry e;
    e.id = "lambda-system";
    e.system = make_general_system({"x", "z"}, {"lambda", "a_tot"},
                                   {"-lambda*x + u^2", "-lambda*z + u"}, "x + u*(a_tot - z)");
    e.default_params = {{"lambda", 1.0}, {"a_tot", 2.0}};
    for (auto k : {InputSignal{sig::Zero{}}, InputSignal{sig::Step{}}, InputSignal{sig::Pulse{}},
                   InputSignal{sig::Ramp{}}})
        e.closed_forms[kind_index(k)] = lambda_system_closed;
    return e;
}

ModelRegistryEntry make_lambda_split() {
    ModelRegistryEntry e;
    e.id = "lambda-system-split";
    e.system =
        make_general_system({"x", "z"}, {"lambda_x", "lambda_z", "a_tot"},
                            {"-lambda_x*x + u^2", "-lambda_z*z + u"}, "x + u*(a_tot - z)");
    e.default_params = {{"lambda_x", 1.0}, {"lambda_z", 0.5}, {"a_tot", 2.0}};
    for (auto k : {InputSignal{sig::Zero{}}, InputSignal{sig::Step{}}})
        e.closed_forms[kind_index(k)] = lambda_split_closed;
    return e;
}

ModelRegistryEntry make_fast_reporter_linear() {
    ModelRegistryEntry e;
    e.id = "fast-reporter-linear";
    e.system = make_general_system({"x", "y"}, {"a", "b", "c", "eps"},
                                   {"-a*x + b*u", "(-y + c*x)/eps"}, "y");
    e.default_params = {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"eps", 1e-3}};
    return e;
}

ModelRegistryEntry make_fast_reporter_nonlinear() {
    ModelRegistryEntry e;
    e.id = "fast-reporter-nonlinear";
    e.system = make_general_system(
        {"x", "z", "y"}, {"lambda", "a_tot", "eps"},
        {"-lambda*x + u^2", "-lambda*z + u", "(-y + x + u*(a_tot - z))/eps"}, "y");
    e.default_params = {{"lambda", 1.0}, {"a_tot", 2.0}, {"eps", 1e-3}};
    return e;
}

using EntryFactory = ModelRegistryEntry (*)();

const std::vector<std::pair<std::string, EntryFactory>>& registry() {
    static const std::vector<std::pair<std::string, EntryFactory>> entries = {
        {"scalar-lti", make_scalar_lti},
        {"lambda-system", make_lambda_system},
        {"lambda-system-split", make_lambda_split},
        {"fast-reporter-linear", make_fast_reporter_linear},
        {"fast-reporter-nonlinear", make_fast_reporter_nonlinear},
    };
    return entries;
}

} // namespace

ModelRegistryEntry get_registry_model(const std::string& id) {
    for (const auto& [name, factory] : registry())
        if (name == id) return factory();
    throw InvalidArgument("unknown registry model '" + id + "'");
}

std::vector<std::string> registry_model_ids() {
    std::vector<std::string> out;
    for (const auto& [name, factory] : registry()) out.push_back(name);
    return out;
}

} // namespace ioident
