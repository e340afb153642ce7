#include "ioident/signals.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ioident {

namespace {

struct Validate {
    void operator()(const sig::Zero&) const {}
    void operator()(const sig::Step& s) const {
        if (!std::isfinite(s.u0)) throw InvalidArgument("step magnitude must be finite");
    }
    void operator()(const sig::Pulse& s) const {
        if (!std::isfinite(s.u0) || !std::isfinite(s.t_on) || !std::isfinite(s.t_off))
            throw InvalidArgument("pulse fields must be finite");
        if (!(s.t_on < s.t_off)) throw InvalidArgument("pulse requires t_on < t_off");
    }
    void operator()(const sig::Ramp& s) const {
        if (!std::isfinite(s.slope)) throw InvalidArgument("ramp slope must be finite");
    }
    void operator()(const sig::ImpulseApprox& s) const {
        if (!std::isfinite(s.area) || !std::isfinite(s.width))
            throw InvalidArgument("impulse fields must be finite");
        if (!(s.width > 0.0)) throw InvalidArgument("impulse width must be positive");
    }
    void operator()(const sig::PiecewiseLinear& s) const {
        if (s.knots.empty()) throw InvalidArgument("piecewise-linear signal needs knots");
        for (std::size_t i = 0; i < s.knots.size(); ++i) {
            if (!std::isfinite(s.knots[i].first) || !std::isfinite(s.knots[i].second))
                throw InvalidArgument("knot values must be finite");
            if (i > 0 && !(s.knots[i - 1].first < s.knots[i].first))
                throw InvalidArgument("knot times must be strictly increasing");
        }
    }
};

double eval_pwl(const sig::PiecewiseLinear& s, double t) {
    const auto& k = s.knots;
    if (t < k.front().first) return 0.0;
    if (t >= k.back().first) return k.back().second;
    for (std::size_t i = 1; i < k.size(); ++i) {
        if (t < k[i].first) {
            double t0 = k[i - 1].first, v0 = k[i - 1].second;
            double t1 = k[i].first, v1 = k[i].second;
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return k.back().second;
}

struct Eval {
    double t;
    double operator()(const sig::Zero&) const { return 0.0; }
    double operator()(const sig::Step& s) const { return t >= 0.0 ? s.u0 : 0.0; }
    double operator()(const sig::Pulse& s) const {
        return (t >= s.t_on && t < s.t_off) ? s.u0 : 0.0;
    }
    double operator()(const sig::Ramp& s) const { return t >= 0.0 ? s.slope * t : 0.0; }
    double operator()(const sig::ImpulseApprox& s) const {
        return (t >= 0.0 && t < s.width) ? s.area / s.width : 0.0;
    }
    double operator()(const sig::PiecewiseLinear& s) const { return eval_pwl(s, t); }
};

struct EvalLeft {
    double t;
    double operator()(const sig::Zero&) const { return 0.0; }
    double operator()(const sig::Step& s) const { return t > 0.0 ? s.u0 : 0.0; }
    double operator()(const sig::Pulse& s) const {
        return (t > s.t_on && t <= s.t_off) ? s.u0 : 0.0;
    }
    double operator()(const sig::Ramp& s) const { return t >= 0.0 ? s.slope * t : 0.0; }
    double operator()(const sig::ImpulseApprox& s) const {
        return (t > 0.0 && t <= s.width) ? s.area / s.width : 0.0;
    }
    double operator()(const sig::PiecewiseLinear& s) const { return eval_pwl(s, t); }
};

struct Breakpoints {
    std::vector<double> operator()(const sig::Zero&) const { return {}; }
    std::vector<double> operator()(const sig::Step&) const { return {0.0}; }
    std::vector<double> operator()(const sig::Pulse& s) const { return {s.t_on, s.t_off}; }
    std::vector<double> operator()(const sig::Ramp&) const { return {0.0}; }
    std::vector<double> operator()(const sig::ImpulseApprox& s) const { return {0.0, s.width}; }
    std::vector<double> operator()(const sig::PiecewiseLinear& s) const {
        std::vector<double> out;
        out.reserve(s.knots.size());
        for (const auto& k : s.knots) out.push_back(k.first);
        return out;
    }
};

} // namespace

void validate_signal(const InputSignal& s) { std::visit(Validate{}, s); }

double eval_signal(const InputSignal& s, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("signal time must be finite");
    return std::visit(Eval{t}, s);
}

double eval_signal_left(const InputSignal& s, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("signal time must be finite");
    return std::visit(EvalLeft{t}, s);
}

std::vector<double> signal_breakpoints(const InputSignal& s) {
    return std::visit(Breakpoints{}, s);
}

std::complex<double> signal_laplace(const InputSignal& s, std::complex<double> sigma) {
    if (!(sigma.real() > 0.0))
        throw InvalidArgument("Laplace transform requires Re(sigma) > 0");
    if (const auto* step = std::get_if<sig::Step>(&s)) return step->u0 / sigma;
    if (const auto* ramp = std::get_if<sig::Ramp>(&s)) return ramp->slope / (sigma * sigma);
    if (const auto* pulse = std::get_if<sig::Pulse>(&s))
        return pulse->u0 * (std::exp(-sigma * pulse->t_on) - std::exp(-sigma * pulse->t_off)) /
               sigma;
    throw InvalidArgument("Laplace transform supported for step, ramp and pulse signals only");
}

const char* signal_class_name(const InputSignal& s) {
    static const char* const names[] = {"zero", "step", "pulse", "ramp", "impulse", "pwl"};
    return names[s.index()];
}

namespace {

std::vector<double> split_numbers(const std::string& body, char sep, const std::string& spec) {
    std::vector<double> out;
    std::string token;
    std::istringstream in(body);
    while (std::getline(in, token, sep)) {
        try {
            std::size_t used = 0;
            double v = std::stod(token, &used);
            while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
                ++used;
            if (used != token.size()) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("bad number '" + token + "' in signal spec '" + spec + "'");
        }
    }
    if (body.empty() || body.back() == sep)
        throw ParseError("trailing separator in signal spec '" + spec + "'");
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

InputSignal parse_signal_spec(const std::string& spec) {
    std::string head = spec, body;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        head = spec.substr(0, colon);
        body = spec.substr(colon + 1);
    }
    InputSignal out;
    if (head == "zero") {
        if (!body.empty()) throw ParseError("'zero' takes no arguments");
        out = sig::Zero{};
    } else if (head == "step") {
        auto v = split_numbers(body, ',', spec);
        if (v.size() != 1) throw ParseError("expected step:<u0>");
        out = sig::Step{v[0]};
    } else if (head == "pulse") {
        auto v = split_numbers(body, ',', spec);
        if (v.size() != 3) throw ParseError("expected pulse:<u0>,<t_on>,<t_off>");
        out = sig::Pulse{v[0], v[1], v[2]};
    } else if (head == "ramp") {
        auto v = split_numbers(body, ',', spec);
        if (v.size() != 1) throw ParseError("expected ramp:<slope>");
        out = sig::Ramp{v[0]};
    } else if (head == "impulse") {
        auto v = split_numbers(body, ',', spec);
        if (v.size() != 2) throw ParseError("expected impulse:<area>,<width>");
        out = sig::ImpulseApprox{v[0], v[1]};
    } else if (head == "pwl") {
        sig::PiecewiseLinear pwl;
        std::string pair;
        std::istringstream in(body);
        while (std::getline(in, pair, ';')) {
            auto v = split_numbers(pair, ',', spec);
            if (v.size() != 2) throw ParseError("expected pwl:<t0>,<v0>;<t1>,<v1>;...");
            pwl.knots.emplace_back(v[0], v[1]);
        }
        out = pwl;
    } else {
        throw ParseError("unknown signal spec '" + spec + "'");
    }
    try {
        validate_signal(out);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string(e.what()) + " in signal spec '" + spec + "'");
    }
    return out;
}

std::string format_signal_spec(const InputSignal& s) {
    struct Format {
        std::string operator()(const sig::Zero&) const { return "zero"; }
        std::string operator()(const sig::Step& v) const { return "step:" + fmt(v.u0); }
        std::string operator()(const sig::Pulse& v) const {
            return "pulse:" + fmt(v.u0) + "," + fmt(v.t_on) + "," + fmt(v.t_off);
        }
        std::string operator()(const sig::Ramp& v) const { return "ramp:" + fmt(v.slope); }
        std::string operator()(const sig::ImpulseApprox& v) const {
            return "impulse:" + fmt(v.area) + "," + fmt(v.width);
        }
        std::string operator()(const sig::PiecewiseLinear& v) const {
            std::string out = "pwl:";
            for (std::size_t i = 0; i < v.knots.size(); ++i) {
                if (i) out += ';';
                out += fmt(v.knots[i].first) + "," + fmt(v.knots[i].second);
            }
            return out;
        }
    };
    return std::visit(Format{}, s);
}

} // namespace ioident
