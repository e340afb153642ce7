#include "ioident/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>

namespace ioident {

namespace {

ExprPtr make_node(Expression node) {
    return std::make_shared<const Expression>(std::move(node));
}

bool is_const(const ExprPtr& e, double v) {
    return e->kind == ExprKind::Constant && e->value == v;
}

double pow_by_squaring(double base, int exponent) {
    double result = 1.0;
    double factor = base;
    int k = exponent;
    while (k > 0) {
        if (k & 1) result *= factor;
        k >>= 1;
        if (k) factor *= factor;
    }
    return result;
}

} // namespace

namespace {

Expression node_of(ExprKind kind) {
    Expression e;
    e.kind = kind;
    return e;
}

} // namespace

ExprPtr Expression::constant(double v) {
    Expression e = node_of(ExprKind::Constant);
    e.value = v;
    return make_node(std::move(e));
}
ExprPtr Expression::state(std::string n) {
    Expression e = node_of(ExprKind::StateVar);
    e.name = std::move(n);
    return make_node(std::move(e));
}
ExprPtr Expression::param(std::string n) {
    Expression e = node_of(ExprKind::ParamVar);
    e.name = std::move(n);
    return make_node(std::move(e));
}
ExprPtr Expression::input() { return make_node(node_of(ExprKind::InputVar)); }
ExprPtr Expression::time() { return make_node(node_of(ExprKind::TimeVar)); }

ExprPtr Expression::neg(ExprPtr e) {
    // A negated literal is stored as a negative constant so that printing and
    // reparsing agree (the parser folds the same way).
    if (e->kind == ExprKind::Constant) return constant(-e->value);
    Expression n = node_of(ExprKind::Neg);
    n.lhs = std::move(e);
    return make_node(std::move(n));
}

ExprPtr Expression::add(ExprPtr a, ExprPtr b) {
    Expression n = node_of(ExprKind::Add);
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make_node(std::move(n));
}
ExprPtr Expression::sub(ExprPtr a, ExprPtr b) {
    Expression n = node_of(ExprKind::Sub);
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make_node(std::move(n));
}
ExprPtr Expression::mul(ExprPtr a, ExprPtr b) {
    Expression n = node_of(ExprKind::Mul);
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make_node(std::move(n));
}
ExprPtr Expression::div(ExprPtr a, ExprPtr b) {
    Expression n = node_of(ExprKind::Div);
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make_node(std::move(n));
}
ExprPtr Expression::pow_int(ExprPtr base, int exponent) {
    if (exponent < 0) throw InvalidArgument("integer exponent must be nonnegative");
    Expression n = node_of(ExprKind::PowInt);
    n.lhs = std::move(base);
    n.exponent = exponent;
    return make_node(std::move(n));
}
ExprPtr Expression::exp(ExprPtr e) {
    Expression n = node_of(ExprKind::Exp);
    n.lhs = std::move(e);
    return make_node(std::move(n));
}
ExprPtr Expression::ln(ExprPtr e) {
    Expression n = node_of(ExprKind::Ln);
    n.lhs = std::move(e);
    return make_node(std::move(n));
}

void OwnedEnv::bind(const std::string& name, double v) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            values[i] = v;
            return;
        }
    }
    names.push_back(name);
    values.push_back(v);
}

EvalEnv OwnedEnv::view() const {
    EvalEnv env;
    env.state_names = &names;
    env.state_values = values.data();
    env.input = input;
    env.time = time;
    return env;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& states;
    const std::vector<std::string>& params;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg + " at offset " + std::to_string(at), at);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool consume(char c) {
        if (peek_is(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    ExprPtr parse() {
        skip_ws();
        if (pos >= text.size()) fail("empty expression", 0);
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos != text.size()) fail("unexpected trailing input", pos);
        return e;
    }

    // sum := unary (('+' | '-') unary)*
    ExprPtr parse_sum() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (consume('+')) {
                e = Expression::add(e, parse_unary());
            } else if (consume('-')) {
                e = Expression::sub(e, parse_unary());
            } else {
                return e;
            }
        }
    }

    // unary := '-' unary | product   (unary minus binds below '*')
    ExprPtr parse_unary() {
        if (consume('-')) return Expression::neg(parse_unary());
        return parse_product();
    }

    // product := power (('*' | '/') power)*
    ExprPtr parse_product() {
        ExprPtr e = parse_power();
        for (;;) {
            if (consume('*')) {
                e = Expression::mul(e, parse_power());
            } else if (consume('/')) {
                e = Expression::div(e, parse_power());
            } else {
                return e;
            }
        }
    }

    // power := primary ['^' integer]
    ExprPtr parse_power() {
        ExprPtr e = parse_primary();
        if (consume('^')) {
            skip_ws();
            std::size_t at = pos;
            if (pos < text.size() && text[pos] == '-')
                fail("exponent must be a nonnegative integer", at);
            if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
                fail("expected integer exponent", at);
            long exponent = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                exponent = exponent * 10 + (text[pos] - '0');
                if (exponent > 1000000) fail("exponent too large", at);
                ++pos;
            }
            if (pos < text.size() && (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
                fail("exponent must be an integer", at);
            e = Expression::pow_int(e, static_cast<int>(exponent));
        }
        return e;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression", pos);
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_sum();
            skip_ws();
            if (!consume(')')) fail("expected ')'", pos);
            return e;
        }
        fail(std::string("unexpected character '") + c + "'", pos);
    }

    ExprPtr parse_number() {
        const char* begin = text.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number", pos);
        pos += static_cast<std::size_t>(end - begin);
        return Expression::constant(v);
    }

    ExprPtr parse_identifier() {
        std::size_t at = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(at, pos - at);
        if (name == "exp" || name == "ln") {
            skip_ws();
            if (!consume('(')) fail("expected '(' after '" + name + "'", pos);
            ExprPtr arg = parse_sum();
            skip_ws();
            if (!consume(')')) fail("expected ')'", pos);
            return name == "exp" ? Expression::exp(arg) : Expression::ln(arg);
        }
        if (name == "u") return Expression::input();
        if (name == "t") return Expression::time();
        if (std::find(states.begin(), states.end(), name) != states.end())
            return Expression::state(name);
        if (std::find(params.begin(), params.end(), name) != params.end())
            return Expression::param(name);
        fail("unknown identifier '" + name + "'", at);
    }
};

const char* const kReserved[] = {"u", "t", "exp", "ln"};

} // namespace

ExprPtr parse_expression(const std::string& text,
                         const std::vector<std::string>& state_names,
                         const std::vector<std::string>& param_names) {
    if (text.empty()) throw ParseError("empty expression", 0);
    for (const auto& s : state_names) {
        if (std::find(param_names.begin(), param_names.end(), s) != param_names.end())
            throw InvalidArgument("name '" + s + "' declared as both state and parameter");
        for (const char* r : kReserved)
            if (s == r) throw InvalidArgument("'" + s + "' is a reserved name");
    }
    for (const auto& p : param_names)
        for (const char* r : kReserved)
            if (p == r) throw InvalidArgument("'" + p + "' is a reserved name");
    Parser parser{text, state_names, param_names};
    return parser.parse();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double lookup(const EvalEnv& env, const std::string& name) {
    if (env.state_names) {
        const auto& ns = *env.state_names;
        for (std::size_t i = 0; i < ns.size(); ++i)
            if (ns[i] == name) return env.state_values[i];
    }
    if (env.param_names) {
        const auto& ns = *env.param_names;
        for (std::size_t i = 0; i < ns.size(); ++i)
            if (ns[i] == name) return env.param_values[i];
    }
    throw InvalidArgument("unbound name '" + name + "'");
}

} // namespace

double evaluate_expression(const Expression& e, const EvalEnv& env) {
    switch (e.kind) {
        case ExprKind::Constant: return e.value;
        case ExprKind::StateVar:
        case ExprKind::ParamVar: return lookup(env, e.name);
        case ExprKind::InputVar: return env.input;
        case ExprKind::TimeVar: return env.time;
        case ExprKind::Neg: return -evaluate_expression(*e.lhs, env);
        case ExprKind::Add:
            return evaluate_expression(*e.lhs, env) + evaluate_expression(*e.rhs, env);
        case ExprKind::Sub:
            return evaluate_expression(*e.lhs, env) - evaluate_expression(*e.rhs, env);
        case ExprKind::Mul:
            return evaluate_expression(*e.lhs, env) * evaluate_expression(*e.rhs, env);
        case ExprKind::Div: {
            double num = evaluate_expression(*e.lhs, env);
            double den = evaluate_expression(*e.rhs, env);
            if (den == 0.0) throw NumericError("division by zero");
            return num / den;
        }
        case ExprKind::PowInt:
            return pow_by_squaring(evaluate_expression(*e.lhs, env), e.exponent);
        case ExprKind::Exp: return std::exp(evaluate_expression(*e.lhs, env));
        case ExprKind::Ln: {
            double v = evaluate_expression(*e.lhs, env);
            if (v <= 0.0) throw NumericError("ln of nonpositive value");
            return std::log(v);
        }
    }
    throw Error("corrupt expression node");
}

double evaluate_expression(const ExprPtr& e, const EvalEnv& env) {
    return evaluate_expression(*e, env);
}

// ---------------------------------------------------------------------------
// Simplifying constructors and differentiation

namespace {

ExprPtr s_neg(const ExprPtr& e) {
    if (e->kind == ExprKind::Constant) return Expression::constant(-e->value);
    if (e->kind == ExprKind::Neg) return e->lhs;
    return Expression::neg(e);
}

ExprPtr s_add(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
        return Expression::constant(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return Expression::add(a, b);
}

ExprPtr s_sub(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
        return Expression::constant(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return s_neg(b);
    return Expression::sub(a, b);
}

ExprPtr s_mul(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
        return Expression::constant(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return Expression::constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return s_neg(b);
    if (is_const(b, -1.0)) return s_neg(a);
    return Expression::mul(a, b);
}

ExprPtr s_div(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant && b->value != 0.0)
        return Expression::constant(a->value / b->value);
    if (is_const(b, 1.0)) return a;
    if (is_const(b, -1.0)) return s_neg(a);
    return Expression::div(a, b);
}

ExprPtr s_pow(const ExprPtr& base, int exponent) {
    if (exponent == 0) return Expression::constant(1.0);
    if (exponent == 1) return base;
    if (base->kind == ExprKind::Constant)
        return Expression::constant(pow_by_squaring(base->value, exponent));
    return Expression::pow_int(base, exponent);
}

ExprPtr s_exp(const ExprPtr& e) {
    if (e->kind == ExprKind::Constant) return Expression::constant(std::exp(e->value));
    return Expression::exp(e);
}

ExprPtr s_ln(const ExprPtr& e) {
    if (e->kind == ExprKind::Constant && e->value > 0.0)
        return Expression::constant(std::log(e->value));
    return Expression::ln(e);
}

ExprPtr derivative(const ExprPtr& e, const std::string& var) {
    switch (e->kind) {
        case ExprKind::Constant:
        case ExprKind::InputVar:
        case ExprKind::TimeVar: return Expression::constant(0.0);
        case ExprKind::StateVar:
        case ExprKind::ParamVar:
            return Expression::constant(e->name == var ? 1.0 : 0.0);
        case ExprKind::Neg: return s_neg(derivative(e->lhs, var));
        case ExprKind::Add: return s_add(derivative(e->lhs, var), derivative(e->rhs, var));
        case ExprKind::Sub: return s_sub(derivative(e->lhs, var), derivative(e->rhs, var));
        case ExprKind::Mul:
            return s_add(s_mul(derivative(e->lhs, var), e->rhs),
                         s_mul(e->lhs, derivative(e->rhs, var)));
        case ExprKind::Div:
            return s_div(s_sub(s_mul(derivative(e->lhs, var), e->rhs),
                               s_mul(e->lhs, derivative(e->rhs, var))),
                         s_pow(e->rhs, 2));
        case ExprKind::PowInt:
            if (e->exponent == 0) return Expression::constant(0.0);
            return s_mul(s_mul(Expression::constant(e->exponent), s_pow(e->lhs, e->exponent - 1)),
                         derivative(e->lhs, var));
        case ExprKind::Exp: return s_mul(s_exp(e->lhs), derivative(e->lhs, var));
        case ExprKind::Ln: return s_div(derivative(e->lhs, var), e->lhs);
    }
    throw Error("corrupt expression node");
}

} // namespace

ExprPtr differentiate_expression(const ExprPtr& e, const std::string& var) {
    return derivative(e, var);
}

ExprPtr simplify_expression(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Constant:
        case ExprKind::StateVar:
        case ExprKind::ParamVar:
        case ExprKind::InputVar:
        case ExprKind::TimeVar: return e;
        case ExprKind::Neg: return s_neg(simplify_expression(e->lhs));
        case ExprKind::Add:
            return s_add(simplify_expression(e->lhs), simplify_expression(e->rhs));
        case ExprKind::Sub:
            return s_sub(simplify_expression(e->lhs), simplify_expression(e->rhs));
        case ExprKind::Mul:
            return s_mul(simplify_expression(e->lhs), simplify_expression(e->rhs));
        case ExprKind::Div:
            return s_div(simplify_expression(e->lhs), simplify_expression(e->rhs));
        case ExprKind::PowInt: return s_pow(simplify_expression(e->lhs), e->exponent);
        case ExprKind::Exp: return s_exp(simplify_expression(e->lhs));
        case ExprKind::Ln: return s_ln(simplify_expression(e->lhs));
    }
    throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Grammar level of a node: sums 1, unary minus 2, products 3, powers 4,
// atoms 5. A child is parenthesized whenever its level is too low for the
// slot it appears in, so printing reparses to the identical tree.
int level_of(const Expression& e) {
    switch (e.kind) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Neg: return 2;
        case ExprKind::Constant: return e.value < 0 ? 2 : 5;
        case ExprKind::Mul:
        case ExprKind::Div: return 3;
        case ExprKind::PowInt: return 4;
        default: return 5;
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_node(const ExprPtr& e, std::string& out);

void print_child(const ExprPtr& child, int min_level, std::string& out) {
    if (level_of(*child) < min_level) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const ExprPtr& e, std::string& out) {
    switch (e->kind) {
        case ExprKind::Constant: out += format_double(e->value); return;
        case ExprKind::StateVar:
        case ExprKind::ParamVar: out += e->name; return;
        case ExprKind::InputVar: out += 'u'; return;
        case ExprKind::TimeVar: out += 't'; return;
        case ExprKind::Neg:
            out += '-';
            print_child(e->lhs, 3, out);
            return;
        case ExprKind::Add:
            print_child(e->lhs, 1, out);
            out += " + ";
            print_child(e->rhs, 2, out);
            return;
        case ExprKind::Sub:
            print_child(e->lhs, 1, out);
            out += " - ";
            print_child(e->rhs, 2, out);
            return;
        case ExprKind::Mul:
            print_child(e->lhs, 3, out);
            out += '*';
            print_child(e->rhs, 4, out);
            return;
        case ExprKind::Div:
            print_child(e->lhs, 3, out);
            out += '/';
            print_child(e->rhs, 4, out);
            return;
        case ExprKind::PowInt:
            print_child(e->lhs, 5, out);
            out += '^';
            out += std::to_string(e->exponent);
            return;
        case ExprKind::Exp:
        case ExprKind::Ln:
            out += e->kind == ExprKind::Exp ? "exp(" : "ln(";
            print_node(e->lhs, out);
            out += ')';
            return;
    }
}

} // namespace

std::string to_string(const ExprPtr& e) {
    std::string out;
    print_node(e, out);
    return out;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Constant: return a->value == b->value;
        case ExprKind::StateVar:
        case ExprKind::ParamVar: return a->name == b->name;
        case ExprKind::InputVar:
        case ExprKind::TimeVar: return true;
        case ExprKind::PowInt:
            return a->exponent == b->exponent && expr_equal(a->lhs, b->lhs);
        case ExprKind::Neg:
        case ExprKind::Exp:
        case ExprKind::Ln: return expr_equal(a->lhs, b->lhs);
        default: return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    }
}

namespace {

void collect_names(const ExprPtr& e, std::vector<std::string>& out) {
    if (e->kind == ExprKind::StateVar || e->kind == ExprKind::ParamVar) {
        if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
        return;
    }
    if (e->lhs) collect_names(e->lhs, out);
    if (e->rhs) collect_names(e->rhs, out);
}

} // namespace

std::vector<std::string> referenced_names(const ExprPtr& e) {
    std::vector<std::string> out;
    collect_names(e, out);
    return out;
}

} // namespace ioident
