#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ioident/errors.hpp"

namespace ioident {

enum class ExprKind {
    Constant,
    StateVar,
    ParamVar,
    InputVar, // the reserved input symbol `u`
    TimeVar,  // the reserved time symbol `t`
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    PowInt, // integer exponent >= 0
    Exp,
    Ln,
};

class Expression;
using ExprPtr = std::shared_ptr<const Expression>;

/// Immutable node of a scalar expression tree. Trees are shared freely;
/// all operations on them are pure, so concurrent use is unrestricted.
class Expression {
  public:
    ExprKind kind = ExprKind::Constant;
    double value = 0.0;   // Constant
    std::string name;     // StateVar / ParamVar
    int exponent = 0;     // PowInt
    ExprPtr lhs, rhs;     // children; rhs empty for unary nodes

    static ExprPtr constant(double v);
    static ExprPtr state(std::string name);
    static ExprPtr param(std::string name);
    static ExprPtr input();
    static ExprPtr time();
    static ExprPtr neg(ExprPtr e);
    static ExprPtr add(ExprPtr a, ExprPtr b);
    static ExprPtr sub(ExprPtr a, ExprPtr b);
    static ExprPtr mul(ExprPtr a, ExprPtr b);
    static ExprPtr div(ExprPtr a, ExprPtr b);
    static ExprPtr pow_int(ExprPtr base, int exponent);
    static ExprPtr exp(ExprPtr e);
    static ExprPtr ln(ExprPtr e);
};

/// Values an expression is evaluated against. State and parameter names are
/// looked up by linear scan, which beats hashing at the handful of names a
/// model declares.
struct EvalEnv {
    const std::vector<std::string>* state_names = nullptr;
    const double* state_values = nullptr;
    const std::vector<std::string>* param_names = nullptr;
    const double* param_values = nullptr;
    double input = 0.0;
    double time = 0.0;
};

/// Convenience owning environment for one-off evaluations.
struct OwnedEnv {
    std::vector<std::string> names;
    std::vector<double> values;
    double input = 0.0;
    double time = 0.0;

    void bind(const std::string& name, double v);
    EvalEnv view() const;
};

/// Parses `text` against the declared names. Reserved symbols: `u` (input),
/// `t` (time), `exp`, `ln`. Precedence, loosest to tightest: `+`/`-`, unary
/// minus, `*`/`/`, `^`; binary operators associate left. `^` takes a literal
/// nonnegative integer exponent. Throws ParseError (with byte offset) or
/// InvalidArgument for bad name lists.
ExprPtr parse_expression(const std::string& text,
                         const std::vector<std::string>& state_names,
                         const std::vector<std::string>& param_names);

/// Throws InvalidArgument on unbound names, NumericError on division by zero
/// or ln of a nonpositive value.
double evaluate_expression(const Expression& e, const EvalEnv& env);
double evaluate_expression(const ExprPtr& e, const EvalEnv& env);

/// Exact symbolic partial derivative with respect to a state or parameter
/// name. The result is constant-folded and cleaned of 0/1 identities but not
/// canonicalized further; correctness is checked numerically in tests.
ExprPtr differentiate_expression(const ExprPtr& e, const std::string& var);

/// Constant folding plus the 0/1 identities (x+0, x*1, x*0, x^0, x^1).
ExprPtr simplify_expression(const ExprPtr& e);

/// Renders with the fewest parentheses that reparse to a structurally equal
/// tree.
std::string to_string(const ExprPtr& e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Names of states/params referenced anywhere in the tree.
std::vector<std::string> referenced_names(const ExprPtr& e);

} // namespace ioident
