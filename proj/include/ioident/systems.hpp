#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ioident/expr.hpp"
#include "ioident/signals.hpp"

namespace ioident {

using ParamMap = std::map<std::string, double>;

/// LTI triple: dx/dt = A x + b u, y = c x.
struct LinearSystem {
    Eigen::MatrixXd A;    // n x n interaction/degradation rates (1/time)
    Eigen::VectorXd b;    // length-n input column
    Eigen::RowVectorXd c; // length-n output row
    int n() const { return static_cast<int>(A.rows()); }
};

/// Validates dimensions and finiteness; throws InvalidArgument otherwise.
LinearSystem build_linear_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                 const Eigen::RowVectorXd& c);

/// Scalar system dx/dt = -a x + b u, y = c x.
LinearSystem scalar_lti(double a, double b, double c);

/// Parameterized i/o ODE system with expression right-hand sides and a scalar
/// output. Treated as read-only by every consumer.
struct GeneralSystem {
    std::vector<std::string> state_names;
    std::vector<std::string> param_names;
    std::vector<ExprPtr> rhs; // one per state, same order as state_names
    ExprPtr output;
    Eigen::VectorXd x0; // initial state; parameter-independent
};

/// Builds and validates a GeneralSystem from expression strings. An empty x0
/// means all-zero initial state.
GeneralSystem make_general_system(std::vector<std::string> state_names,
                                  std::vector<std::string> param_names,
                                  const std::vector<std::string>& rhs_text,
                                  const std::string& output_text,
                                  std::vector<double> x0 = {});

/// Checks declared-name consistency, rhs count and x0 finiteness.
void validate_system(const GeneralSystem& sys);

/// Expression-based embedding of an LTI triple, with states x1..xn. Routes
/// linear systems through the same integrator as everything else.
GeneralSystem lti_to_general(const LinearSystem& sys);

/// Full parameter binding: defaults overlaid with `overrides`. Throws
/// InvalidArgument if an override names an undeclared parameter or a declared
/// parameter ends up unbound.
ParamMap resolve_params(const GeneralSystem& sys, const ParamMap& defaults,
                        const ParamMap& overrides);

/// Analytic state vector and output of a registered model at one time.
struct ClosedFormResult {
    Eigen::VectorXd x;
    double y = 0.0;
};
using ClosedForm = std::function<ClosedFormResult(const ParamMap&, const InputSignal&, double)>;

struct ModelRegistryEntry {
    std::string id;
    GeneralSystem system;
    ParamMap default_params;
    // Closed forms keyed by signal variant index, where known.
    std::map<std::size_t, ClosedForm> closed_forms;
};

/// Fresh copy of the registered entry; mutating it never alters the registry.
/// Throws InvalidArgument for unknown ids.
ModelRegistryEntry get_registry_model(const std::string& id);

std::vector<std::string> registry_model_ids();

} // namespace ioident
