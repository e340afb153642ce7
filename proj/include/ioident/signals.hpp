#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "ioident/errors.hpp"

namespace ioident {

/// Input signal classes. Every signal is identically zero for t < 0.
namespace sig {

struct Zero {};
struct Step {
    double u0 = 1.0; // held for all t >= 0
};
struct Pulse {
    double u0 = 1.0;
    double t_on = 0.0;
    double t_off = 1.0; // active on the half-open interval [t_on, t_off)
};
struct Ramp {
    double slope = 1.0; // u(t) = slope * t for t >= 0
};
struct ImpulseApprox {
    double area = 1.0;
    double width = 1e-2; // value area/width on [0, width)
};
struct PiecewiseLinear {
    // Knot times strictly increasing. Zero before the first knot, linear
    // interpolation between knots, last value held afterwards.
    std::vector<std::pair<double, double>> knots;
};

} // namespace sig

using InputSignal = std::variant<sig::Zero, sig::Step, sig::Pulse, sig::Ramp, sig::ImpulseApprox,
                                 sig::PiecewiseLinear>;

/// Throws InvalidArgument when a variant's invariants are violated
/// (t_on >= t_off, width <= 0, unsorted knots, non-finite magnitudes).
void validate_signal(const InputSignal& s);

double eval_signal(const InputSignal& s, double t);

/// Limit of the signal from the left at t. Differs from eval_signal only at
/// jump discontinuities; the integrator uses it to close a step at a
/// breakpoint without sampling the next segment.
double eval_signal_left(const InputSignal& s, double t);

/// Times where the signal is discontinuous or changes analytic form, sorted.
std::vector<double> signal_breakpoints(const InputSignal& s);

/// Laplace transform at sigma with Re(sigma) > 0. Defined for Step (u0/s),
/// Ramp (slope/s^2) and Pulse (u0*(e^{-s*t_on} - e^{-s*t_off})/s); other
/// variants throw InvalidArgument.
std::complex<double> signal_laplace(const InputSignal& s, std::complex<double> sigma);

/// Variant tag as a lowercase word: "zero", "step", "pulse", "ramp",
/// "impulse", "pwl".
const char* signal_class_name(const InputSignal& s);

/// Parses the compact CLI form: `zero`, `step:<u0>`, `pulse:<u0>,<t_on>,<t_off>`,
/// `ramp:<slope>`, `impulse:<area>,<width>`, `pwl:<t0>,<v0>;<t1>,<v1>;...`.
InputSignal parse_signal_spec(const std::string& spec);

std::string format_signal_spec(const InputSignal& s);

} // namespace ioident
