#include <doctest.h>

#include <cmath>

#include "ioident/signals.hpp"
#include "testutil.hpp"

using namespace ioident;

TEST_CASE("signal evaluation per variant") {
    const InputSignal pulse = sig::Pulse{1.0, 0.0, 1.0};
    CHECK(eval_signal(pulse, 0.5) == 1.0);
    CHECK(eval_signal(pulse, 1.5) == 0.0);
    CHECK(eval_signal(pulse, 1.0) == 0.0); // half-open [t_on, t_off)
    CHECK(eval_signal(pulse, -0.1) == 0.0);

    CHECK(eval_signal(sig::Ramp{1.0}, 2.0) == 2.0);
    CHECK(eval_signal(sig::Ramp{1.0}, -1.0) == 0.0);
    CHECK(eval_signal(sig::ImpulseApprox{1.0, 0.01}, 0.005) == 100.0);
    CHECK(eval_signal(sig::ImpulseApprox{1.0, 0.01}, 0.01) == 0.0);
    CHECK(eval_signal(sig::Step{2.0}, 0.0) == 2.0);
    CHECK(eval_signal(sig::Step{2.0}, -1e-9) == 0.0);
    CHECK(eval_signal(sig::Zero{}, 3.0) == 0.0);

    const InputSignal pwl = sig::PiecewiseLinear{{{0.0, 0.0}, {2.0, 1.0}, {3.0, 0.0}}};
    CHECK(eval_signal(pwl, -1.0) == 0.0);
    CHECK(eval_signal(pwl, 1.0) == 0.5);
    CHECK(eval_signal(pwl, 2.5) == 0.5);
    CHECK(eval_signal(pwl, 5.0) == 0.0); // holds the last value

    // Left limits differ from right values exactly at the jumps.
    CHECK(eval_signal_left(sig::Step{2.0}, 0.0) == 0.0);
    CHECK(eval_signal_left(pulse, 1.0) == 1.0);
    CHECK(eval_signal_left(pulse, 0.0) == 0.0);
}

TEST_CASE("breakpoints per variant") {
    CHECK(signal_breakpoints(sig::Pulse{1.0, 0.0, 1.0}) == std::vector<double>{0.0, 1.0});
    CHECK(signal_breakpoints(sig::Zero{}).empty());
    CHECK(signal_breakpoints(sig::Step{1.0}) == std::vector<double>{0.0});
    CHECK(signal_breakpoints(sig::Ramp{2.0}) == std::vector<double>{0.0});
    CHECK(signal_breakpoints(sig::ImpulseApprox{1.0, 0.25}) == std::vector<double>{0.0, 0.25});
    const InputSignal pwl = sig::PiecewiseLinear{{{0.0, 0.0}, {2.0, 1.0}, {3.0, 0.0}}};
    CHECK(signal_breakpoints(pwl) == std::vector<double>{0.0, 2.0, 3.0});
}

TEST_CASE("signals are continuous away from their breakpoints") {
    const std::vector<InputSignal> all{
        sig::Zero{}, sig::Step{1.5}, sig::Pulse{2.0, 0.25, 1.25}, sig::Ramp{0.7},
        sig::ImpulseApprox{1.0, 0.5},
        sig::PiecewiseLinear{{{0.0, 0.0}, {1.0, 2.0}, {2.0, -1.0}}}};
    for (const auto& s : all) {
        for (double t : {-0.4, 0.1, 0.6, 1.1, 1.6, 2.3}) {
            bool at_breakpoint = false;
            for (double b : signal_breakpoints(s))
                if (std::abs(t - b) < 1e-6) at_breakpoint = true;
            if (at_breakpoint) continue;
            const double v = eval_signal(s, t);
            CHECK(std::abs(eval_signal(s, t + 1e-9) - v) <= 1e-6);
            CHECK(std::abs(eval_signal(s, t - 1e-9) - v) <= 1e-6);
            CHECK(eval_signal_left(s, t) == v);
        }
    }
}

TEST_CASE("Laplace transforms of the probe classes") {
    CHECK(signal_laplace(sig::Step{1.0}, {1.0, 0.0}) == std::complex<double>(1.0, 0.0));
    CHECK(signal_laplace(sig::Ramp{1.0}, {2.0, 0.0}) == std::complex<double>(0.25, 0.0));
    // Unit pulse at sigma = 1: integral of e^{-t} over [0,1].
    const double expected = 0.63212055882855767;
    CHECK(testutil::close(signal_laplace(sig::Pulse{1.0, 0.0, 1.0}, {1.0, 0.0}).real(), expected,
                          1e-15));

    CHECK_THROWS_AS(signal_laplace(sig::Zero{}, {1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(signal_laplace(sig::ImpulseApprox{1.0, 0.1}, {1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(signal_laplace(sig::Step{1.0}, {-1.0, 0.0}), InvalidArgument);

    // Shift property: a pulse [0, T) is a step minus the same step delayed by T.
    const double u0 = 1.7, T = 0.8;
    for (double s : {0.3, 0.7, 1.0, 1.9, 3.1}) {
        const std::complex<double> sigma(s, 0.0);
        const auto pulse = signal_laplace(sig::Pulse{u0, 0.0, T}, sigma);
        const auto step = signal_laplace(sig::Step{u0}, sigma);
        const auto delayed = std::exp(-sigma * T) * step;
        CHECK(std::abs(pulse - (step - delayed)) <= 1e-14);
    }
}

TEST_CASE("signal spec strings parse and format round trip") {
    for (const char* spec :
         {"zero", "step:1", "pulse:1,0,1", "ramp:0.5", "impulse:1,0.01", "pwl:0,0;2,1;3,0"}) {
        const InputSignal s = parse_signal_spec(spec);
        CHECK(format_signal_spec(s) == spec);
    }
    CHECK(std::holds_alternative<sig::Pulse>(parse_signal_spec("pulse:2,0.5,1.5")));
    CHECK(signal_class_name(parse_signal_spec("ramp:1")) == std::string("ramp"));

    CHECK_THROWS_AS(parse_signal_spec("sine:1"), ParseError);
    CHECK_THROWS_AS(parse_signal_spec("pulse:1,2"), ParseError);
    CHECK_THROWS_AS(parse_signal_spec("pulse:1,2,1"), ParseError); // t_on >= t_off
    CHECK_THROWS_AS(parse_signal_spec("step:abc"), ParseError);
    CHECK_THROWS_AS(parse_signal_spec("impulse:1,0"), ParseError);
    CHECK_THROWS_AS(parse_signal_spec("pwl:1,0;0,1"), ParseError);
}

TEST_CASE("validation rejects broken signals") {
    CHECK_THROWS_AS(validate_signal(sig::Pulse{1.0, 1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate_signal(sig::ImpulseApprox{1.0, -0.1}), InvalidArgument);
    CHECK_THROWS_AS(validate_signal(sig::PiecewiseLinear{{}}), InvalidArgument);
    CHECK_NOTHROW(validate_signal(sig::Step{0.0}));
}
