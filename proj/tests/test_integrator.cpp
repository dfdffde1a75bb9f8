#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "csifoc/integrator.hpp"

using namespace csifoc;

namespace {

using State1 = std::array<double, 1>;
using State2 = std::array<double, 2>;

double run_exp_decay(double dt, int steps, IntegratorKind kind) {
    State1 x{1.0};
    auto f = [](const State1& s) { return State1{-s[0]}; };
    for (int i = 0; i < steps; ++i) x = integrate_step(x, f, dt, kind);
    return x[0];
}

}  // namespace

TEST_CASE("RK4 integrates exponential decay to 1e-9") {
    const double x = run_exp_decay(0.01, 100, IntegratorKind::Rk4);
    CHECK(std::abs(x - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("Euler first step is exact to its order") {
    const double x = run_exp_decay(0.125, 1, IntegratorKind::Euler);
    CHECK(x == doctest::Approx(1.0 - 0.125).epsilon(1e-15));
}

TEST_CASE("zero derivative is the identity") {
    State2 x{3.5, -2.25};
    auto f = [](const State2&) { return State2{0.0, 0.0}; };
    const auto y = integrate_step(x, f, 0.1, IntegratorKind::Rk4);
    CHECK(y[0] == x[0]);
    CHECK(y[1] == x[1]);
}

TEST_CASE("harmonic oscillator energy drift stays below 1e-8 over 1e4 RK4 steps") {
    State2 x{1.0, 0.0};
    auto f = [](const State2& s) { return State2{s[1], -s[0]}; };
    const double e0 = 0.5 * (x[0] * x[0] + x[1] * x[1]);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        x = integrate_step(x, f, 0.01, IntegratorKind::Rk4);
        const double e = 0.5 * (x[0] * x[0] + x[1] * x[1]);
        worst = std::max(worst, std::abs(e - e0) / e0);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("RK4 global order exponent is close to four") {
    const double err1 = std::abs(run_exp_decay(0.01, 100, IntegratorKind::Rk4) - std::exp(-1.0));
    const double err2 = std::abs(run_exp_decay(0.005, 200, IntegratorKind::Rk4) - std::exp(-1.0));
    const double order = std::log2(err1 / err2);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("non-finite result raises a domain error") {
    State1 x{1.0};
    auto f = [](const State1& s) { return State1{s[0] * 1e308}; };
    CHECK_THROWS_AS(integrate_step(x, f, 10.0, IntegratorKind::Rk4), std::domain_error);
}
