#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace csifoc {

enum class IntegratorKind : std::uint8_t { Euler, Rk4 };

/// One explicit fixed step of dx/dt = f(x). f takes and returns
/// std::array<double, N>. Throws std::domain_error if the result is not
/// finite.
template <std::size_t N, typename F>
std::array<double, N> integrate_step(const std::array<double, N>& x, F&& f, double dt,
                                     IntegratorKind kind) {
    std::array<double, N> out{};
    if (kind == IntegratorKind::Euler) {
        const auto k1 = f(x);
        for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + dt * k1[i];
    } else {
        std::array<double, N> tmp{};
        const auto k1 = f(x);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        const auto k2 = f(tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        const auto k3 = f(tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + dt * k3[i];
        const auto k4 = f(tmp);
        for (std::size_t i = 0; i < N; ++i)
            out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(out[i]))
            throw std::domain_error("integrate_step produced non-finite component " +
                                    std::to_string(i));
    }
    return out;
}

}  // namespace csifoc
