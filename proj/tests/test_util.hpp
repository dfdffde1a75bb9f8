#pragma once

#include <cmath>
#include <random>

#include "csifoc/scenario.hpp"
#include "csifoc/sim.hpp"

namespace csifoc::test {

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), abs_floor});
}

/// The shipped default scenario run once per test binary.
inline const RunResult& default_run() {
    static const RunResult result = run_scenario(default_scenario());
    return result;
}

inline int first_index_with_terminal(const Trace& trace, int terminal) {
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i].terminal == terminal) return static_cast<int>(i);
    return -1;
}

}  // namespace csifoc::test
