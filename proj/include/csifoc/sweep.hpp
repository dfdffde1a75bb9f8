#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csifoc/metrics.hpp"

namespace csifoc {

struct SweepRow {
    double value = 0.0;
    std::optional<Metrics> metrics;  // empty when the variant failed
    std::string error;               // failure reason, if any
};

/// Run the base scenario once per value with the dotted parameter path
/// (e.g. "transition.hc_dtheta_rad") replaced. Variants run concurrently;
/// failures are recorded and the sweep continues.
std::vector<SweepRow> run_sweep(const nlohmann::ordered_json& base_scenario, const std::string& param_path,
                                const std::vector<double>& values);

/// Combined per-value metrics table.
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& param_path,
                     const std::string& path);

}  // namespace csifoc
