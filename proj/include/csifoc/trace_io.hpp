#pragma once

#include <string>
#include <vector>

#include "csifoc/metrics.hpp"
#include "csifoc/sim.hpp"

namespace csifoc {

/// Column names in emission order; fixed schema.
const std::vector<std::string>& trace_csv_columns();
std::string trace_csv_header();

void write_trace_csv(const Trace& trace, const std::string& path);
Trace read_trace_csv(const std::string& path);

void write_metrics_json(const Metrics& m, const std::string& path);
Metrics read_metrics_json(const std::string& path);
std::string metrics_to_json_string(const Metrics& m);

/// Write trace.csv, metrics.json and scenario.resolved.json into out_dir.
/// Metrics are recomputed from the serialized trace so that re-deriving
/// them from the file is exact.
struct OutputPaths {
    std::string trace_csv;
    std::string metrics_json;
    std::string scenario_json;
};
OutputPaths write_outputs(const Trace& trace, const Scenario& sc, const std::string& out_dir);

}  // namespace csifoc
