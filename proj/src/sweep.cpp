#include "csifoc/sweep.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "csifoc/scenario_io.hpp"
#include "csifoc/sim.hpp"

namespace csifoc {

using ordered_json = nlohmann::ordered_json;

namespace {

/// Replace a dotted path ("transition.hc_dtheta_rad") in a scenario
/// document. Intermediate objects are created so defaults can be swept too.
ordered_json with_value(const ordered_json& base, const std::string& path, double value) {
    ordered_json doc = base.is_null() ? ordered_json::object() : base;
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string p;
    while (std::getline(ss, p, '.')) {
        if (p.empty()) throw std::invalid_argument("empty segment in parameter path: " + path);
        parts.push_back(p);
    }
    if (parts.empty()) throw std::invalid_argument("empty parameter path");
    ordered_json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i])) (*node)[parts[i]] = ordered_json::object();
        node = &(*node)[parts[i]];
        if (!node->is_object())
            throw std::invalid_argument("parameter path crosses a non-object: " + path);
    }
    (*node)[parts.back()] = value;
    return doc;
}

SweepRow run_one(const ordered_json& base, const std::string& path, double value) {
    SweepRow row;
    row.value = value;
    try {
        const Scenario sc = scenario_from_json(with_value(base, path, value));
        const RunResult res = run_scenario(sc);
        row.metrics = compute_metrics(res.trace, sc.metrics);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

std::string cell(const std::optional<double>& v) {
    if (!v) return "na";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", *v);
    return buf;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ordered_json& base_scenario, const std::string& param_path,
                                const std::vector<double>& values) {
    // Validate the path against the base document up front.
    {
        const ordered_json probe = with_value(base_scenario, param_path, values.empty() ? 0.0 : values.front());
        (void)probe;
    }
    std::vector<std::future<SweepRow>> futures;
    futures.reserve(values.size());
    for (double v : values)
        futures.push_back(std::async(std::launch::async, run_one, base_scenario, param_path, v));
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& param_path,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write sweep CSV: " + path);
    out << param_path
        << ",speed_osc_pp_T3_rpm,current_osc_pp_T3_A,dq_convergence_time_s,"
           "delta_hat_settle_time_s,t2_speed_jump_rpm,t2_time_s,t3_time_s,stall_detected,fault,"
           "error\n";
    for (const auto& r : rows) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", r.value);
        out << buf << ',';
        if (r.metrics) {
            const Metrics& m = *r.metrics;
            out << cell(m.speed_osc_pp_t3) << ',' << cell(m.current_osc_pp_t3) << ','
                << cell(m.dq_convergence_time) << ',' << cell(m.delta_hat_settle_time) << ','
                << cell(m.t2_speed_jump) << ',' << cell(m.t2_time) << ',' << cell(m.t3_time)
                << ',' << (m.stall_detected ? 1 : 0) << ',' << (m.fault ? *m.fault : "") << ",";
        } else {
            out << "na,na,na,na,na,na,na,0,," << r.error;
        }
        out << "\n";
    }
}

}  // namespace csifoc
