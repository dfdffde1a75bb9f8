#include "csifoc/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "csifoc/metrics.hpp"
#include "csifoc/scenario_io.hpp"

namespace csifoc {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void io_fail(const std::string& what, const std::string& path) {
    throw std::runtime_error(what + ": " + path);
}

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double parse_num(const std::string& tok, const std::string& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        io_fail("malformed number '" + tok + "' in trace CSV", path);
    }
}

void put(ordered_json& j, const char* key, const std::optional<double>& v) {
    if (v)
        j[key] = *v;
    else
        j[key] = nullptr;
}

std::optional<double> get_opt(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

const std::vector<std::string>& trace_csv_columns() {
    static const std::vector<std::string> cols = {
        "t",         "theta_e",   "theta_star", "theta_hat", "theta_used",    "theta_c",
        "omega_m_rpm", "omega_hat_rpm", "i_a",  "i_b",       "i_c",           "i_d_true",
        "i_q_true",  "i_d_hat",   "i_q_hat",    "u_d_cmd",   "u_q_cmd",       "terminal",
        "delta_star_deg", "delta_hat_deg", "locked"};
    return cols;
}

std::string trace_csv_header() {
    std::string h;
    const auto& cols = trace_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) h += ",";
        h += cols[i];
    }
    return h;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) io_fail("cannot write trace CSV", path);
    out << trace_csv_header() << "\n";
    for (const auto& r : trace) {
        out << fmt_num(r.t) << ',' << fmt_num(r.theta_e) << ',' << fmt_num(r.theta_star) << ','
            << fmt_num(r.theta_hat) << ',' << fmt_num(r.theta_used) << ',' << fmt_num(r.theta_c)
            << ',' << fmt_num(r.omega_m_rpm) << ',' << fmt_num(r.omega_hat_rpm) << ','
            << fmt_num(r.i_a) << ',' << fmt_num(r.i_b) << ',' << fmt_num(r.i_c) << ','
            << fmt_num(r.i_d_true) << ',' << fmt_num(r.i_q_true) << ',' << fmt_num(r.i_d_hat)
            << ',' << fmt_num(r.i_q_hat) << ',' << fmt_num(r.u_d_cmd) << ','
            << fmt_num(r.u_q_cmd) << ',' << r.terminal << ',' << fmt_num(r.delta_star_deg) << ','
            << fmt_num(r.delta_hat_deg) << ',' << (r.locked ? 1 : 0) << "\n";
    }
    if (!out) io_fail("write failure on trace CSV", path);
}

Trace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) io_fail("cannot open trace CSV", path);
    std::string line;
    if (!std::getline(in, line)) io_fail("empty trace CSV", path);
    if (line != trace_csv_header()) io_fail("unexpected trace CSV header", path);

    Trace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> tok;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) tok.push_back(item);
        if (tok.size() != trace_csv_columns().size())
            io_fail("wrong column count in trace CSV row", path);
        TraceRecord r;
        std::size_t i = 0;
        r.t = parse_num(tok[i++], path);
        r.theta_e = parse_num(tok[i++], path);
        r.theta_star = parse_num(tok[i++], path);
        r.theta_hat = parse_num(tok[i++], path);
        r.theta_used = parse_num(tok[i++], path);
        r.theta_c = parse_num(tok[i++], path);
        r.omega_m_rpm = parse_num(tok[i++], path);
        r.omega_hat_rpm = parse_num(tok[i++], path);
        r.i_a = parse_num(tok[i++], path);
        r.i_b = parse_num(tok[i++], path);
        r.i_c = parse_num(tok[i++], path);
        r.i_d_true = parse_num(tok[i++], path);
        r.i_q_true = parse_num(tok[i++], path);
        r.i_d_hat = parse_num(tok[i++], path);
        r.i_q_hat = parse_num(tok[i++], path);
        r.u_d_cmd = parse_num(tok[i++], path);
        r.u_q_cmd = parse_num(tok[i++], path);
        r.terminal = static_cast<int>(parse_num(tok[i++], path));
        r.delta_star_deg = parse_num(tok[i++], path);
        r.delta_hat_deg = parse_num(tok[i++], path);
        r.locked = parse_num(tok[i++], path) != 0.0;
        trace.push_back(r);
    }
    return trace;
}

std::string metrics_to_json_string(const Metrics& m) {
    ordered_json j;
    put(j, "speed_osc_pp_T3_rpm", m.speed_osc_pp_t3);
    put(j, "current_osc_pp_T3_A", m.current_osc_pp_t3);
    put(j, "dq_convergence_time_s", m.dq_convergence_time);
    put(j, "delta_hat_settle_time_s", m.delta_hat_settle_time);
    put(j, "t2_speed_jump_rpm", m.t2_speed_jump);
    put(j, "t2_time_s", m.t2_time);
    put(j, "t3_time_s", m.t3_time);
    j["stall_detected"] = m.stall_detected;
    if (m.fault)
        j["fault"] = *m.fault;
    else
        j["fault"] = nullptr;
    return j.dump(2);
}

void write_metrics_json(const Metrics& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) io_fail("cannot write metrics JSON", path);
    out << metrics_to_json_string(m) << "\n";
}

Metrics read_metrics_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) io_fail("cannot open metrics JSON", path);
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::exception& e) {
        io_fail(std::string("malformed metrics JSON (") + e.what() + ")", path);
    }
    Metrics m;
    m.speed_osc_pp_t3 = get_opt(j, "speed_osc_pp_T3_rpm");
    m.current_osc_pp_t3 = get_opt(j, "current_osc_pp_T3_A");
    m.dq_convergence_time = get_opt(j, "dq_convergence_time_s");
    m.delta_hat_settle_time = get_opt(j, "delta_hat_settle_time_s");
    m.t2_speed_jump = get_opt(j, "t2_speed_jump_rpm");
    m.t2_time = get_opt(j, "t2_time_s");
    m.t3_time = get_opt(j, "t3_time_s");
    m.stall_detected = j.value("stall_detected", false);
    if (j.contains("fault") && !j.at("fault").is_null())
        m.fault = j.at("fault").get<std::string>();
    return m;
}

OutputPaths write_outputs(const Trace& trace, const Scenario& sc, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    OutputPaths paths;
    paths.trace_csv = (std::filesystem::path(out_dir) / "trace.csv").string();
    paths.metrics_json = (std::filesystem::path(out_dir) / "metrics.json").string();
    paths.scenario_json = (std::filesystem::path(out_dir) / "scenario.resolved.json").string();

    write_trace_csv(trace, paths.trace_csv);
    // Metrics come from the serialized trace, so `metrics` on the CSV
    // reproduces metrics.json bit for bit.
    const Trace round_tripped = read_trace_csv(paths.trace_csv);
    write_metrics_json(compute_metrics(round_tripped, sc.metrics), paths.metrics_json);

    save_scenario(sc, paths.scenario_json);
    return paths;
}

}  // namespace csifoc
