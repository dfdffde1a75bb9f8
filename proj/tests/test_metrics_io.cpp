#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csifoc/metrics.hpp"
#include "csifoc/plots.hpp"
#include "csifoc/scenario_io.hpp"
#include "csifoc/sweep.hpp"
#include "csifoc/trace_io.hpp"
#include "test_util.hpp"

using namespace csifoc;
using csifoc::test::default_run;

namespace {

const std::string kTmp = (std::filesystem::temp_directory_path() / "csifoc_test").string();

struct TmpDir {
    TmpDir() { std::filesystem::create_directories(kTmp); }
} tmp_dir_guard;

Trace synthetic_t3_trace(double dt, double t_end,
                         const std::function<void(TraceRecord&, double)>& fill) {
    Trace trace;
    int k = 0;
    for (double t = 0.0; t <= t_end + 1e-12; t = ++k * dt) {
        TraceRecord r;
        r.t = t;
        r.terminal = 3;
        fill(r, t);
        trace.push_back(r);
    }
    return trace;
}

}  // namespace

TEST_CASE("speed oscillation metric equals twice the sine amplitude") {
    MetricsConfig cfg;
    const double amp = 5.5;
    const Trace trace = synthetic_t3_trace(1e-3, 2.0, [&](TraceRecord& r, double t) {
        r.omega_m_rpm = 300.0 + amp * std::sin(2.0 * M_PI * 10.0 * t);
    });
    const Metrics m = compute_metrics(trace, cfg);
    REQUIRE(m.speed_osc_pp_t3.has_value());
    CHECK(*m.speed_osc_pp_t3 == doctest::Approx(2.0 * amp).epsilon(1e-3));
}

TEST_CASE("dq convergence time of an exponential gap is tau ln 10") {
    MetricsConfig cfg;  // threshold 0.1 A
    const double tau = 0.25;
    const Trace trace = synthetic_t3_trace(1e-3, 3.0, [&](TraceRecord& r, double t) {
        r.i_d_true = std::exp(-t / tau);  // gap decays from 1 A
        r.i_d_hat = 0.0;
    });
    const Metrics m = compute_metrics(trace, cfg);
    REQUIRE(m.dq_convergence_time.has_value());
    CHECK(std::abs(*m.dq_convergence_time - tau * std::log(10.0)) <= 1e-3 + 1e-9);
}

TEST_CASE("metrics mark missing events as not achieved") {
    MetricsConfig cfg;
    Trace t1;  // T3 never entered
    for (int k = 0; k < 100; ++k) {
        TraceRecord r;
        r.t = k * 1e-3;
        r.terminal = k < 50 ? 0 : 1;
        t1.push_back(r);
    }
    const Metrics m = compute_metrics(t1, cfg);
    CHECK_FALSE(m.speed_osc_pp_t3.has_value());
    CHECK_FALSE(m.dq_convergence_time.has_value());
    CHECK_FALSE(m.t2_time.has_value());
    CHECK_FALSE(m.fault.has_value());
}

TEST_CASE("stall and fault are derived from the trace") {
    MetricsConfig cfg;
    Trace trace;
    for (int k = 0; k < 10; ++k) {
        TraceRecord r;
        r.t = k * 1e-3;
        r.terminal = k < 5 ? 0 : 4;
        r.delta_star_deg = k == 3 ? -1.0 : 10.0;
        trace.push_back(r);
    }
    const Metrics m = compute_metrics(trace, cfg);
    CHECK(m.stall_detected);
    REQUIRE(m.fault.has_value());
}

TEST_CASE("trace CSV schema is stable") {
    CHECK(trace_csv_header() ==
          "t,theta_e,theta_star,theta_hat,theta_used,theta_c,omega_m_rpm,omega_hat_rpm,"
          "i_a,i_b,i_c,i_d_true,i_q_true,i_d_hat,i_q_hat,u_d_cmd,u_q_cmd,terminal,"
          "delta_star_deg,delta_hat_deg,locked");
}

TEST_CASE("empty trace writes a header-only CSV") {
    const std::string path = kTmp + "/empty.csv";
    write_trace_csv({}, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == trace_csv_header());
    CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("formatted trace round-trips exactly after one write") {
    Scenario sc = default_scenario();
    sc.sim.t_end = 0.5;
    const RunResult res = run_scenario(sc);

    const std::string p1 = kTmp + "/trace1.csv";
    const std::string p2 = kTmp + "/trace2.csv";
    write_trace_csv(res.trace, p1);
    const Trace back = read_trace_csv(p1);
    CHECK(back.size() == res.trace.size());
    write_trace_csv(back, p2);

    std::ifstream f1(p1), f2(p2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
}

TEST_CASE("run outputs: row count, metrics reproducibility, resolved scenario") {
    const Scenario sc = default_scenario();
    const auto& run = default_run();
    const std::string dir = kTmp + "/outputs";
    const OutputPaths paths = write_outputs(run.trace, sc, dir);

    const Trace from_csv = read_trace_csv(paths.trace_csv);
    CHECK(from_csv.size() ==
          static_cast<std::size_t>(std::llround(sc.sim.t_end / sc.sim.dt_ctrl)) + 1);

    // Metrics are a pure function of the serialized trace.
    const Metrics recomputed = compute_metrics(from_csv, sc.metrics);
    const Metrics stored = read_metrics_json(paths.metrics_json);
    CHECK(metrics_to_json_string(recomputed) == metrics_to_json_string(stored));

    // The resolved scenario parses back to an identical document.
    const Scenario re = load_scenario(paths.scenario_json);
    CHECK(scenario_to_json(re).dump() == scenario_to_json(sc).dump());
}

TEST_CASE("metrics JSON round-trips through parse") {
    Metrics m;
    m.speed_osc_pp_t3 = 3.25;
    m.dq_convergence_time = 0.5;
    m.stall_detected = true;
    m.fault = "estimator lock lost in sensorless operation";
    const std::string path = kTmp + "/metrics.json";
    write_metrics_json(m, path);
    const Metrics back = read_metrics_json(path);
    CHECK(metrics_to_json_string(back) == metrics_to_json_string(m));
}

TEST_CASE("scenario defaults carry the shipped parameter set") {
    const Scenario sc = scenario_from_json(nlohmann::ordered_json::object());
    CHECK(sc.motor.r_s == 2.16);
    CHECK(sc.motor.l_s == 4.56e-3);
    CHECK(sc.cable.r_c == 11.76);
    CHECK(sc.cable.l_c == 9.7e-3);
    CHECK(sc.cable.c_c == 111e-9);
    CHECK(sc.motor.pole_pairs == 6);
    CHECK(sc.front_end.l_dc == 10e-3);
    CHECK(sc.front_end.c_o == 50e-6);
    CHECK(sc.front_end.v_g == 480.0);
    CHECK(sc.front_end.f_g == 60.0);
    // Derived controller model lumps the cable impedance.
    CHECK(sc.controller_model.r_eq == doctest::Approx(2.16 + 11.76));
    CHECK(sc.controller_model.l_eq == doctest::Approx(4.56e-3 + 9.7e-3));
}

TEST_CASE("an empty scenario file runs with full defaults") {
    const std::string path = kTmp + "/empty.json";
    std::ofstream(path) << "";
    const Scenario sc = load_scenario(path);
    CHECK(sc.motor.r_s == 2.16);
}

TEST_CASE("validation failures name the key and unit") {
    nlohmann::ordered_json j;
    j["motor"]["L_s_H"] = -1.0;
    CHECK_THROWS_WITH_AS(scenario_from_json(j), doctest::Contains("L_s_H"),
                         std::invalid_argument);
    try {
        scenario_from_json(j);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("henries") != std::string::npos);
    }

    nlohmann::ordered_json unknown;
    unknown["motor"]["R_stator"] = 2.0;
    CHECK_THROWS_WITH_AS(scenario_from_json(unknown), doctest::Contains("unknown key"),
                         std::invalid_argument);

    nlohmann::ordered_json badsec;
    badsec["engine"] = nlohmann::ordered_json::object();
    CHECK_THROWS_WITH_AS(scenario_from_json(badsec), doctest::Contains("unknown section"),
                         std::invalid_argument);

    nlohmann::ordered_json rates;
    rates["sim"]["dt_plant_s"] = 3e-5;  // not a divisor of dt_ctrl
    CHECK_THROWS_WITH_AS(scenario_from_json(rates), doctest::Contains("integer multiple"),
                         std::invalid_argument);
}

TEST_CASE("scenario serialization is a parse fixpoint") {
    nlohmann::ordered_json j;
    j["motor"]["psi_f_Wb"] = 0.3;
    j["transition"]["mode"] = "condition_based";
    const Scenario a = scenario_from_json(j);
    const Scenario b = scenario_from_json(scenario_to_json(a));
    CHECK(scenario_to_json(a).dump() == scenario_to_json(b).dump());
}

TEST_CASE("plots are produced and well-formed") {
    const auto& run = default_run();
    const std::string dir = kTmp + "/plots";
    const auto files = emit_plots(run.trace, dir);
    CHECK(files.size() == 5);

    for (const auto& f : files) {
        std::ifstream in(f);
        REQUIRE(in.good());
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string svg = ss.str();
        // Minimal XML well-formedness: every opened tag closes.
        long depth = 0;
        bool ok = true;
        for (std::size_t i = 0; i < svg.size(); ++i) {
            if (svg[i] != '<') continue;
            if (svg.compare(i, 2, "<?") == 0) continue;
            const std::size_t end = svg.find('>', i);
            REQUIRE(end != std::string::npos);
            if (svg[i + 1] == '/')
                --depth;
            else if (svg[end - 1] != '/' && svg[end - 1] != '?')
                ++depth;
            if (depth < 0) ok = false;
        }
        CHECK(ok);
        CHECK(depth == 0);
    }

    // Terminal switch markers at the scheduled instants.
    std::ifstream in(files[0]);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string svg = ss.str();
    CHECK(svg.find("data-t='2.5'") != std::string::npos);
    CHECK(svg.find("data-t='3'") != std::string::npos);
    CHECK(svg.find("data-t='3.5'") != std::string::npos);
}

TEST_CASE("a single-record trace still renders valid figures") {
    Trace one;
    TraceRecord r;
    r.t = 0.0;
    one.push_back(r);
    const auto files = emit_plots(one, kTmp + "/plots_one");
    CHECK(files.size() == 5);
    for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
}

TEST_CASE("sweeping a single value reproduces the plain run") {
    nlohmann::ordered_json base;
    base["sim"]["t_end_s"] = 1.0;
    const auto rows = run_sweep(base, "if_startup.i_q_star_A", {4.0});
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].metrics.has_value());

    Scenario sc = scenario_from_json(base);
    const Metrics direct = compute_metrics(run_scenario(sc).trace, sc.metrics);
    CHECK(metrics_to_json_string(*rows[0].metrics) == metrics_to_json_string(direct));
}

TEST_CASE("sweep records per-variant failures and continues") {
    nlohmann::ordered_json base;
    base["sim"]["t_end_s"] = 0.5;
    const auto rows = run_sweep(base, "motor.L_s_H", {4.56e-3, -1.0});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].metrics.has_value());
    CHECK_FALSE(rows[1].metrics.has_value());
    CHECK(rows[1].error.find("L_s_H") != std::string::npos);

    const std::string csv = kTmp + "/sweep.csv";
    write_sweep_csv(rows, "motor.L_s_H", csv);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("motor.L_s_H,", 0) == 0);
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2);
}

TEST_CASE("hill-climb residual scales with the step size") {
    for (double dtheta : {0.002, 0.005, 0.01}) {
        Scenario sc = default_scenario();
        sc.transition.hc_dtheta = dtheta;
        sc.transition.hc_stop_band = 3.0 * dtheta;
        sc.sim.t_end = 6.0;  // the smallest step walks for about 1.4 s
        sc.resolve();
        const RunResult res = run_scenario(sc);
        const double band_deg = deg_from_rad(2.0 * dtheta) + 0.5;
        double worst = 0.0;
        for (const auto& r : res.trace)
            if (r.t >= 5.5) worst = std::max(worst, std::abs(r.delta_hat_deg));
        CHECK(worst <= band_deg);
    }
}

TEST_CASE("measurement delay sweep degrades the frame residual monotonically") {
    nlohmann::ordered_json base;
    const auto rows = run_sweep(base, "sim.delay_cycles", {0.0, 2.0, 5.0});
    REQUIRE(rows.size() == 3);
    REQUIRE(rows[0].metrics.has_value());
    REQUIRE(rows[1].metrics.has_value());
    REQUIRE(rows[2].metrics.has_value());
    // Convergence of the measured-frame currents is achieved without delay
    // and lost (or slower) as the delay grows.
    const auto& m0 = *rows[0].metrics;
    const auto& m2 = *rows[1].metrics;
    const auto& m5 = *rows[2].metrics;
    REQUIRE(m0.dq_convergence_time.has_value());
    const double c0 = *m0.dq_convergence_time;
    const double c2 = m2.dq_convergence_time.value_or(1e9);
    const double c5 = m5.dq_convergence_time.value_or(2e9);
    CHECK(c0 < c2);
    CHECK(c2 <= c5);
}
