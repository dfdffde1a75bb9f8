#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csifoc/metrics.hpp"
#include "csifoc/plots.hpp"
#include "csifoc/scenario_io.hpp"
#include "csifoc/sim.hpp"
#include "csifoc/sweep.hpp"
#include "csifoc/trace_io.hpp"

namespace {

using namespace csifoc;

int cmd_run(const std::string& scenario_path, const std::string& out_dir, long long seed,
            bool no_plots) {
    Scenario sc = load_scenario(scenario_path);
    if (seed >= 0) {
        sc.sim.rng_seed = static_cast<std::uint64_t>(seed);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const RunResult res = run_scenario(sc);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(t1 - t0).count();

    const OutputPaths paths = write_outputs(res.trace, sc, out_dir);
    if (!no_plots) emit_plots(res.trace, out_dir);

    std::cout << "simulated " << sc.sim.t_end << " s (" << res.trace.size() << " control cycles) in "
              << wall << " s\n";
    std::cout << "outputs in " << out_dir << "\n";
    if (res.warnings.stall_detected)
        std::cerr << "warning: virtual-frame angle error went negative during startup "
                     "(self-stabilization lost; possible stall)\n";
    if (res.warnings.align_hold)
        std::cerr << "warning: alignment/lock not achieved by the scheduled switch time; "
                     "terminal 2 was held back\n";
    if (res.warnings.fault) {
        std::cerr << "fault: " << res.warnings.fault_reason << "\n";
        return 3;
    }
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param, const std::string& values_csv,
              const std::string& out_dir) {
    std::ifstream in(scenario_path);
    if (!in) {
        std::cerr << "cannot open scenario file: " << scenario_path << "\n";
        return 1;
    }
    nlohmann::ordered_json base;
    in >> std::ws;
    if (!in.eof()) base = nlohmann::ordered_json::parse(in);

    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        values.push_back(std::stod(tok));
    }
    if (values.empty()) {
        std::cerr << "no sweep values given\n";
        return 1;
    }

    const auto rows = run_sweep(base, param, values);
    std::filesystem::create_directories(out_dir);
    const std::string csv = (std::filesystem::path(out_dir) / "sweep.csv").string();
    write_sweep_csv(rows, param, csv);
    std::cout << "sweep results in " << csv << "\n";
    int failures = 0;
    for (const auto& r : rows)
        if (!r.metrics) {
            std::cerr << "variant " << r.value << " failed: " << r.error << "\n";
            ++failures;
        }
    return failures == static_cast<int>(values.size()) ? 2 : 0;
}

int cmd_plot(const std::string& trace_path, const std::string& out_dir) {
    const Trace trace = read_trace_csv(trace_path);
    const auto files = emit_plots(trace, out_dir);
    for (const auto& f : files) std::cout << f << "\n";
    return 0;
}

int cmd_metrics(const std::string& trace_path, const std::string& scenario_path,
                const std::string& out_path) {
    const Trace trace = read_trace_csv(trace_path);
    MetricsConfig cfg;
    if (!scenario_path.empty()) cfg = load_scenario(scenario_path).metrics;
    const Metrics m = compute_metrics(trace, cfg);
    const std::string text = metrics_to_json_string(m);
    if (out_path.empty())
        std::cout << text << "\n";
    else {
        std::ofstream out(out_path);
        out << text << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSI-fed PMSM sensorless startup/transition simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", trace_path, param, values, metrics_out,
                metrics_scenario;
    long long seed = -1;
    bool no_plots = false;

    auto* run = app.add_subcommand("run", "simulate one scenario and write trace/metrics/plots");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--seed", seed, "override sim.rng_seed");
    run->add_flag("--no-plots", no_plots, "skip SVG generation");

    auto* sweep = app.add_subcommand("sweep", "run the scenario once per parameter value");
    sweep->add_option("scenario", scenario_path, "base scenario JSON file")->required();
    sweep->add_option("--param", param, "dotted parameter path, e.g. transition.hc_dtheta_rad")
        ->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--out", out_dir, "output directory (default: out)");

    auto* plot = app.add_subcommand("plot", "regenerate SVG figures from a trace CSV");
    plot->add_option("trace", trace_path, "trace.csv from a previous run")->required();
    plot->add_option("--out", out_dir, "output directory (default: out)");

    auto* metrics = app.add_subcommand("metrics", "recompute metrics from a trace CSV");
    metrics->add_option("trace", trace_path, "trace.csv from a previous run")->required();
    metrics->add_option("--scenario", metrics_scenario,
                        "scenario JSON supplying the metrics windows/thresholds");
    metrics->add_option("--out", metrics_out, "write metrics JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scenario_path, out_dir, seed, no_plots);
        if (sweep->parsed()) return cmd_sweep(scenario_path, param, values, out_dir);
        if (plot->parsed()) return cmd_plot(trace_path, out_dir);
        if (metrics->parsed()) return cmd_metrics(trace_path, metrics_scenario, metrics_out);
    } catch (const csifoc::NumericBlowup& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
