#include "implantsim/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "implantsim/csvio.hpp"
#include "implantsim/matching.hpp"
#include "implantsim/units.hpp"

namespace implantsim {

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

struct DepthRow {
    double f_hz, depth_mm;
    std::string text;
};

DepthRow depth_row(const AppConfig& app, double f_hz, double depth_mm) {
    const double coupling = app.coupling.coupling_db(f_hz, depth_mm);
    const double p_rx_dbm = received_power_dbm(app.tx_dbm, coupling);
    const double p_rx_w = dbm_to_watt(p_rx_dbm);
    const double p_dc_w = rectify(app.rectifier, p_rx_w);
    const double r_ant = impedance_at(app.implant_antenna, f_hz).r_ohm;
    const double v_boost = boosted_voltage(p_rx_w, r_ant, app.matching_q);
    const double sustain = sustainable_load_w(p_dc_w, app.loads);
    DepthRow row{f_hz, depth_mm,
                 csv_row({fmt6(f_hz), fmt6(depth_mm), fmt6(coupling), fmt6(p_rx_dbm),
                          fmt6(p_dc_w * 1e6), fmt6(v_boost), fmt6(sustain * 1e6)})};
    return row;
}

}  // namespace

void cmd_sweep_depth(const AppConfig& app, const std::string& out_dir, int threads) {
    std::vector<std::pair<double, double>> points;
    for (double f : app.sweep.freqs_hz) {
        const int n_depth = static_cast<int>(std::floor(
                                (app.sweep.depth_max_mm - app.sweep.depth_min_mm) /
                                app.sweep.depth_step_mm + 1e-9)) + 1;
        for (int k = 0; k < n_depth; ++k)
            points.emplace_back(f, app.sweep.depth_min_mm + k * app.sweep.depth_step_mm);
    }
    // Pure per-point work in a pool; rows land in axis order regardless of
    // completion order.
    std::vector<std::string> rows(points.size());
    const int n_threads = threads > 0
                              ? threads
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> futs;
    std::atomic<std::size_t> cursor{0};
    for (int w = 0; w < n_threads; ++w) {
        futs.push_back(std::async(std::launch::async, [&] {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= points.size()) return;
                rows[i] = depth_row(app, points[i].first, points[i].second).text;
            }
        }));
    }
    for (auto& f : futs) f.get();

    std::ofstream out = open_out(out_dir, "sweep_depth.csv");
    out << "freq_hz, depth_mm, coupling_db, p_rx_dbm, p_dc_uw, v_boost, "
           "sustainable_sensor_uw\n";
    for (const std::string& r : rows) out << r;
}

void cmd_sweep_backscatter(const AppConfig& app, const std::string& out_dir) {
    std::ofstream out = open_out(out_dir, "sweep_backscatter.csv");
    out << "depth_cm, p_rx_dbm, margin_db, detected\n";
    const int n = static_cast<int>(std::floor(
                      (app.sweep.bs_max_cm - app.sweep.bs_min_cm) / app.sweep.bs_step_cm +
                      1e-9)) + 1;
    for (int k = 0; k < n; ++k) {
        const double d = app.sweep.bs_min_cm + k * app.sweep.bs_step_cm;
        const DetectionResult det = backscatter_detect(app.backscatter, app.tx_dbm, d);
        out << csv_row({fmt6(d), fmt6(det.p_rx_dbm), fmt6(det.margin),
                        det.detected ? "true" : "false"});
    }
    // companion sweep for the intra-body link over the same axis
    std::ofstream galv = open_out(out_dir, "sweep_galvanic.csv");
    galv << galvanic_sweep_csv(app.galvanic, app.sweep.bs_min_cm, app.sweep.bs_max_cm,
                               app.sweep.bs_step_cm);
}

void cmd_simulate(const AppConfig& app, const std::string& out_dir) {
    const Trace trace = run(app.scenario);

    std::ofstream ev = open_out(out_dir, "events.csv");
    ev << "t_ns, node, kind, detail\n";
    for (const Event& e : trace.events) {
        std::string detail = e.detail;
        for (char& c : detail)
            if (c == ',') c = ';';
        ev << e.t_ns << ", " << e.node << ", " << event_kind_name(e.kind) << ", "
           << detail << "\n";
    }

    const Report rep = summarize(trace);
    std::ofstream mx = open_out(out_dir, "metrics.csv");
    mx << "node, delivered_bits, j_per_bit, availability\n";
    for (const auto& [id, m] : trace.metrics) {
        const NodeReport& r = rep.nodes.at(id);
        mx << id << ", " << m.delivered_bits << ", " << fmt6(r.j_per_bit) << ", "
           << fmt6(r.availability) << "\n";
    }

    std::ofstream sm = open_out(out_dir, "summary.txt");
    sm << "scenario: duration " << fmt6(trace.duration_s) << " s, "
       << trace.metrics.size() << " nodes, " << trace.events.size() << " events\n\n";
    for (const auto& [id, m] : trace.metrics) {
        const NodeReport& r = rep.nodes.at(id);
        sm << id << "\n";
        sm << "  offered/delivered/received bits: " << m.offered_bits << " / "
           << m.delivered_bits << " / " << m.received_bits << "\n";
        sm << "  throughput: " << fmt6(r.throughput_bps) << " bit/s\n";
        sm << "  energy per delivered bit: "
           << (m.delivered_bits > 0 ? fmt6(r.j_per_bit) + " J" : std::string("n/a"))
           << "\n";
        sm << "  energy harvested/consumed/emitted: " << fmt6(m.harvested_j) << " / "
           << fmt6(m.consumed_j) << " / " << fmt6(m.emitted_galvanic_j) << " J\n";
        sm << "  time off/charging/running: " << fmt6(m.t_off_s) << " / "
           << fmt6(m.t_charging_s) << " / " << fmt6(m.t_running_s) << " s\n";
        sm << "  availability: " << fmt6(r.availability) << "\n";
        sm << "  cap voltage min/max: " << fmt6(m.v_min) << " / " << fmt6(m.v_max)
           << " V\n";
    }
}

void cmd_linkbudget(const AppConfig& app, std::ostream& out) {
    const double f = app.carrier_hz;
    const double d_mm = app.report_depth_mm;
    const double coupling = app.coupling.coupling_db(f, d_mm);
    const double p_rx_dbm = received_power_dbm(app.tx_dbm, coupling);
    const double p_rx_w = dbm_to_watt(p_rx_dbm);
    const double p_dc_w = rectify(app.rectifier, p_rx_w);
    const double r_ant = impedance_at(app.implant_antenna, f).r_ohm;
    const double v_boost = boosted_voltage(p_rx_w, r_ant, app.matching_q);
    const double v_on = app.loads.oscillator.min_voltage_v;
    const double sustain = sustainable_load_w(p_dc_w, app.loads);
    const DetectionResult bs = backscatter_detect(app.backscatter, app.tx_dbm, d_mm / 10.0);
    const double band =
        default_galvanic_pulse_energy_j(app.storage, v_on, app.loads.rf_switch.min_voltage_v);

    out << "link budget @ " << fmt6(f / 1e6) << " MHz, depth " << fmt6(d_mm) << " mm "
        << "(profile v" << app.profile_version << ")\n";
    out << "  TX power             : " << fmt6(app.tx_dbm) << " dBm\n";
    out << "  coupling             : " << fmt6(coupling) << " dB  (C0 "
        << fmt6(app.coupling.c0_db(f)) << " dB)\n";
    out << "  received power       : " << fmt6(p_rx_dbm) << " dBm  ("
        << fmt6(p_rx_w * 1e6) << " uW)\n";
    out << "  rectified DC         : " << fmt6(p_dc_w * 1e6) << " uW\n";
    out << "  boosted voltage      : " << fmt6(v_boost) << " V  (Q "
        << fmt6(app.matching_q) << ", R " << fmt6(r_ant) << " ohm)\n";
    out << "  startup threshold    : " << (v_boost >= v_on ? "PASS" : "FAIL") << "  (need "
        << fmt6(v_on) << " V"
        << (v_boost < v_on && v_boost >= 0.9 * v_on
                ? "; within 10%, see the Q calibration note in the README"
                : "")
        << ")\n";
    out << "  sustainable sensor   : " << fmt6(sustain * 1e6) << " uW\n";
    out << "  backscatter margin   : " << fmt6(bs.margin) << " dB at "
        << fmt6(d_mm / 10.0) << " cm ("
        << (bs.detected ? "detectable" : "below threshold") << ")\n";
    out << "  galvanic pulse budget: " << fmt6(app.galvanic.pulse_energy_j * 1e12)
        << " pJ/pulse, " << fmt6(band * 1e12) << " pJ per hysteresis band\n";
}

int run_cli(int argc, const char* const* argv) {
    CLI::App cli{"implantsim: RF-powered battery-free implant link and network simulator"};
    cli.require_subcommand(1);
    cli.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    int threads = 0;
    cli.add_option("--config", config_path,
                   "config file (default: $IMPLANTSIM_CONFIG or built-in defaults)");
    cli.add_option("--out", out_dir, "output directory");
    cli.add_option("--override", overrides, "SECTION.KEY=VALUE, repeatable");
    cli.add_option("--seed", seed, "override scenario seed");
    cli.add_option("--threads", threads, "sweep worker threads (0 = hardware)");

    CLI::App* c_depth = cli.add_subcommand("sweep-depth", "coupling/power vs depth CSV");
    CLI::App* c_bs = cli.add_subcommand("sweep-backscatter", "backscatter level vs depth CSV");
    CLI::App* c_sim = cli.add_subcommand("simulate", "run the scenario, write trace CSVs");
    CLI::App* c_lb = cli.add_subcommand("linkbudget", "print the end-to-end budget table");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return 2;
    }

    try {
        ConfigFile cfg = ConfigFile::parse_text(default_config_text(), "<defaults>");
        if (config_path.empty()) {
            if (const char* env = std::getenv("IMPLANTSIM_CONFIG")) config_path = env;
        }
        if (!config_path.empty()) cfg.overlay(ConfigFile::parse_file(config_path));
        for (const std::string& ov : overrides) cfg.apply_override(ov);
        if (seed >= 0) cfg.values["scenario.seed"] = std::to_string(seed);

        const AppConfig app = AppConfig::from_config(cfg);
        if (c_depth->parsed()) cmd_sweep_depth(app, out_dir, threads);
        if (c_bs->parsed()) cmd_sweep_backscatter(app, out_dir);
        if (c_sim->parsed()) cmd_simulate(app, out_dir);
        if (c_lb->parsed()) cmd_linkbudget(app, std::cout);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace implantsim
