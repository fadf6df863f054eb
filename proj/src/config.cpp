#include "implantsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace implantsim {

const char* const kDefaultsVersion = "1";

const char* default_config_text() {
    return R"(# implantsim defaults profile. Every calibrated anchor lives here so
# calibration changes stay diffable. Override per run with a config file or
# --override section.key=value.

[profile]
version = 1

[tissue]
# muscle = uniform muscle half-space (the calibration geometry);
# skin_fat_muscle = layered skin/fat over muscle.
stack = muscle
skin_mm = 2
fat_mm = 10
terminal_extent_mm = 150

[grid]
dx_mm = 0.25
courant = 0.99
sample_dz_mm = 1.0

[link]
tx_dbm = 23
carrier_hz = 401e6
q = 10
anchor_coupling_db = -33
anchor_depth_mm = 100
anchor_freq_hz = 401e6
c0_freq_exponent = 2
impedance_csv =

[rectifier]
efficiency = 0.4
sensitivity_dbm = -25
diode_drop_v = 0.15

[storage]
capacitance_f = 330e-12
leakage_w = 0

[loads]
oscillator_w = 3e-6
oscillator_min_v = 1.8
switch_w = 165e-9
switch_min_v = 1.65
sensor_w = 0
sensor_min_v = 0

[backscatter]
slope_db_per_cm = 2.9
anchor_depth_cm = 8.5
anchor_tx_dbm = 23
noise_floor_dbm = -100
detection_snr_db = 10
subcarrier_hz = 100e3
duty = 0.5
reader_isolation_db = -25

[galvanic]
decay_exponent = 3
max_range_cm = 5
# 0 = one full hysteresis-band discharge of the storage cap
pulse_energy_j = 0

[sweep]
freqs_mhz = 100,200,300,401,500,600,700
depth_min_mm = 0
depth_max_mm = 150
depth_step_mm = 5
bs_min_cm = 0
bs_max_cm = 12
bs_step_cm = 0.5

[report]
depth_mm = 100

[scenario]
duration_s = 0.02
seed = 1
tdma_slot_s = 0
metric_sample_s = 0.005
traffic_jitter_s = 0

[node.reader]
kind = reader
pos_mm = 0,0,0
tx_dbm = 23
carrier_hz = 401e6
bistatic_sep_mm = 50

[node.hub]
kind = hub
pos_mm = 0,0,80

[node.p1]
kind = peripheral
pos_mm = 0,40,80

[traffic.0]
t_s = 0.001
source = hub
link = backscatter
bits = 256
rate_bps = 50e3

[traffic.1]
t_s = 0.012
source = hub
link = galvanic
bits = 16
rate_bps = 10e3
)";
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": empty key");
        cfg.values[section.empty() ? key : section + "." + key] = val;
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

void ConfigFile::overlay(const ConfigFile& other) {
    for (const auto& [k, v] : other.values) values[k] = v;
}

void ConfigFile::apply_override(const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("override must be SECTION.KEY=VALUE: " + key_value);
    values[trim(key_value.substr(0, eq))] = trim(key_value.substr(eq + 1));
}

bool ConfigFile::has(const std::string& key) const { return values.count(key) > 0; }

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse number '" +
                                    it->second + "'");
    }
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    return static_cast<std::int64_t>(std::llround(v));
}

std::vector<double> ConfigFile::get_list(const std::string& key,
                                         const std::vector<double>& fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': cannot parse list item '" +
                                        tok + "'");
        }
    }
    return out;
}

std::vector<std::string> ConfigFile::subsections(const std::string& prefix) const {
    std::vector<std::string> names;
    const std::string pat = prefix + ".";
    for (const auto& [k, v] : values) {
        if (k.rfind(pat, 0) != 0) continue;
        const auto dot = k.find('.', pat.size());
        if (dot == std::string::npos) continue;
        const std::string name = k.substr(pat.size(), dot - pat.size());
        if (std::find(names.begin(), names.end(), name) == names.end())
            names.push_back(name);
    }
    std::sort(names.begin(), names.end());
    return names;
}

namespace {

LayerStack build_stack(const ConfigFile& cfg) {
    const std::string kind = cfg.get_string("tissue.stack", "muscle");
    LayerStack s;
    if (kind == "muscle") {
        s = muscle_halfspace();
    } else if (kind == "skin_fat_muscle") {
        s = skin_fat_muscle();
        s.layers[0].thickness_mm = cfg.get_double("tissue.skin_mm", 2.0);
        s.layers[1].thickness_mm = cfg.get_double("tissue.fat_mm", 10.0);
    } else {
        throw std::invalid_argument("tissue.stack must be 'muscle' or 'skin_fat_muscle'");
    }
    s.terminal_extent_mm = cfg.get_double("tissue.terminal_extent_mm", 150.0);
    return s;
}

NodeKind parse_kind(const std::string& s) {
    if (s == "reader") return NodeKind::reader;
    if (s == "hub" || s == "hub_implant") return NodeKind::hub_implant;
    if (s == "peripheral" || s == "peripheral_implant")
        return NodeKind::peripheral_implant;
    throw std::invalid_argument("node kind must be reader|hub|peripheral: " + s);
}

}  // namespace

AppConfig AppConfig::from_config(const ConfigFile& cfg) {
    AppConfig app;
    app.profile_version = cfg.get_string("profile.version", kDefaultsVersion);

    app.stack = build_stack(cfg);
    app.tx_dbm = cfg.get_double("link.tx_dbm", 23.0);
    app.carrier_hz = cfg.get_double("link.carrier_hz", 401e6);
    app.matching_q = cfg.get_double("link.q", 10.0);
    app.coupling = CouplingModel::calibrated(
        app.stack, cfg.get_double("link.anchor_freq_hz", 401e6),
        cfg.get_double("link.anchor_depth_mm", 100.0),
        cfg.get_double("link.anchor_coupling_db", -33.0),
        cfg.get_double("link.c0_freq_exponent", 2.0));

    app.rectifier.efficiency = cfg.get_double("rectifier.efficiency", 0.40);
    app.rectifier.sensitivity_floor_dbm = cfg.get_double("rectifier.sensitivity_dbm", -25.0);
    app.rectifier.diode_drop_v = cfg.get_double("rectifier.diode_drop_v", 0.15);

    app.storage.capacitance_f = cfg.get_double("storage.capacitance_f", 330e-12);
    app.storage.leakage_w = cfg.get_double("storage.leakage_w", 0.0);

    app.loads.oscillator = {cfg.get_double("loads.oscillator_w", 3e-6),
                            cfg.get_double("loads.oscillator_min_v", 1.8)};
    app.loads.rf_switch = {cfg.get_double("loads.switch_w", 165e-9),
                           cfg.get_double("loads.switch_min_v", 1.65)};
    app.loads.sensor = {cfg.get_double("loads.sensor_w", 0.0),
                        cfg.get_double("loads.sensor_min_v", 0.0)};

    app.backscatter.slope_db_per_cm = cfg.get_double("backscatter.slope_db_per_cm", 2.9);
    app.backscatter.anchor_depth_cm = cfg.get_double("backscatter.anchor_depth_cm", 8.5);
    app.backscatter.anchor_tx_dbm = cfg.get_double("backscatter.anchor_tx_dbm", 23.0);
    app.backscatter.noise_floor_dbm = cfg.get_double("backscatter.noise_floor_dbm", -100.0);
    app.backscatter.detection_snr_db = cfg.get_double("backscatter.detection_snr_db", 10.0);
    app.backscatter.subcarrier_hz = cfg.get_double("backscatter.subcarrier_hz", 100e3);
    app.backscatter.duty = cfg.get_double("backscatter.duty", 0.5);
    app.backscatter.reader_isolation_db =
        cfg.get_double("backscatter.reader_isolation_db", -25.0);

    double pulse = cfg.get_double("galvanic.pulse_energy_j", 0.0);
    if (pulse <= 0.0)
        pulse = default_galvanic_pulse_energy_j(app.storage,
                                                app.loads.oscillator.min_voltage_v,
                                                app.loads.rf_switch.min_voltage_v);
    app.galvanic = GalvanicLinkModel::make(pulse, cfg.get_double("galvanic.max_range_cm", 5.0),
                                           cfg.get_double("galvanic.decay_exponent", 3.0));

    app.implant_antenna = default_implant_antenna();
    const std::string imp_csv = cfg.get_string("link.impedance_csv", "");
    if (!imp_csv.empty()) app.implant_antenna.impedance = load_impedance_csv(imp_csv);
    app.onbody_antenna = default_onbody_antenna();

    const std::vector<double> freqs_mhz =
        cfg.get_list("sweep.freqs_mhz", {100, 200, 300, 401, 500, 600, 700});
    app.sweep.freqs_hz.clear();
    for (double f : freqs_mhz) app.sweep.freqs_hz.push_back(f * 1e6);
    app.sweep.depth_min_mm = cfg.get_double("sweep.depth_min_mm", 0.0);
    app.sweep.depth_max_mm = cfg.get_double("sweep.depth_max_mm", 150.0);
    app.sweep.depth_step_mm = cfg.get_double("sweep.depth_step_mm", 5.0);
    app.sweep.bs_min_cm = cfg.get_double("sweep.bs_min_cm", 0.0);
    app.sweep.bs_max_cm = cfg.get_double("sweep.bs_max_cm", 12.0);
    app.sweep.bs_step_cm = cfg.get_double("sweep.bs_step_cm", 0.5);
    if (app.sweep.depth_step_mm <= 0.0 || app.sweep.bs_step_cm <= 0.0)
        throw std::invalid_argument("sweep steps must be > 0");
    for (double f : app.sweep.freqs_hz)
        if (f < 100e6 || f > 700e6)
            throw std::invalid_argument("sweep frequencies must lie within 100-700 MHz");

    app.report_depth_mm = cfg.get_double("report.depth_mm", 100.0);

    Scenario& sc = app.scenario;
    sc.stack = app.stack;
    sc.coupling = app.coupling;
    sc.backscatter = app.backscatter;
    sc.galvanic = app.galvanic;
    sc.duration_s = cfg.get_double("scenario.duration_s", 0.02);
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("scenario.seed", 1));
    sc.metric_sample_s = cfg.get_double("scenario.metric_sample_s", 0.0);
    sc.traffic_jitter_s = cfg.get_double("scenario.traffic_jitter_s", 0.0);

    std::vector<std::string> implant_ids;
    for (const std::string& name : cfg.subsections("node")) {
        const std::string p = "node." + name + ".";
        NodeConfig n;
        n.node_id = name;
        n.kind = parse_kind(cfg.get_string(p + "kind", "peripheral"));
        const std::vector<double> pos = cfg.get_list(p + "pos_mm", {0, 0, 0});
        if (pos.size() != 3)
            throw std::invalid_argument("node." + name + ".pos_mm needs 3 values");
        n.position_mm = {pos[0], pos[1], pos[2]};
        if (n.kind == NodeKind::reader) {
            n.tx_dbm = cfg.get_double(p + "tx_dbm", app.tx_dbm);
            n.carrier_hz = cfg.get_double(p + "carrier_hz", app.carrier_hz);
            n.bistatic_separation_mm = cfg.get_double(p + "bistatic_sep_mm", 50.0);
        } else {
            n.implant.antenna = app.implant_antenna;
            n.implant.matching_q = cfg.get_double(p + "q", app.matching_q);
            n.implant.rectifier = app.rectifier;
            n.implant.storage = app.storage;
            n.implant.loads = app.loads;
            n.implant.loads.sensor.power_w =
                cfg.get_double(p + "sensor_w", app.loads.sensor.power_w);
            implant_ids.push_back(name);
        }
        sc.nodes.push_back(std::move(n));
    }

    const double slot = cfg.get_double("scenario.tdma_slot_s", 0.0);
    if (slot > 0.0) sc.tdma = schedule_tdma(implant_ids, slot);

    for (const std::string& idx : cfg.subsections("traffic")) {
        const std::string p = "traffic." + idx + ".";
        TrafficEntry te;
        te.t_s = cfg.get_double(p + "t_s", 0.0);
        te.source = cfg.get_string(p + "source", "");
        const std::string link = cfg.get_string(p + "link", "backscatter");
        if (link == "backscatter")
            te.link = LinkKind::backscatter;
        else if (link == "galvanic")
            te.link = LinkKind::galvanic;
        else
            throw std::invalid_argument("traffic." + idx +
                                        ".link must be backscatter|galvanic");
        te.frame.bits = cfg.get_int(p + "bits", 0);
        te.frame.rate_bps = cfg.get_double(p + "rate_bps", 50e3);
        sc.traffic.push_back(std::move(te));
    }
    return app;
}

}  // namespace implantsim
