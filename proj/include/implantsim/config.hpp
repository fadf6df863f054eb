// Run configuration: a single key/value text file with [section] headers fully
// determines a run. Values layer as defaults profile < config file <
// --override KEY=VALUE flags.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "implantsim/antenna.hpp"
#include "implantsim/coupling.hpp"
#include "implantsim/netsim.hpp"

namespace implantsim {

struct ConfigFile {
    std::map<std::string, std::string> values;  // "section.key" -> raw text

    static ConfigFile parse_text(const std::string& text, const std::string& origin);
    static ConfigFile parse_file(const std::string& path);

    void overlay(const ConfigFile& other);             // other wins
    void apply_override(const std::string& key_value);  // "section.key=value"

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;
    // Section names matching prefix "name.", e.g. node ids under [node.*].
    std::vector<std::string> subsections(const std::string& prefix) const;
};

// The versioned defaults profile; every calibrated anchor lives here.
extern const char* const kDefaultsVersion;
const char* default_config_text();

struct SweepSpec {
    std::vector<double> freqs_hz;
    double depth_min_mm = 0.0;
    double depth_max_mm = 150.0;
    double depth_step_mm = 5.0;
    double bs_min_cm = 0.0;
    double bs_max_cm = 12.0;
    double bs_step_cm = 0.5;
};

// Fully typed run configuration assembled from a ConfigFile.
struct AppConfig {
    std::string profile_version;
    LayerStack stack;
    CouplingModel coupling;
    BackscatterLinkModel backscatter;
    GalvanicLinkModel galvanic;
    RectifierSpec rectifier;
    StorageCap storage;
    LoadSpec loads;
    ImplantAntennaSpec implant_antenna;
    OnBodyAntennaSpec onbody_antenna;
    double tx_dbm = 23.0;
    double carrier_hz = 401e6;
    double matching_q = 10.0;
    double report_depth_mm = 100.0;
    SweepSpec sweep;
    Scenario scenario;

    static AppConfig from_config(const ConfigFile& cfg);
};

}  // namespace implantsim
