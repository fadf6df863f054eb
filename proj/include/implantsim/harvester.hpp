// Implant energy chain: RF-to-DC rectification, storage-capacitor accounting,
// and the threshold-gated load state machine (no PMU: loads gate directly on
// capacitor voltage).
//
// Charging is modeled as a constant-power source into the capacitor; on the
// microsecond timescales involved this is an accounting approximation, not a
// circuit simulation. The FSM hysteresis band (start 1.8 V / stop 1.65 V) is
// taken from the oscillator's startup minimum and the RF switch's minimum.
// While RUNNING, startup-gated loads (min voltage >= the band's upper
// threshold) keep running down to the band floor; other loads cut out the
// moment the voltage falls below their own minimum.

#pragma once

#include <cstdint>

namespace implantsim {

struct RectifierSpec {
    double efficiency = 0.40;
    double sensitivity_floor_dbm = -25.0;  // below this the output is 0
    double diode_drop_v = 0.15;  // per diode, two in the doubler; informational
};

// DC output for a given RF input; 0 below the sensitivity floor.
double rectify(const RectifierSpec& spec, double p_rf_w);

struct StorageCap {
    double capacitance_f = 330e-12;
    double voltage_v = 0.0;
    double leakage_w = 0.0;

    double energy_j() const { return 0.5 * capacitance_f * voltage_v * voltage_v; }
    static double energy_at(double c_f, double v) { return 0.5 * c_f * v * v; }
    void set_energy(double e_j);
};

struct PowerLoad {
    double power_w = 0.0;
    double min_voltage_v = 0.0;
};

struct LoadSpec {
    PowerLoad oscillator{3e-6, 1.8};
    PowerLoad rf_switch{165e-9, 1.65};
    PowerLoad sensor{0.0, 0.0};  // configurable 0..35 uW
};

enum class Phase : std::uint8_t { off, charging, running };
const char* phase_name(Phase p);

// Bitmask load set.
enum LoadId : unsigned {
    kLoadOscillator = 1u,
    kLoadRfSwitch = 2u,
    kLoadSensor = 4u,
};
using LoadSet = unsigned;
inline constexpr LoadSet kIdleRunningLoads = kLoadOscillator | kLoadRfSwitch;

struct EnergyLedger {
    double harvested_j = 0.0;
    double consumed_j = 0.0;
    double emitted_galvanic_j = 0.0;
};

struct HarvesterState {
    Phase phase = Phase::off;
    StorageCap cap;
    LoadSpec loads;
    double v_on = 1.8;   // CHARGING -> RUNNING upward crossing
    double v_off = 1.65;  // RUNNING -> CHARGING floor
    EnergyLedger ledger;

    static HarvesterState make(StorageCap cap, LoadSpec loads);
};

// Total power of the loads that actually run given phase and voltage.
double active_load_power(const HarvesterState& s, LoadSet requested);

// Advances one step of at most 1 us (the resolution bound of the
// constant-power charging approximation); throws std::invalid_argument
// otherwise. Pure: returns the new state.
HarvesterState step(const HarvesterState& s, double dt_s, double p_dc_w,
                    LoadSet requested);

// Exact advance over an interval with constant conditions. The caller must
// ensure no phase/load threshold is crossed strictly inside the interval
// (crossings at the endpoint are applied); netsim computes crossing times
// analytically and splits intervals there.
HarvesterState advance_exact(const HarvesterState& s, double dt_s, double p_dc_w,
                             LoadSet requested);

// Max steady sensor power on top of the base loads (oscillator + switch at
// the given duty), floored at 0.
double sustainable_load_w(double p_dc_w, const LoadSpec& base,
                          double switch_duty = 1.0, double margin_w = 0.0);

struct PulseResult {
    bool allowed = false;
    HarvesterState state;
};

// Discharges pulse_energy into the galvanic electrode if the capacitor stays
// at or above the hysteresis floor; ledger and voltage updated when allowed.
PulseResult galvanic_pulse_budget(const HarvesterState& s, double pulse_energy_j);

// One full hysteresis-band discharge: the default per-pulse budget.
double default_galvanic_pulse_energy_j(const StorageCap& cap, double v_on = 1.8,
                                       double v_off = 1.65);

// Closed-form time to charge from the current voltage to v_target at constant
// net power (infinity when unreachable).
double charge_time_s(const HarvesterState& s, double p_net_w, double v_target);

}  // namespace implantsim
