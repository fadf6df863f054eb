#include "implantsim/harvester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "implantsim/units.hpp"

namespace implantsim {

double rectify(const RectifierSpec& spec, double p_rf_w) {
    if (p_rf_w < 0.0) throw std::invalid_argument("rectify: P_rf must be >= 0");
    if (spec.efficiency <= 0.0 || spec.efficiency > 1.0)
        throw std::invalid_argument("rectify: efficiency must lie in (0, 1]");
    if (p_rf_w == 0.0) return 0.0;
    if (watt_to_dbm(p_rf_w) < spec.sensitivity_floor_dbm) return 0.0;
    return spec.efficiency * p_rf_w;
}

void StorageCap::set_energy(double e_j) {
    voltage_v = e_j <= 0.0 ? 0.0 : std::sqrt(2.0 * e_j / capacitance_f);
}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::off: return "OFF";
        case Phase::charging: return "CHARGING";
        case Phase::running: return "RUNNING";
    }
    return "?";
}

HarvesterState HarvesterState::make(StorageCap cap, LoadSpec loads) {
    HarvesterState s;
    s.cap = cap;
    s.loads = loads;
    s.v_on = loads.oscillator.min_voltage_v;
    s.v_off = loads.rf_switch.min_voltage_v;
    if (!(s.v_off > 0.0) || s.v_off > s.v_on)
        throw std::invalid_argument("harvester: need 0 < v_off <= v_on");
    return s;
}

namespace {

bool load_runs(const HarvesterState& s, const PowerLoad& load) {
    if (s.phase != Phase::running) return false;
    // Startup-gated loads (min voltage at/above the band's upper threshold)
    // are carried by the hysteresis down to the floor.
    if (load.min_voltage_v >= s.v_on) return true;
    return s.cap.voltage_v >= load.min_voltage_v;
}

// Shared single-interval integration; transitions applied at the end.
HarvesterState integrate(const HarvesterState& s, double dt_s, double p_dc_w,
                         LoadSet requested) {
    if (p_dc_w < 0.0) throw std::invalid_argument("harvester: P_dc must be >= 0");

    HarvesterState out = s;
    if (out.phase == Phase::off && p_dc_w > 0.0) out.phase = Phase::charging;

    const double p_load = active_load_power(out, requested);
    const double p_drain = p_load + out.cap.leakage_w;
    const double e0 = out.cap.energy_j();
    const double harvested = p_dc_w * dt_s;
    const double demand = p_drain * dt_s;
    // Consumption is capped at what is actually available, so the ledger
    // balances exactly: harvested - consumed = delta stored.
    const double consumed = std::min(demand, e0 + harvested);
    out.cap.set_energy(e0 + harvested - consumed);
    out.ledger.harvested_j += harvested;
    out.ledger.consumed_j += consumed;

    if (out.phase == Phase::charging && s.cap.voltage_v < out.v_on &&
        out.cap.voltage_v >= out.v_on) {
        out.phase = Phase::running;  // upward crossing only
    } else if (out.phase == Phase::running && out.cap.voltage_v < out.v_off) {
        out.phase = Phase::charging;
    }
    return out;
}

}  // namespace

double active_load_power(const HarvesterState& s, LoadSet requested) {
    double p = 0.0;
    if ((requested & kLoadOscillator) && load_runs(s, s.loads.oscillator))
        p += s.loads.oscillator.power_w;
    if ((requested & kLoadRfSwitch) && load_runs(s, s.loads.rf_switch))
        p += s.loads.rf_switch.power_w;
    if ((requested & kLoadSensor) && load_runs(s, s.loads.sensor))
        p += s.loads.sensor.power_w;
    return p;
}

HarvesterState step(const HarvesterState& s, double dt_s, double p_dc_w,
                    LoadSet requested) {
    if (!(dt_s > 0.0) || dt_s > 1e-6)
        throw std::invalid_argument("harvester step: dt must lie in (0, 1 us]");
    return integrate(s, dt_s, p_dc_w, requested);
}

HarvesterState advance_exact(const HarvesterState& s, double dt_s, double p_dc_w,
                             LoadSet requested) {
    if (dt_s < 0.0) throw std::invalid_argument("harvester advance: dt must be >= 0");
    if (dt_s == 0.0) return s;
    return integrate(s, dt_s, p_dc_w, requested);
}

double sustainable_load_w(double p_dc_w, const LoadSpec& base, double switch_duty,
                          double margin_w) {
    if (p_dc_w < 0.0) throw std::invalid_argument("sustainable_load: P_dc must be >= 0");
    return std::max(0.0, p_dc_w - base.oscillator.power_w -
                             base.rf_switch.power_w * switch_duty - margin_w);
}

PulseResult galvanic_pulse_budget(const HarvesterState& s, double pulse_energy_j) {
    if (pulse_energy_j < 0.0)
        throw std::invalid_argument("galvanic_pulse_budget: pulse energy must be >= 0");
    PulseResult r;
    r.state = s;
    if (pulse_energy_j == 0.0) {
        r.allowed = true;
        return r;
    }
    const double e_after = s.cap.energy_j() - pulse_energy_j;
    const double e_floor = StorageCap::energy_at(s.cap.capacitance_f, s.v_off);
    // Tiny relative slack absorbs roundoff when the pulse is sized to land
    // exactly on the floor.
    if (e_after < e_floor * (1.0 - 1e-12)) return r;
    r.allowed = true;
    r.state.cap.set_energy(e_after);
    r.state.ledger.emitted_galvanic_j += pulse_energy_j;
    return r;
}

double default_galvanic_pulse_energy_j(const StorageCap& cap, double v_on,
                                       double v_off) {
    return StorageCap::energy_at(cap.capacitance_f, v_on) -
           StorageCap::energy_at(cap.capacitance_f, v_off);
}

double charge_time_s(const HarvesterState& s, double p_net_w, double v_target) {
    const double e_target = StorageCap::energy_at(s.cap.capacitance_f, v_target);
    const double e_now = s.cap.energy_j();
    if (e_now >= e_target) return 0.0;
    if (p_net_w <= 0.0) return std::numeric_limits<double>::infinity();
    return (e_target - e_now) / p_net_w;
}

}  // namespace implantsim
