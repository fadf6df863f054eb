// Antenna impedance tables and interpolation. Impedance curves are tabulated
// inputs: the shipped default tables are smooth plausible curves anchored at
// the one hard data point (20 mm implant electrode antenna: 35 ohm resistive
// resonance at 401 MHz) and are otherwise NON-AUTHORITATIVE placeholders.
// Load measured tables from CSV (freq_hz, r_ohm, x_ohm) for real work.

#pragma once

#include <string>
#include <vector>

namespace implantsim {

struct ImpedancePoint {
    double f_hz;
    double r_ohm;
    double x_ohm;
};

struct ImpedanceTable {
    std::vector<ImpedancePoint> points;  // strictly increasing f

    void validate() const;  // R > 0, coverage of 100-700 MHz, increasing f
    // Piecewise-linear interpolation; exact table nodes return the node value.
    // Throws std::out_of_range outside the table range.
    ImpedancePoint at(double f_hz) const;
};

struct ImplantAntennaSpec {
    double electrode_diameter_mm = 7.0;
    double electrode_thickness_mm = 1.0;
    double coupling_gap_mm = 0.1;
    double separation_mm = 20.0;  // electrode separation (implant length)
    ImpedanceTable impedance;
};

struct OnBodyAntennaSpec {
    double patch_size_mm = 15.0;  // square patch edge
    double tissue_gap_mm = 1.0;
    double separation_mm = 100.0;  // patch separation
    ImpedanceTable impedance;
};

// Default 20 mm implant antenna: anchored at (401 MHz, 35 ohm, 0 ohm).
ImplantAntennaSpec default_implant_antenna();
// Default 100 mm on-body patch pair (fully non-authoritative).
OnBodyAntennaSpec default_onbody_antenna();

ImpedancePoint impedance_at(const ImplantAntennaSpec& spec, double f_hz);
ImpedancePoint impedance_at(const OnBodyAntennaSpec& spec, double f_hz);

// CSV I/O, format: header `freq_hz, r_ohm, x_ohm` then one row per point.
ImpedanceTable load_impedance_csv(const std::string& path);
void save_impedance_csv(const ImpedanceTable& table, const std::string& path);

}  // namespace implantsim
