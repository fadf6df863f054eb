#include "implantsim/antenna.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace implantsim {

void ImpedanceTable::validate() const {
    if (points.size() < 2)
        throw std::invalid_argument("impedance table: need at least 2 points");
    for (size_t i = 0; i < points.size(); ++i) {
        if (points[i].r_ohm <= 0.0)
            throw std::invalid_argument("impedance table: R must be > 0 at all points");
        if (i > 0 && points[i].f_hz <= points[i - 1].f_hz)
            throw std::invalid_argument("impedance table: frequencies must be strictly increasing");
    }
    if (points.front().f_hz > 100e6 || points.back().f_hz < 700e6)
        throw std::invalid_argument("impedance table: must cover 100-700 MHz");
}

ImpedancePoint ImpedanceTable::at(double f_hz) const {
    if (points.empty() || f_hz < points.front().f_hz || f_hz > points.back().f_hz)
        throw std::out_of_range("impedance table: frequency outside table range");
    size_t hi = 1;
    while (hi < points.size() && points[hi].f_hz < f_hz) ++hi;
    if (hi == points.size()) hi = points.size() - 1;
    const ImpedancePoint& a = points[hi - 1];
    const ImpedancePoint& b = points[hi];
    if (f_hz == a.f_hz) return a;  // exact nodes return the node value
    if (f_hz == b.f_hz) return b;
    const double t = (f_hz - a.f_hz) / (b.f_hz - a.f_hz);
    return {f_hz, a.r_ohm + t * (b.r_ohm - a.r_ohm), a.x_ohm + t * (b.x_ohm - a.x_ohm)};
}

namespace {

// Series-resonator-shaped placeholder curve with an exact anchor node:
// R grows as (f/f0)^p, X crosses zero at f0 like a series RLC.
ImpedanceTable placeholder_table(double f0_hz, double r0_ohm, double x_scale_ohm,
                                 double r_exponent) {
    static const double grid_mhz[] = {100, 150, 200, 250, 300, 350, 401,
                                      450, 500, 550, 600, 650, 700};
    ImpedanceTable t;
    for (double fm : grid_mhz) {
        const double f = fm * 1e6;
        double r = r0_ohm * std::pow(f / f0_hz, r_exponent);
        double x = x_scale_ohm * (f / f0_hz - f0_hz / f);
        if (f == f0_hz) {
            r = r0_ohm;
            x = 0.0;
        }
        t.points.push_back({f, r, x});
    }
    return t;
}

}  // namespace

ImplantAntennaSpec default_implant_antenna() {
    ImplantAntennaSpec s;
    s.separation_mm = 20.0;
    s.impedance = placeholder_table(401e6, 35.0, 120.0, 1.5);
    return s;
}

OnBodyAntennaSpec default_onbody_antenna() {
    OnBodyAntennaSpec s;
    s.separation_mm = 100.0;
    s.impedance = placeholder_table(401e6, 50.0, 90.0, 1.2);
    return s;
}

ImpedancePoint impedance_at(const ImplantAntennaSpec& spec, double f_hz) {
    return spec.impedance.at(f_hz);
}

ImpedancePoint impedance_at(const OnBodyAntennaSpec& spec, double f_hz) {
    return spec.impedance.at(f_hz);
}

ImpedanceTable load_impedance_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open impedance table: " + path);
    ImpedanceTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.find("freq_hz") != std::string::npos) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream ss(line);
        ImpedancePoint p{};
        char comma;
        if (!(ss >> p.f_hz >> comma >> p.r_ohm >> comma >> p.x_ohm))
            throw std::runtime_error("malformed impedance row in " + path + ": " + line);
        t.points.push_back(p);
    }
    t.validate();
    return t;
}

void save_impedance_csv(const ImpedanceTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write impedance table: " + path);
    out << "freq_hz, r_ohm, x_ohm\n";
    for (const ImpedancePoint& p : table.points)
        out << p.f_hz << ", " << p.r_ohm << ", " << p.x_ohm << "\n";
}

}  // namespace implantsim
