#include "implantsim/matching.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace implantsim {

namespace {

using cd = std::complex<double>;

// The antenna reactance at design time is modeled as the equivalent lumped
// element so off-f0 sweeps see a physical frequency dependence.
cd antenna_reactance(double f_hz, double f0_hz, double x_ant) {
    if (x_ant == 0.0) return {0.0, 0.0};
    if (x_ant > 0.0) return {0.0, x_ant * f_hz / f0_hz};  // inductive
    return {0.0, x_ant * f0_hz / f_hz};                   // capacitive
}

}  // namespace

std::complex<double> MatchingNetwork::input_impedance(double f_hz, double /*r_ant*/,
                                                      double /*x_ant*/) const {
    const double w = 2.0 * M_PI * f_hz;
    const cd zl(0.0, w * inductance_h);
    const cd zc(0.0, -1.0 / (w * capacitance_f));
    const cd rl(load_resistance_ohm, 0.0);
    if (topology == MatchTopology::series_L_shunt_C) {
        return zl + (rl * zc) / (rl + zc);
    }
    const cd branch = zl + rl;
    return (zc * branch) / (zc + branch);
}

double MatchingNetwork::voltage_transfer(double f_hz, double r_ant, double x_ant) const {
    const double w = 2.0 * M_PI * f_hz;
    const cd z_src = cd(r_ant, 0.0) + antenna_reactance(f_hz, f0_hz, x_ant);
    const cd zl(0.0, w * inductance_h);
    const cd zc(0.0, -1.0 / (w * capacitance_f));
    const cd rl(load_resistance_ohm, 0.0);
    if (topology == MatchTopology::series_L_shunt_C) {
        const cd z_par = (rl * zc) / (rl + zc);
        return std::abs(z_par / (z_src + zl + z_par));
    }
    const cd branch = zl + rl;
    const cd z_in = (zc * branch) / (zc + branch);
    const cd v_node = z_in / (z_src + z_in);
    return std::abs(v_node * rl / branch);
}

MatchingNetwork design_match(double r_ant_ohm, double x_ant_ohm, double f0_hz,
                             double q_target, MatchTopology topology) {
    if (r_ant_ohm <= 0.0) throw std::invalid_argument("design_match: R_ant must be > 0");
    if (f0_hz <= 0.0) throw std::invalid_argument("design_match: f0 must be > 0");
    if (q_target < 1.0) throw std::invalid_argument("design_match: Q_target must be >= 1");

    const double w0 = 2.0 * M_PI * f0_hz;
    MatchingNetwork net;
    net.f0_hz = f0_hz;
    net.topology = topology;

    if (topology == MatchTopology::series_L_shunt_C) {
        // Up-transforming L-section: implied load R*(1+Q^2); the series element
        // also absorbs the antenna reactance.
        const double x_series = q_target * r_ant_ohm - x_ant_ohm;
        if (x_series <= 0.0) {
            throw std::invalid_argument(
                "design_match: Q_target unachievable for series_L_shunt_C; requires "
                "Q > X_ant/R_ant = " + std::to_string(x_ant_ohm / r_ant_ohm));
        }
        net.load_resistance_ohm = r_ant_ohm * (1.0 + q_target * q_target);
        net.inductance_h = x_series / w0;
        net.capacitance_f = q_target / (w0 * net.load_resistance_ohm);
        net.loaded_q = q_target;
        return net;
    }

    // Down-transforming section: shunt C raises the node Q, series L cancels
    // the remaining reactance.
    const double denom = r_ant_ohm * r_ant_ohm + x_ant_ohm * x_ant_ohm;
    const double g = r_ant_ohm / denom;
    const double b = -x_ant_ohm / denom;
    const double b_c = q_target * g - b;
    if (b_c <= 0.0) {
        throw std::invalid_argument(
            "design_match: Q_target unachievable for shunt_C_series_L; requires "
            "Q > -X_ant/R_ant = " + std::to_string(-x_ant_ohm / r_ant_ohm));
    }
    net.capacitance_f = b_c / w0;
    const double q2 = q_target * q_target;
    net.load_resistance_ohm = 1.0 / (g * (1.0 + q2));
    net.inductance_h = q_target / (g * (1.0 + q2)) / w0;
    net.loaded_q = q_target;
    return net;
}

double boosted_voltage(double p_avail_w, double r_ant_ohm, double q) {
    if (p_avail_w < 0.0) throw std::invalid_argument("boosted_voltage: P must be >= 0");
    if (r_ant_ohm <= 0.0) throw std::invalid_argument("boosted_voltage: R must be > 0");
    if (q <= 0.0) throw std::invalid_argument("boosted_voltage: Q must be > 0");
    return 2.0 * std::sqrt(2.0) * q * std::sqrt(p_avail_w * r_ant_ohm);
}

}  // namespace implantsim
