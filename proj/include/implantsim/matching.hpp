// Resonant L-section matching design and the ideal-resonator voltage boost.
//
// design_match sizes a lossless two-element network against the antenna
// impedance so the input is purely resistive at f0 with network Q equal to
// the target; the resulting voltage magnification feeds the rectifier.

#pragma once

#include <complex>

namespace implantsim {

enum class MatchTopology { series_L_shunt_C, shunt_C_series_L };

struct MatchingNetwork {
    double f0_hz = 0.0;
    double loaded_q = 0.0;
    MatchTopology topology = MatchTopology::series_L_shunt_C;
    double inductance_h = 0.0;
    double capacitance_f = 0.0;
    // Implied resistive termination the network transforms the antenna to.
    double load_resistance_ohm = 0.0;

    // Input impedance seen from the antenna terminals at f (antenna reactance
    // modeled as the equivalent lumped element fixed at design time).
    std::complex<double> input_impedance(double f_hz, double r_ant, double x_ant) const;
    // |V_load / V_source| with the source (R_ant + jX_ant) driving the network.
    double voltage_transfer(double f_hz, double r_ant, double x_ant) const;
};

// Designs the match. Throws std::invalid_argument when the target Q is
// unachievable for the topology/impedance combination (the message names the
// achievable bound).
MatchingNetwork design_match(double r_ant_ohm, double x_ant_ohm, double f0_hz,
                             double q_target, MatchTopology topology =
                                 MatchTopology::series_L_shunt_C);

// Peak voltage presented to the rectifier input before diode drops:
// V = 2*sqrt(2)*Q*sqrt(P*R) (ideal series-resonant magnification, RMS->peak,
// ideal doubler x2).
double boosted_voltage(double p_avail_w, double r_ant_ohm, double q);

}  // namespace implantsim
