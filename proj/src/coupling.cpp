#include "implantsim/coupling.hpp"

#include <cmath>

namespace implantsim {

CouplingModel CouplingModel::calibrated(LayerStack stack, double anchor_freq_hz,
                                        double anchor_depth_mm,
                                        double anchor_coupling_db,
                                        double freq_exponent) {
    CouplingModel m;
    m.stack = std::move(stack);
    m.anchor_freq_hz = anchor_freq_hz;
    m.anchor_depth_mm = anchor_depth_mm;
    m.anchor_coupling_db = anchor_coupling_db;
    m.freq_exponent = freq_exponent;
    m.anchor_loss_db = loss_at_depth(m.stack, anchor_freq_hz, anchor_depth_mm);
    // The lumped term folds antenna and interface losses only; it must stay
    // passive across the supported band.
    for (double f = 100e6; f <= 700e6; f += 25e6) {
        if (m.c0_db(f) > 0.0)
            throw std::invalid_argument(
                "coupling: C0 exceeds 0 dB at " + std::to_string(f / 1e6) +
                " MHz; the lumped antenna term must stay passive");
    }
    return m;
}

double CouplingModel::c0_db(double f_hz) const {
    const double shape =
        20.0 * freq_exponent * std::log10(f_hz / anchor_freq_hz);
    return anchor_coupling_db + anchor_loss_db + shape;
}

double CouplingModel::coupling_db(double f_hz, double depth_mm) const {
    // Grouped so the anchor point reproduces anchor_coupling_db exactly.
    const double shape =
        20.0 * freq_exponent * std::log10(f_hz / anchor_freq_hz);
    return anchor_coupling_db +
           (anchor_loss_db - loss_at_depth(stack, f_hz, depth_mm)) + shape;
}

double received_power_dbm(double p_tx_dbm, double coupling_db) {
    return p_tx_dbm + coupling_db;
}

}  // namespace implantsim
