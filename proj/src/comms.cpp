#include "implantsim/comms.hpp"

#include <cmath>
#include <stdexcept>

namespace implantsim {

void BackscatterLinkModel::validate() const {
    if (slope_db_per_cm <= 0.0)
        throw std::invalid_argument("backscatter: slope must be > 0");
    if (duty <= 0.0 || duty >= 1.0)
        throw std::invalid_argument("backscatter: duty must lie in (0, 1)");
    if (subcarrier_hz <= 0.0)
        throw std::invalid_argument("backscatter: subcarrier frequency must be > 0");
}

double GalvanicLinkModel::amplitude_at(double distance_cm) const {
    return amplitude_scale / std::pow(distance_cm, decay_exponent);
}

double GalvanicLinkModel::detector_threshold() const {
    return amplitude_scale / std::pow(max_range_cm, decay_exponent);
}

void GalvanicLinkModel::validate() const {
    if (decay_exponent <= 0.0)
        throw std::invalid_argument("galvanic: decay exponent must be > 0");
    if (max_range_cm <= 0.0)
        throw std::invalid_argument("galvanic: max range must be > 0");
    if (pulse_energy_j < 0.0)
        throw std::invalid_argument("galvanic: pulse energy must be >= 0");
}

GalvanicLinkModel GalvanicLinkModel::make(double pulse_energy_j, double max_range_cm,
                                          double decay_exponent) {
    GalvanicLinkModel m;
    m.pulse_energy_j = pulse_energy_j;
    m.max_range_cm = max_range_cm;
    m.decay_exponent = decay_exponent;
    m.validate();
    return m;
}

void Bitstream::validate(double subcarrier_hz) const {
    if (bits < 0) throw std::invalid_argument("bitstream: bit count must be >= 0");
    if (rate_bps <= 0.0) throw std::invalid_argument("bitstream: rate must be > 0");
    if (subcarrier_hz > 0.0 && rate_bps > subcarrier_hz / 2.0)
        throw std::invalid_argument("bitstream: rate exceeds subcarrier/2");
}

double backscatter_margin_db(const BackscatterLinkModel& m, double p_tx_dbm,
                             double depth_cm) {
    if (depth_cm < 0.0) throw std::invalid_argument("backscatter: depth must be >= 0");
    // Anchor-relative form: exactly 0 at (anchor_tx, anchor_depth).
    return (p_tx_dbm - m.anchor_tx_dbm) +
           m.slope_db_per_cm * (m.anchor_depth_cm - depth_cm);
}

double backscatter_rx_dbm(const BackscatterLinkModel& m, double p_tx_dbm,
                          double depth_cm) {
    return m.threshold_dbm() + backscatter_margin_db(m, p_tx_dbm, depth_cm);
}

DetectionResult backscatter_detect(const BackscatterLinkModel& m, double p_tx_dbm,
                                   double depth_cm) {
    DetectionResult r;
    r.margin = backscatter_margin_db(m, p_tx_dbm, depth_cm);
    r.p_rx_dbm = m.threshold_dbm() + r.margin;
    r.detected = r.margin >= 0.0;
    // Carrier leakage between the reader antennas; the subcarrier offset keeps
    // it out of the detection band, so it is reported, not subtracted.
    r.self_interference_dbm = p_tx_dbm + m.reader_isolation_db;
    return r;
}

DetectionResult galvanic_rx_detect(const GalvanicLinkModel& m, double distance_cm) {
    if (distance_cm <= 0.0)
        throw std::invalid_argument("galvanic: distance must be > 0");
    DetectionResult r;
    r.margin = m.amplitude_at(distance_cm) - m.detector_threshold();
    r.detected = r.margin >= 0.0;
    return r;
}

FrameResult transmit_frame_backscatter(const BackscatterLinkModel& m,
                                       const Bitstream& frame, double p_tx_dbm,
                                       double depth_cm, const HarvesterState& h,
                                       double p_dc_w) {
    m.validate();
    frame.validate(m.subcarrier_hz);
    if (h.phase != Phase::running)
        throw std::invalid_argument("transmit_frame_backscatter: harvester not RUNNING");

    FrameResult out;
    out.detection = backscatter_detect(m, p_tx_dbm, depth_cm);
    out.harvester = h;

    const double duration = frame.duration_s();
    if (duration > 0.0) {
        const double consumed_before = h.ledger.consumed_j;
        const double p_harvest = m.duty * p_dc_w;
        double remaining = duration;
        while (remaining > 0.0) {
            const double dt = remaining > 1e-6 ? 1e-6 : remaining;
            out.harvester = step(out.harvester, dt, p_harvest, kIdleRunningLoads);
            remaining -= dt;
        }
        out.detection.energy_spent_j = out.harvester.ledger.consumed_j - consumed_before;
    }
    out.detection.delivered_bits = out.detection.detected ? frame.bits : 0;
    return out;
}

FrameResult transmit_frame_galvanic(const GalvanicLinkModel& m,
                                    const Bitstream& frame, double distance_cm,
                                    const HarvesterState& h) {
    m.validate();
    frame.validate();
    if (h.phase != Phase::running)
        throw std::invalid_argument("transmit_frame_galvanic: harvester not RUNNING");

    FrameResult out;
    out.detection = galvanic_rx_detect(m, distance_cm);
    out.harvester = h;

    std::int64_t pulses = 0;
    for (std::int64_t i = 0; i < frame.bits; ++i) {
        const PulseResult pr = galvanic_pulse_budget(out.harvester, m.pulse_energy_j);
        if (!pr.allowed) break;  // partial frame: stop at the first refusal
        out.harvester = pr.state;
        ++pulses;
    }
    // Ledger delta, so the accounting invariant holds bit-for-bit.
    out.detection.energy_spent_j =
        out.harvester.ledger.emitted_galvanic_j - h.ledger.emitted_galvanic_j;
    out.detection.delivered_bits =
        (out.detection.detected && pulses > 0) ? pulses : 0;
    return out;
}

}  // namespace implantsim
