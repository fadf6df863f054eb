// Channel and detection models for the two uplinks: bi-static RF backscatter
// with a MEMS-subcarrier (linear-in-dB depth law, threshold detection on the
// subcarrier sideband) and galvanic impulse with a threshold detector.
//
// Frame-level abstraction: a frame is delivered in full or not at all for
// backscatter; galvanic frames can be cut short by the capacitor budget.
// A BER-vs-SNR hook can replace the threshold rule later.

#pragma once

#include <cstdint>

#include "implantsim/harvester.hpp"

namespace implantsim {

struct BackscatterLinkModel {
    double slope_db_per_cm = 2.9;
    double anchor_depth_cm = 8.5;   // detection margin is 0 here at anchor TX
    double anchor_tx_dbm = 23.0;
    double noise_floor_dbm = -100.0;
    double detection_snr_db = 10.0;
    double subcarrier_hz = 100e3;
    double duty = 0.5;  // harvest one data cycle, reflect the other
    double reader_isolation_db = -25.0;

    double threshold_dbm() const { return noise_floor_dbm + detection_snr_db; }
    // Calibrated relative intercept: P_rx = P_tx + intercept_rel - slope*d.
    double intercept_rel_db() const {
        return threshold_dbm() - anchor_tx_dbm + slope_db_per_cm * anchor_depth_cm;
    }
    // Subcarrier power at the reader at depth 0 for the calibration TX power.
    double intercept_p0_dbm() const { return anchor_tx_dbm + intercept_rel_db(); }
    void validate() const;
};

struct GalvanicLinkModel {
    double decay_exponent = 3.0;  // amplitude ~ 1/d^n (quasi-static dipole)
    double max_range_cm = 5.0;    // detection boundary, the calibration anchor
    double amplitude_scale = 1.0;  // received amplitude at 1 cm, arbitrary units
    double pulse_energy_j = 0.0;   // 0 = one hysteresis-band discharge (set by make)

    double amplitude_at(double distance_cm) const;
    double detector_threshold() const;  // amplitude at max_range_cm
    void validate() const;

    static GalvanicLinkModel make(double pulse_energy_j, double max_range_cm = 5.0,
                                  double decay_exponent = 3.0);
};

struct Bitstream {
    std::int64_t bits = 0;
    double rate_bps = 0.0;

    double duration_s() const { return bits == 0 ? 0.0 : bits / rate_bps; }
    // Throws std::invalid_argument on rate <= 0 or, for backscatter, a rate
    // above subcarrier/2.
    void validate(double subcarrier_hz = 0.0) const;
};

struct DetectionResult {
    bool detected = false;
    double margin = 0.0;  // dB for backscatter, detector-amplitude units for galvanic
    double p_rx_dbm = 0.0;              // backscatter only
    double self_interference_dbm = 0.0;  // carrier leak at the reader, backscatter only
    std::int64_t delivered_bits = 0;
    double energy_spent_j = 0.0;
};

// Subcarrier sideband power at the reader.
double backscatter_rx_dbm(const BackscatterLinkModel& m, double p_tx_dbm,
                          double depth_cm);
// Margin over the detection threshold, grouped so the calibration anchor is
// exactly 0.
double backscatter_margin_db(const BackscatterLinkModel& m, double p_tx_dbm,
                             double depth_cm);
DetectionResult backscatter_detect(const BackscatterLinkModel& m, double p_tx_dbm,
                                   double depth_cm);

DetectionResult galvanic_rx_detect(const GalvanicLinkModel& m, double distance_cm);

struct FrameResult {
    DetectionResult detection;
    HarvesterState harvester;
};

// Transmits a backscatter frame: all-or-nothing delivery by link detection;
// the harvester advances with oscillator + switch active and harvesting
// scaled by the duty cycle (p_dc_w is the DC power available outside frames).
// Throws std::invalid_argument if the harvester is not RUNNING.
FrameResult transmit_frame_backscatter(const BackscatterLinkModel& m,
                                       const Bitstream& frame, double p_tx_dbm,
                                       double depth_cm, const HarvesterState& h,
                                       double p_dc_w);

// Transmits a galvanic frame: one capacitor pulse per bit, halting when the
// budget disallows a pulse; delivered iff the receiver at distance_cm detects
// and at least one pulse went out.
FrameResult transmit_frame_galvanic(const GalvanicLinkModel& m,
                                    const Bitstream& frame, double distance_cm,
                                    const HarvesterState& h);

}  // namespace implantsim
