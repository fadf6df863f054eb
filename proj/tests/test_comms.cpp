#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "implantsim/comms.hpp"

using namespace implantsim;

namespace {

HarvesterState running_full() {
    HarvesterState s = HarvesterState::make(StorageCap{}, LoadSpec{});
    s.cap.voltage_v = 1.8;
    s.phase = Phase::running;
    return s;
}

GalvanicLinkModel default_galvanic() {
    return GalvanicLinkModel::make(default_galvanic_pulse_energy_j(StorageCap{}));
}

}  // namespace

TEST_CASE("backscatter calibration: intercept, anchor margin, depth slope") {
    const BackscatterLinkModel m;
    CHECK(m.intercept_rel_db() == doctest::Approx(-88.35).epsilon(1e-12));
    CHECK(m.intercept_p0_dbm() == doctest::Approx(-65.35).epsilon(1e-12));

    CHECK(backscatter_margin_db(m, 23.0, 8.5) == 0.0);  // exact at the anchor
    CHECK(backscatter_rx_dbm(m, 23.0, 8.5) == doctest::Approx(-90.0).epsilon(1e-12));
    CHECK(backscatter_margin_db(m, 23.0, 10.0) == doctest::Approx(-4.35).epsilon(1e-12));

    // 1 cm of depth costs exactly the slope
    const double d1 = backscatter_rx_dbm(m, 23.0, 4.0);
    const double d2 = backscatter_rx_dbm(m, 23.0, 5.0);
    CHECK(d1 - d2 == doctest::Approx(2.9).epsilon(1e-12));
}

TEST_CASE("backscatter detection at the boundary and beyond") {
    const BackscatterLinkModel m;
    const DetectionResult at0 = backscatter_detect(m, 23.0, 0.0);
    CHECK(at0.detected);
    const DetectionResult at85 = backscatter_detect(m, 23.0, 8.5);
    CHECK(at85.detected);
    CHECK(at85.margin == 0.0);
    const DetectionResult at10 = backscatter_detect(m, 23.0, 10.0);
    CHECK_FALSE(at10.detected);
    CHECK(at10.margin == doctest::Approx(-4.35).epsilon(1e-12));
    CHECK(at10.self_interference_dbm == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("backscatter law is linear in depth to 1e-9 dB (randomized)") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> depth(0.0, 20.0);
    std::uniform_real_distribution<double> slope(0.5, 6.0);
    for (int i = 0; i < 5000; ++i) {
        BackscatterLinkModel m;
        m.slope_db_per_cm = slope(rng);
        const double d1 = depth(rng), d2 = depth(rng);
        const double lhs = backscatter_rx_dbm(m, 23.0, d1) - backscatter_rx_dbm(m, 23.0, d2);
        const double rhs = -m.slope_db_per_cm * (d1 - d2);
        CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("detection is monotone: nearer is never worse (randomized)") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> depth(0.0, 20.0);
    std::uniform_real_distribution<double> slope(0.5, 6.0);
    std::uniform_real_distribution<double> snr(3.0, 20.0);
    std::uniform_real_distribution<double> expn(1.0, 4.0);
    std::uniform_real_distribution<double> range(1.0, 10.0);
    for (int i = 0; i < 3000; ++i) {
        BackscatterLinkModel bs;
        bs.slope_db_per_cm = slope(rng);
        bs.detection_snr_db = snr(rng);
        double d1 = depth(rng), d2 = depth(rng);
        if (d1 > d2) std::swap(d1, d2);
        if (backscatter_detect(bs, 23.0, d2).detected)
            CHECK(backscatter_detect(bs, 23.0, d1).detected);

        const GalvanicLinkModel g = GalvanicLinkModel::make(85e-12, range(rng), expn(rng));
        double g1 = 0.1 + depth(rng), g2 = 0.1 + depth(rng);
        if (g1 > g2) std::swap(g1, g2);
        if (galvanic_rx_detect(g, g2).detected) CHECK(galvanic_rx_detect(g, g1).detected);
    }
}

TEST_CASE("galvanic detection boundary sits exactly at the calibrated range") {
    const GalvanicLinkModel m = default_galvanic();
    CHECK(galvanic_rx_detect(m, 4.0).detected);
    const DetectionResult at5 = galvanic_rx_detect(m, 5.0);
    CHECK(at5.detected);
    CHECK(at5.margin == 0.0);
    CHECK_FALSE(galvanic_rx_detect(m, 5.5).detected);
    CHECK_FALSE(galvanic_rx_detect(m, 6.0).detected);
    CHECK_THROWS_AS((void)galvanic_rx_detect(m, 0.0), std::invalid_argument);
}

TEST_CASE("received galvanic amplitude decreases strictly with distance") {
    const GalvanicLinkModel m = default_galvanic();
    double prev = m.amplitude_at(0.5);
    for (double d = 1.0; d < 12.0; d += 0.5) {
        const double a = m.amplitude_at(d);
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("backscatter frame: delivery, duty-scaled harvest, load energy") {
    const BackscatterLinkModel m;
    Bitstream frame{1000, 50e3};  // 20 ms
    const HarvesterState h0 = running_full();
    const double p_dc = 40e-6;

    const FrameResult fr = transmit_frame_backscatter(m, frame, 23.0, 8.0, h0, p_dc);
    CHECK(fr.detection.detected);
    CHECK(fr.detection.delivered_bits == 1000);

    // oscillator + switch for 20 ms
    const double expect_consumed = 3.165e-6 * 0.02;
    const double consumed = fr.harvester.ledger.consumed_j - h0.ledger.consumed_j;
    CHECK(consumed == doctest::Approx(expect_consumed).epsilon(1e-9));
    CHECK(fr.detection.energy_spent_j == consumed);  // ledger delta, exactly
    // switch share of that energy: 165 nW x 20 ms = 3.3 nJ
    CHECK(0.02 * 165e-9 == doctest::Approx(3.3e-9).epsilon(1e-12));

    // average harvested power during the frame = duty x P_dc
    const double harvested = fr.harvester.ledger.harvested_j - h0.ledger.harvested_j;
    CHECK(harvested == doctest::Approx(m.duty * p_dc * 0.02).epsilon(1e-9));
}

TEST_CASE("backscatter frame beyond the boundary spends energy, delivers nothing") {
    const BackscatterLinkModel m;
    Bitstream frame{1000, 50e3};
    const HarvesterState h0 = running_full();
    const FrameResult fr = transmit_frame_backscatter(m, frame, 23.0, 10.0, h0, 40e-6);
    CHECK_FALSE(fr.detection.detected);
    CHECK(fr.detection.delivered_bits == 0);
    CHECK(fr.detection.energy_spent_j > 0.0);
}

TEST_CASE("empty backscatter frame costs nothing and moves nothing") {
    const BackscatterLinkModel m;
    const HarvesterState h0 = running_full();
    const FrameResult fr = transmit_frame_backscatter(m, Bitstream{0, 50e3}, 23.0, 8.0,
                                                      h0, 40e-6);
    CHECK(fr.detection.delivered_bits == 0);
    CHECK(fr.detection.energy_spent_j == 0.0);
    CHECK(fr.harvester.cap.voltage_v == h0.cap.voltage_v);
    CHECK(fr.harvester.ledger.harvested_j == h0.ledger.harvested_j);
}

TEST_CASE("frame preconditions: RUNNING harvester and a rate under subcarrier/2") {
    const BackscatterLinkModel m;
    HarvesterState idle = HarvesterState::make(StorageCap{}, LoadSpec{});
    CHECK_THROWS_AS(
        (void)transmit_frame_backscatter(m, Bitstream{10, 50e3}, 23.0, 8.0, idle, 0.0),
        std::invalid_argument);
    CHECK_THROWS_AS((void)transmit_frame_backscatter(m, Bitstream{10, 60e3}, 23.0, 8.0,
                                                     running_full(), 0.0),
                    std::invalid_argument);
    const Bitstream zero_rate{10, 0.0};
    CHECK_THROWS_AS(zero_rate.validate(), std::invalid_argument);
}

TEST_CASE("galvanic frame: one bit in range discharges one pulse") {
    const GalvanicLinkModel m = default_galvanic();
    const HarvesterState h0 = running_full();
    const FrameResult fr = transmit_frame_galvanic(m, Bitstream{1, 10e3}, 4.0, h0);
    CHECK(fr.detection.detected);
    CHECK(fr.detection.delivered_bits == 1);
    CHECK(fr.harvester.cap.voltage_v == doctest::Approx(1.65).epsilon(1e-9));
    CHECK(fr.detection.energy_spent_j ==
          doctest::Approx(m.pulse_energy_j).epsilon(1e-12));
}

TEST_CASE("galvanic frame halts when the budget is exhausted (oracle count)") {
    const GalvanicLinkModel m = GalvanicLinkModel::make(10e-12);  // 10 pJ pulses
    const HarvesterState h0 = running_full();

    // brute-force oracle: iterate the discharge arithmetic
    double e = h0.cap.energy_j();
    const double floor = StorageCap::energy_at(h0.cap.capacitance_f, 1.65);
    int oracle_pulses = 0;
    while (e - 10e-12 >= floor) {
        e -= 10e-12;
        ++oracle_pulses;
    }
    REQUIRE(oracle_pulses < 100);

    const FrameResult fr = transmit_frame_galvanic(m, Bitstream{100, 10e3}, 4.0, h0);
    CHECK(fr.detection.delivered_bits == oracle_pulses);
    CHECK(fr.detection.energy_spent_j ==
          doctest::Approx(oracle_pulses * 10e-12).epsilon(1e-9));
    CHECK(fr.harvester.cap.voltage_v >= 1.65);
}

TEST_CASE("galvanic frame out of range emits pulses but delivers nothing") {
    const GalvanicLinkModel m = default_galvanic();
    const FrameResult fr = transmit_frame_galvanic(m, Bitstream{1, 10e3}, 6.0,
                                                   running_full());
    CHECK_FALSE(fr.detection.detected);
    CHECK(fr.detection.delivered_bits == 0);
    CHECK(fr.detection.energy_spent_j ==
          doctest::Approx(m.pulse_energy_j).epsilon(1e-12));
}

TEST_CASE("model validation rejects malformed links") {
    BackscatterLinkModel bs;
    bs.slope_db_per_cm = 0.0;
    CHECK_THROWS_AS(bs.validate(), std::invalid_argument);
    bs = BackscatterLinkModel{};
    bs.duty = 1.0;
    CHECK_THROWS_AS(bs.validate(), std::invalid_argument);
    CHECK_THROWS_AS((void)GalvanicLinkModel::make(85e-12, -1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)GalvanicLinkModel::make(85e-12, 5.0, 0.0), std::invalid_argument);
}
