#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "implantsim/fdtd.hpp"
#include "implantsim/units.hpp"

using namespace implantsim;

namespace {

LayerStack vacuum_stack(double extent_mm = 50.0) {
    LayerStack s;
    s.layers = {{Tissue::custom, 100.0, vacuum_dielectric()}};
    s.terminal = vacuum_dielectric();
    s.terminal_extent_mm = extent_mm;
    return s;
}

double max_db_gap(const PropagationResult& a, const PropagationResult& b,
                  double max_depth_mm) {
    REQUIRE(a.dz_mm == b.dz_mm);
    double gap = 0.0;
    const std::size_t n = std::min(a.field.size(), b.field.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<double>(i) * a.dz_mm > max_depth_mm) break;
        gap = std::max(gap, std::abs(amplitude_to_db(std::abs(a.field[i])) -
                                     amplitude_to_db(std::abs(b.field[i]))));
    }
    return gap;
}

}  // namespace

TEST_CASE("gaussian pulse travels at c through vacuum within 0.5%") {
    Fdtd1dConfig cfg;
    // near-single-cycle pulse: the global peak is one unambiguous lobe, so
    // per-probe peak times track the envelope rather than a carrier cycle
    cfg.source = FdtdSource::gaussian_pulse(401e6, 500e6);
    cfg.dx_mm = 0.5;
    const FdtdRun run = fdtd1d_run(vacuum_stack(), cfg);
    const int i1 = 20, i2 = 120;  // 20 mm and 120 mm sample depths
    const double dz = (i2 - i1) * run.result.dz_mm * 1e-3;
    const double v = dz / (run.peak_time_s[i2] - run.peak_time_s[i1]);
    CHECK(std::abs(v - kC0) / kC0 < 0.005);
    // and the pulse does not decay in vacuum
    CHECK(run.peak_amp[i2] / run.peak_amp[i1] == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform lossy medium decays as exp(-alpha d) within 0.1 dB over 10 cm") {
    const LayerStack fitted = muscle_halfspace().debye_fitted(100e6, 700e6);
    Fdtd1dConfig cfg;
    cfg.source = FdtdSource::cw(401e6);
    const FdtdRun run = fdtd1d_run(fitted, cfg);
    const double alpha = propagation_constant(fitted.terminal, 401e6).alpha_np_m;
    for (std::size_t i = 0; i < run.result.field.size(); ++i) {
        const double d_m = static_cast<double>(i) * run.result.dz_mm * 1e-3;
        if (d_m > 0.1) break;
        const double got_db = amplitude_to_db(std::abs(run.result.field[i]));
        const double want_db = -alpha * d_m * kNpToDb;
        CHECK(std::abs(got_db - want_db) < 0.1);
    }
}

TEST_CASE("layered stack at 401 MHz matches the transfer matrix within 0.1 dB") {
    const LayerStack fitted = skin_fat_muscle().debye_fitted(100e6, 700e6);
    Fdtd1dConfig cfg;
    cfg.source = FdtdSource::cw(401e6);
    const FdtdRun run = fdtd1d_run(fitted, cfg);
    const PropagationResult tmm = transfer_matrix_field(fitted, 401e6, run.result.dz_mm);
    CHECK(max_db_gap(run.result, tmm, fitted.depth_range_mm()) < 0.1);
    CHECK(run.final_period_drift < 0.01);
}

TEST_CASE("halving dx moves the 100 mm loss by less than 0.05 dB") {
    const LayerStack fitted = skin_fat_muscle().debye_fitted(100e6, 700e6);
    Fdtd1dConfig cfg;
    cfg.source = FdtdSource::cw(401e6);
    const FdtdRun coarse = fdtd1d_run(fitted, cfg);
    cfg.dx_mm = 0.125;
    const FdtdRun fine = fdtd1d_run(fitted, cfg);
    const int i = static_cast<int>(std::lround(100.0 / coarse.result.dz_mm));
    const double l_coarse = -amplitude_to_db(std::abs(coarse.result.field[i]));
    const double l_fine = -amplitude_to_db(std::abs(fine.result.field[i]));
    CHECK(std::abs(l_coarse - l_fine) < 0.05);
}

TEST_CASE("runs are bitwise deterministic for a fixed config") {
    const LayerStack fitted = muscle_halfspace().debye_fitted(100e6, 700e6);
    Fdtd1dConfig cfg;
    cfg.source = FdtdSource::cw(300e6);
    const FdtdRun a = fdtd1d_run(fitted, cfg);
    const FdtdRun b = fdtd1d_run(fitted, cfg);
    REQUIRE(a.result.field.size() == b.result.field.size());
    for (std::size_t i = 0; i < a.result.field.size(); ++i)
        CHECK(a.result.field[i] == b.result.field[i]);
    CHECK(a.max_abs_field == b.max_abs_field);
}

TEST_CASE("configuration errors are rejected before stepping") {
    const LayerStack stack = skin_fat_muscle();
    Fdtd1dConfig cfg;
    cfg.courant_number = 1.2;
    CHECK_THROWS_AS((void)fdtd1d_run(stack, cfg), std::invalid_argument);
    cfg = Fdtd1dConfig{};
    cfg.dx_mm = 1.0;  // exceeds skin(2 mm)/4
    CHECK_THROWS_AS((void)fdtd1d_run(stack, cfg), std::invalid_argument);
    cfg = Fdtd1dConfig{};
    cfg.total_time_s = 5.0 / 401e6;  // cw needs >= 14 periods
    CHECK_THROWS_AS((void)fdtd1d_run(stack, cfg), std::invalid_argument);
}
