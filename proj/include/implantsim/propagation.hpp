// Closed-form plane-wave propagation through a layer stack at normal
// incidence (transfer matrix method). Serves as the analytic oracle for the
// time-domain solver and as the depth-loss backend of the coupling model.

#pragma once

#include <complex>
#include <vector>

#include "implantsim/stack.hpp"

namespace implantsim {

struct PropagationResult {
    double frequency_hz = 0.0;
    // Plane-wave constants of the terminal medium at this frequency.
    double alpha_np_m = 0.0;
    double beta_rad_m = 0.0;

    // Field amplitude vs depth, normalized to the field at the tissue surface
    // (depth 0), so |field[0]| == 1 and one-way loss at d=0 is 0 dB. Sampled
    // on a uniform grid depth = k * dz_mm.
    double dz_mm = 1.0;
    std::vector<std::complex<double>> field;

    // Reflection looking into the stack from vacuum, and the field amplitude
    // at the terminal interface relative to the incident amplitude.
    std::complex<double> reflection{0.0, 0.0};
    std::complex<double> transmission{0.0, 0.0};

    // Time-averaged flux balance, normalized to unit incident flux:
    // flux_in (entering the stack) = flux_transmitted (into the terminal)
    // + flux_dissipated (absorbed in the layers).
    double flux_in = 0.0;
    double flux_transmitted = 0.0;
    double flux_dissipated = 0.0;

    double max_depth_mm() const { return dz_mm * (field.empty() ? 0 : field.size() - 1); }
    // -20*log10(|field|) interpolated from the sampled grid.
    double one_way_loss_db(double depth_mm) const;
};

// Steady-state field through the stack, incident from vacuum.
PropagationResult transfer_matrix_field(const LayerStack& stack, double f_hz,
                                        double dz_mm = 1.0);

// Exact complex field at a single depth, normalized to the surface field.
std::complex<double> field_at_depth(const LayerStack& stack, double f_hz,
                                    double depth_mm);

// One-way loss -20*log10(|field(depth)|) in dB, exact (no grid).
// Throws std::out_of_range for depth outside [0, stack.depth_range_mm()].
double loss_at_depth(const LayerStack& stack, double f_hz, double depth_mm);

// 2x2 cascade blocks in the forward/backward amplitude basis, exposed for
// the reciprocity check: each block's determinant has a closed-form value.
struct TmmBlock {
    std::complex<double> m00, m01, m10, m11;
    std::complex<double> analytic_det;
    std::complex<double> det() const { return m00 * m11 - m01 * m10; }
};
std::vector<TmmBlock> transfer_matrix_blocks(const LayerStack& stack, double f_hz);

}  // namespace implantsim
