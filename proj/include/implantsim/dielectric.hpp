// Dispersive dielectric models for body tissues: Cole-Cole evaluation,
// plane-wave propagation constants, and the Debye approximation used by the
// time-domain solver.
//
// The shipped skin/fat/muscle presets use the Gabriel 4-pole Cole-Cole
// parameterization. Their evaluated values have been cross-checked against
// the publicly tabulated tissue properties at 400 MHz before freezing
// (muscle 57.1 / 0.80 S/m, fat 5.58 / 0.041 S/m, skin 46.8 / 0.69 S/m).

#pragma once

#include <complex>
#include <string>
#include <vector>

namespace implantsim {

struct ColePole {
    double delta_eps = 0.0;  // dispersion magnitude, dimensionless
    double tau_s = 1e-9;     // relaxation time, seconds
    double alpha = 0.0;      // broadening exponent in [0,1); 0 = pure Debye
};

struct DielectricModel {
    double eps_inf = 1.0;
    std::vector<ColePole> poles;
    double sigma_ionic = 0.0;  // S/m

    bool is_debye() const;   // true when every pole has alpha == 0
    void validate() const;   // throws std::invalid_argument on bad parameters
};

DielectricModel vacuum_dielectric();
// Lossless non-dispersive medium (eps_inf only); handy for test stacks.
DielectricModel constant_dielectric(double eps_r, double sigma = 0.0);

// Relative complex permittivity eps' - j*eps'' at f, including the
// sigma/(omega*eps0) ionic term. f must lie in [1 MHz, 10 GHz].
std::complex<double> complex_permittivity(const DielectricModel& model, double f_hz);

// Equivalent total conductivity omega*eps0*eps'' at f, S/m.
double equivalent_conductivity(const DielectricModel& model, double f_hz);

struct PlaneWaveConstants {
    double alpha_np_m = 0.0;  // attenuation, Np/m
    double beta_rad_m = 0.0;  // phase, rad/m
};

// Lossy-medium plane-wave constants from the complex relative permittivity.
// gamma = alpha + j*beta with gamma^2 = -omega^2*mu0*eps0*eps_c.
PlaneWaveConstants propagation_constant(std::complex<double> eps_c, double f_hz);

// Convenience: constants of a dielectric model at f.
PlaneWaveConstants propagation_constant(const DielectricModel& model, double f_hz);

// Complex wavenumber k = beta - j*alpha (e^{-jkz} convention).
std::complex<double> wavenumber(const DielectricModel& model, double f_hz);

// Complex wave impedance eta0/sqrt(eps_c).
std::complex<double> wave_impedance(const DielectricModel& model, double f_hz);

// --- Debye approximation for the time-domain solver ------------------------

struct DebyeFit {
    DielectricModel model;      // eps_inf + 2 Debye poles + sigma
    double max_rel_err = 0.0;   // max |eps_fit-eps|/|eps| over the fit band
    double f_lo_hz = 0.0;
    double f_hi_hz = 0.0;
};

// Fits eps_inf + de1/(1+jwt1) + de2/(1+jwt2) + sigma/(jw*eps0) to the source
// model over [f_lo, f_hi] (grid search over tau pairs, linear least squares in
// the remaining parameters, relative weighting). Deterministic.
DebyeFit fit_debye(const DielectricModel& source, double f_lo_hz, double f_hi_hz);

// --- Tissue presets ---------------------------------------------------------

enum class Tissue { skin, fat, muscle, custom };

std::string tissue_name(Tissue t);

struct TissuePreset {
    std::string name;
    Tissue kind = Tissue::custom;
    DielectricModel dielectric;
    DebyeFit debye;  // fitted over 100-700 MHz; max_rel_err is the recorded residual
};

// Shipped presets (skin dry, fat not infiltrated, muscle). The Debye fit is
// computed once per process and cached.
const TissuePreset& tissue_preset(Tissue t);

}  // namespace implantsim
