#include "implantsim/dielectric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "implantsim/units.hpp"

namespace implantsim {

bool DielectricModel::is_debye() const {
    return std::all_of(poles.begin(), poles.end(),
                       [](const ColePole& p) { return p.alpha == 0.0; });
}

void DielectricModel::validate() const {
    if (eps_inf < 1.0) throw std::invalid_argument("dielectric: eps_inf must be >= 1");
    if (sigma_ionic < 0.0) throw std::invalid_argument("dielectric: sigma_ionic must be >= 0");
    for (const ColePole& p : poles) {
        if (p.delta_eps < 0.0) throw std::invalid_argument("dielectric: delta_eps must be >= 0");
        if (p.tau_s <= 0.0) throw std::invalid_argument("dielectric: tau must be > 0");
        if (p.alpha < 0.0 || p.alpha >= 1.0)
            throw std::invalid_argument("dielectric: pole alpha must lie in [0,1)");
    }
}

DielectricModel vacuum_dielectric() { return DielectricModel{}; }

DielectricModel constant_dielectric(double eps_r, double sigma) {
    DielectricModel m;
    m.eps_inf = eps_r;
    m.sigma_ionic = sigma;
    return m;
}

std::complex<double> complex_permittivity(const DielectricModel& model, double f_hz) {
    if (f_hz < 1e6 || f_hz > 10e9)
        throw std::out_of_range("complex_permittivity: frequency outside [1 MHz, 10 GHz]");
    const double w = 2.0 * M_PI * f_hz;
    const std::complex<double> jw(0.0, w);
    std::complex<double> eps = model.eps_inf;
    for (const ColePole& p : model.poles) {
        eps += p.delta_eps / (1.0 + std::pow(jw * p.tau_s, 1.0 - p.alpha));
    }
    if (model.sigma_ionic > 0.0) eps += model.sigma_ionic / (jw * kEps0);
    return eps;
}

double equivalent_conductivity(const DielectricModel& model, double f_hz) {
    return -complex_permittivity(model, f_hz).imag() * 2.0 * M_PI * f_hz * kEps0;
}

PlaneWaveConstants propagation_constant(std::complex<double> eps_c, double f_hz) {
    if (eps_c.real() <= 0.0)
        throw std::invalid_argument("propagation_constant: eps_r_real must be > 0");
    const double w = 2.0 * M_PI * f_hz;
    // gamma = j*w*sqrt(mu0*eps0*eps_c); principal sqrt keeps alpha, beta >= 0.
    const std::complex<double> gamma =
        std::complex<double>(0.0, w) * std::sqrt(kMu0 * kEps0) * std::sqrt(eps_c);
    return {gamma.real(), gamma.imag()};
}

PlaneWaveConstants propagation_constant(const DielectricModel& model, double f_hz) {
    return propagation_constant(complex_permittivity(model, f_hz), f_hz);
}

std::complex<double> wavenumber(const DielectricModel& model, double f_hz) {
    const PlaneWaveConstants pc = propagation_constant(model, f_hz);
    return {pc.beta_rad_m, -pc.alpha_np_m};
}

std::complex<double> wave_impedance(const DielectricModel& model, double f_hz) {
    return kEta0 / std::sqrt(complex_permittivity(model, f_hz));
}

// --- Debye fit ---------------------------------------------------------------

namespace {

std::complex<double> debye_eval(double eps_inf, double de1, double t1, double de2,
                                double t2, double sigma, double f_hz) {
    const std::complex<double> jw(0.0, 2.0 * M_PI * f_hz);
    return eps_inf + de1 / (1.0 + jw * t1) + de2 / (1.0 + jw * t2) + sigma / (jw * kEps0);
}

// Solves the 4x4 normal equations A^T A x = A^T b in place. Returns false on a
// singular pivot.
bool solve4(std::array<std::array<double, 4>, 4>& m, std::array<double, 4>& rhs,
            std::array<double, 4>& x) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[col], m[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = col + 1; r < 4; ++r) {
            const double fct = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= fct * m[col][c];
            rhs[r] -= fct * rhs[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < 4; ++c) acc -= m[r][c] * x[c];
        x[r] = acc / m[r][r];
    }
    return true;
}

}  // namespace

DebyeFit fit_debye(const DielectricModel& source, double f_lo_hz, double f_hi_hz) {
    if (!(f_lo_hz > 0.0) || f_hi_hz <= f_lo_hz)
        throw std::invalid_argument("fit_debye: need 0 < f_lo < f_hi");

    constexpr int kNFit = 61;
    std::vector<double> freqs(kNFit);
    std::vector<std::complex<double>> target(kNFit);
    std::vector<double> weight(kNFit);
    for (int i = 0; i < kNFit; ++i) {
        freqs[i] = f_lo_hz + (f_hi_hz - f_lo_hz) * i / (kNFit - 1);
        target[i] = complex_permittivity(source, freqs[i]);
        weight[i] = 1.0 / std::abs(target[i]);
    }

    // Candidate relaxation times, log-spaced around the band.
    constexpr int kNTau = 36;
    std::array<double, kNTau> taus{};
    for (int i = 0; i < kNTau; ++i)
        taus[i] = std::pow(10.0, -11.0 + 3.5 * i / (kNTau - 1));

    double best_err = std::numeric_limits<double>::infinity();
    std::array<double, 4> best_x{};
    double best_t1 = taus[0], best_t2 = taus[0];

    std::vector<std::array<std::complex<double>, 4>> cols(kNFit);
    for (int i1 = 0; i1 < kNTau; ++i1) {
        for (int i2 = i1; i2 < kNTau; ++i2) {
            const double t1 = taus[i1], t2 = taus[i2];
            for (int i = 0; i < kNFit; ++i) {
                const std::complex<double> jw(0.0, 2.0 * M_PI * freqs[i]);
                cols[i] = {std::complex<double>(1.0, 0.0), 1.0 / (1.0 + jw * t1),
                           1.0 / (1.0 + jw * t2), 1.0 / (jw * kEps0)};
            }
            // Weighted least squares over stacked real/imag residuals.
            std::array<std::array<double, 4>, 4> ata{};
            std::array<double, 4> atb{};
            for (int i = 0; i < kNFit; ++i) {
                const double w2 = weight[i] * weight[i];
                for (int a = 0; a < 4; ++a) {
                    for (int b = a; b < 4; ++b) {
                        const double v = w2 * (cols[i][a].real() * cols[i][b].real() +
                                               cols[i][a].imag() * cols[i][b].imag());
                        ata[a][b] += v;
                    }
                    atb[a] += w2 * (cols[i][a].real() * target[i].real() +
                                    cols[i][a].imag() * target[i].imag());
                }
            }
            for (int a = 1; a < 4; ++a)
                for (int b = 0; b < a; ++b) ata[a][b] = ata[b][a];

            std::array<double, 4> x{};
            if (!solve4(ata, atb, x)) continue;
            if (x[0] < 1.0 || x[1] < 0.0 || x[2] < 0.0 || x[3] < 0.0) continue;

            double err = 0.0;
            for (int i = 0; i < kNFit; ++i) {
                const std::complex<double> fit =
                    debye_eval(x[0], x[1], t1, x[2], t2, x[3], freqs[i]);
                err = std::max(err, std::abs(fit - target[i]) * weight[i]);
            }
            if (err < best_err) {
                best_err = err;
                best_x = x;
                best_t1 = t1;
                best_t2 = t2;
            }
        }
    }
    if (!std::isfinite(best_err))
        throw std::runtime_error("fit_debye: no admissible fit found");

    DebyeFit out;
    out.model.eps_inf = best_x[0];
    out.model.poles = {{best_x[1], best_t1, 0.0}, {best_x[2], best_t2, 0.0}};
    out.model.sigma_ionic = best_x[3];
    out.f_lo_hz = f_lo_hz;
    out.f_hi_hz = f_hi_hz;

    // Residual recorded on a finer grid than the fit used.
    double fine_err = 0.0;
    for (int i = 0; i < 301; ++i) {
        const double f = f_lo_hz + (f_hi_hz - f_lo_hz) * i / 300.0;
        const std::complex<double> ref = complex_permittivity(source, f);
        const std::complex<double> fit = complex_permittivity(out.model, f);
        fine_err = std::max(fine_err, std::abs(fit - ref) / std::abs(ref));
    }
    out.max_rel_err = fine_err;
    return out;
}

// --- Presets -----------------------------------------------------------------

std::string tissue_name(Tissue t) {
    switch (t) {
        case Tissue::skin: return "skin";
        case Tissue::fat: return "fat";
        case Tissue::muscle: return "muscle";
        case Tissue::custom: return "custom";
    }
    return "custom";
}

namespace {

// Gabriel 4-Cole-Cole parameters: skin (dry), fat (not infiltrated), muscle.
DielectricModel gabriel_skin() {
    DielectricModel m;
    m.eps_inf = 4.0;
    m.sigma_ionic = 0.0002;
    m.poles = {{32.0, 7.234e-12, 0.00},
               {1100.0, 32.48e-9, 0.20},
               {0.0, 159.15e-6, 0.20},
               {0.0, 15.915e-3, 0.20}};
    return m;
}

DielectricModel gabriel_fat() {
    DielectricModel m;
    m.eps_inf = 2.5;
    m.sigma_ionic = 0.010;
    m.poles = {{3.0, 7.96e-12, 0.20},
               {15.0, 15.92e-9, 0.10},
               {3.3e4, 159.15e-6, 0.05},
               {1.0e7, 7.958e-3, 0.01}};
    return m;
}

DielectricModel gabriel_muscle() {
    DielectricModel m;
    m.eps_inf = 4.0;
    m.sigma_ionic = 0.20;
    m.poles = {{50.0, 7.234e-12, 0.10},
               {7000.0, 353.68e-9, 0.10},
               {1.2e6, 318.31e-6, 0.10},
               {2.5e7, 2.274e-3, 0.00}};
    return m;
}

TissuePreset make_preset(Tissue kind, DielectricModel dielectric) {
    TissuePreset p;
    p.name = tissue_name(kind);
    p.kind = kind;
    p.dielectric = std::move(dielectric);
    p.debye = fit_debye(p.dielectric, 100e6, 700e6);
    return p;
}

}  // namespace

const TissuePreset& tissue_preset(Tissue t) {
    static std::once_flag once;
    static std::array<TissuePreset, 3> presets;
    std::call_once(once, [] {
        presets[0] = make_preset(Tissue::skin, gabriel_skin());
        presets[1] = make_preset(Tissue::fat, gabriel_fat());
        presets[2] = make_preset(Tissue::muscle, gabriel_muscle());
    });
    switch (t) {
        case Tissue::skin: return presets[0];
        case Tissue::fat: return presets[1];
        case Tissue::muscle: return presets[2];
        default: throw std::invalid_argument("tissue_preset: no preset for custom tissue");
    }
}

}  // namespace implantsim
