#include "implantsim/fdtd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "implantsim/units.hpp"

namespace implantsim {

FdtdSource FdtdSource::cw(double f_hz) {
    FdtdSource s;
    s.kind = Kind::cw;
    s.frequency_hz = f_hz;
    return s;
}

FdtdSource FdtdSource::gaussian_pulse(double center_hz, double bandwidth_hz) {
    FdtdSource s;
    s.kind = Kind::gaussian_pulse;
    s.center_freq_hz = center_hz;
    s.bandwidth_hz = bandwidth_hz;
    return s;
}

namespace {

constexpr double kFitLoHz = 100e6;
constexpr double kFitHiHz = 700e6;

double source_freq(const FdtdSource& s) {
    return s.kind == FdtdSource::Kind::cw ? s.frequency_hz : s.center_freq_hz;
}

// Material coefficients for the semi-implicit ADE update:
//   E' = (cb*E - sum_k pk_c[k]*P_k + curl) / ca
//   P_k' = p1[k]*P_k + p2[k]*(E' + E)
struct Material {
    double ca = 0.0, cb = 0.0;
    int n_poles = 0;
    double p1[4] = {0.0, 0.0, 0.0, 0.0};
    double p2[4] = {0.0, 0.0, 0.0, 0.0};
    double pk_c[4] = {0.0, 0.0, 0.0, 0.0};  // (p1-1)/dt
};

Material make_material(const DielectricModel& m, double dt) {
    Material mat;
    double sum_c2_over_dt = 0.0;
    for (const ColePole& p : m.poles) {
        if (p.delta_eps == 0.0) continue;
        if (mat.n_poles >= 4)
            throw std::invalid_argument("fdtd: at most 4 Debye poles per medium");
        const double denom = 2.0 * p.tau_s + dt;
        const double c1 = (2.0 * p.tau_s - dt) / denom;
        const double c2 = kEps0 * p.delta_eps * dt / denom;
        mat.p1[mat.n_poles] = c1;
        mat.p2[mat.n_poles] = c2;
        mat.pk_c[mat.n_poles] = (c1 - 1.0) / dt;
        sum_c2_over_dt += c2 / dt;
        ++mat.n_poles;
    }
    mat.ca = kEps0 * m.eps_inf / dt + sum_c2_over_dt + m.sigma_ionic / 2.0;
    mat.cb = kEps0 * m.eps_inf / dt - sum_c2_over_dt - m.sigma_ionic / 2.0;
    return mat;
}

DielectricModel average_media(const DielectricModel& a, const DielectricModel& b) {
    DielectricModel m;
    m.eps_inf = 0.5 * (a.eps_inf + b.eps_inf);
    m.sigma_ionic = 0.5 * (a.sigma_ionic + b.sigma_ionic);
    for (const ColePole& p : a.poles)
        if (p.delta_eps > 0.0) m.poles.push_back({0.5 * p.delta_eps, p.tau_s, 0.0});
    for (const ColePole& p : b.poles)
        if (p.delta_eps > 0.0) m.poles.push_back({0.5 * p.delta_eps, p.tau_s, 0.0});
    return m;
}

}  // namespace

void Fdtd1dConfig::validate(const LayerStack& stack) const {
    stack.validate();
    if (dx_mm <= 0.0) throw std::invalid_argument("fdtd: dx must be > 0");
    if (courant_number <= 0.0 || courant_number > 1.0)
        throw std::invalid_argument("fdtd: courant_number must lie in (0, 1]");
    if (boundary_padding_mm < 10.0)
        throw std::invalid_argument("fdtd: boundary padding must be >= 10 mm");
    if (sample_dz_mm < dx_mm)
        throw std::invalid_argument("fdtd: sample spacing must be >= dx");

    double min_thickness = std::numeric_limits<double>::infinity();
    double max_eps_real = 1.0;
    const double f = source_freq(source);
    for (const TissueLayer& l : stack.layers) {
        min_thickness = std::min(min_thickness, l.thickness_mm);
        max_eps_real = std::max(max_eps_real, complex_permittivity(l.dielectric, f).real());
    }
    max_eps_real = std::max(max_eps_real, complex_permittivity(stack.terminal, f).real());
    const double min_wavelength_mm = kC0 / (f * std::sqrt(max_eps_real)) * 1e3;
    const double bound = std::min(min_thickness / 4.0, min_wavelength_mm / 20.0);
    if (dx_mm > bound + 1e-12)
        throw std::invalid_argument("fdtd: dx exceeds min(layer/4, wavelength/20) = " +
                                    std::to_string(bound) + " mm");
}

FdtdRun fdtd1d_run(const LayerStack& raw_stack, const Fdtd1dConfig& cfg) {
    cfg.validate(raw_stack);
    const LayerStack stack = raw_stack.debye_fitted(kFitLoHz, kFitHiHz);

    const double dx = cfg.dx_mm * 1e-3;
    const double dt = cfg.courant_number * dx / kC0;
    const double f0 = source_freq(cfg.source);
    const bool cw = cfg.source.kind == FdtdSource::Kind::cw;

    // Grid layout: [left ABC pad | TFSF plane | vacuum gap | layers | terminal
    // extent | ABC padding]. All interfaces land on E nodes where possible.
    const int pad_cells = static_cast<int>(std::lround(5e-3 / dx));
    const int i_src = pad_cells;
    const int i_surf = i_src + pad_cells;
    const double layers_mm = stack.total_layer_thickness_mm();
    // In a lossy terminal the one-way Mur boundary is imperfect; grow the
    // padding until the echo path absorbs >= 4.5 Np (39 dB) round trip.
    double padding_mm = cfg.boundary_padding_mm;
    {
        const double alpha_t = propagation_constant(stack.terminal, f0).alpha_np_m;
        if (alpha_t > 1e-6)
            padding_mm = std::max(padding_mm, 4.5 / (2.0 * alpha_t) * 1e3);
    }
    const double tissue_mm = layers_mm + stack.terminal_extent_mm + padding_mm;
    const int tissue_cells = static_cast<int>(std::ceil(tissue_mm * 1e-3 / dx));
    const int n = i_surf + tissue_cells + 1;

    // Per-node material assignment; nodes exactly on an interface take the
    // average of the adjacent media (keeps the scheme second-order there).
    std::vector<double> boundaries_m;  // cumulative layer end depths
    {
        double acc = 0.0;
        for (const TissueLayer& l : stack.layers) {
            acc += l.thickness_mm * 1e-3;
            boundaries_m.push_back(acc);
        }
    }
    auto medium_at = [&](double depth_m) -> const DielectricModel& {
        double acc = 0.0;
        for (const TissueLayer& l : stack.layers) {
            acc += l.thickness_mm * 1e-3;
            if (depth_m < acc) return l.dielectric;
        }
        return stack.terminal;
    };
    const DielectricModel vacuum = vacuum_dielectric();

    std::vector<Material> materials;
    std::vector<int> mat_of(n, 0);
    materials.push_back(make_material(vacuum, dt));
    for (int i = 0; i < n; ++i) {
        const double depth = (i - i_surf) * dx;
        const double tol = dx * 1e-6;
        DielectricModel m;
        if (std::abs(depth) < tol) {
            m = average_media(vacuum, medium_at(tol));
        } else if (depth < 0.0) {
            continue;  // vacuum, index 0
        } else {
            bool on_boundary = false;
            for (double b : boundaries_m) {
                if (std::abs(depth - b) < tol) {
                    m = average_media(medium_at(b - tol), medium_at(b + tol));
                    on_boundary = true;
                    break;
                }
            }
            if (!on_boundary) m = medium_at(depth);
        }
        materials.push_back(make_material(m, dt));
        mat_of[i] = static_cast<int>(materials.size()) - 1;
    }

    // Sample grid: depths k * sample_dz up to the stack's declared range,
    // snapped to E nodes.
    const int stride = static_cast<int>(std::lround(cfg.sample_dz_mm / cfg.dx_mm));
    const double dz_mm = stride * cfg.dx_mm;
    const int n_samples =
        static_cast<int>(std::floor(stack.depth_range_mm() / dz_mm)) + 1;
    std::vector<int> sample_node(n_samples);
    for (int k = 0; k < n_samples; ++k) sample_node[k] = i_surf + k * stride;

    // Source waveform and run length.
    const double period = 1.0 / f0;
    const double sigma_t = cw ? 0.0 : 1.0 / (M_PI * cfg.source.bandwidth_hz);
    const double t0 = cw ? 0.0 : 4.0 * sigma_t;
    double eps_max = 1.0;
    for (const TissueLayer& l : stack.layers)
        eps_max = std::max(eps_max, complex_permittivity(l.dielectric, f0).real());
    eps_max = std::max(eps_max, complex_permittivity(stack.terminal, f0).real());
    const double travel = n * dx * std::sqrt(eps_max) / kC0;
    double total_time = cfg.total_time_s;
    if (total_time <= 0.0) {
        total_time = cw ? std::max(10.0 * period, 3.0 * travel) + 4.0 * period
                        : t0 + 2.0 * travel + 6.0 * sigma_t;
    } else if (cw && total_time < 14.0 * period) {
        throw std::invalid_argument("fdtd: cw total_time must cover >= 14 source periods");
    }
    const long steps = static_cast<long>(std::ceil(total_time / dt));
    const double t_measure = steps * dt - 4.0 * period;  // final 4 periods
    const double w0 = 2.0 * M_PI * f0;

    auto waveform = [&](double t) -> double {
        if (cw) {
            // Smooth turn-on over the first 3 periods tames the ramp transient.
            const double ramp = t < 3.0 * period ? t / (3.0 * period) : 1.0;
            return ramp * ramp * (3.0 - 2.0 * ramp) * std::sin(w0 * t);
        }
        const double u = t - t0;
        return std::sin(2.0 * M_PI * cfg.source.center_freq_hz * u) *
               std::exp(-0.5 * u * u / (sigma_t * sigma_t));
    };

    // Mur-1 boundary coefficients; the right side uses the terminal medium's
    // phase velocity at the source frequency.
    const double v_right = w0 / propagation_constant(stack.terminal, f0).beta_rad_m;
    const double cf_l = (kC0 * dt - dx) / (kC0 * dt + dx);
    const double cf_r = (v_right * dt - dx) / (v_right * dt + dx);

    std::vector<double> e(n, 0.0), h(n - 1, 0.0);
    std::array<std::vector<double>, 4> pol;  // ADE polarization states per pole slot
    for (auto& v : pol) v.assign(n, 0.0);

    // Measurement accumulators.
    std::vector<double> peak(n_samples, 0.0);          // final 4 periods (cw) / whole run (pulse)
    std::vector<double> acc_i(n_samples, 0.0), acc_q(n_samples, 0.0);
    std::vector<double> peak_time(n_samples, 0.0);
    std::vector<double> period_peak(n_samples, 0.0), prev_period_peak(n_samples, 0.0);
    long period_index_prev = -1;
    double max_abs = 0.0;

    const double ch = dt / (kMu0 * dx);
    for (long step = 0; step < steps; ++step) {
        const double t_e = (step + 1) * dt;  // time level of E after this step

        for (int i = 0; i < n - 1; ++i) h[i] -= ch * (e[i + 1] - e[i]);
        // TFSF corrections: unidirectional launch toward +z at i_src.
        const double e_inc = waveform(step * dt);
        h[i_src - 1] += ch * e_inc;

        const double e0_prev = e[1], eN_prev = e[n - 2];
        for (int i = 1; i < n - 1; ++i) {
            const Material& m = materials[mat_of[i]];
            double curl = -(h[i] - h[i - 1]) / dx;
            if (i == i_src)
                curl += waveform(step * dt + 0.5 * dt + 0.5 * dx / kC0) / (kEta0 * dx);
            double poles = 0.0;
            for (int k = 0; k < m.n_poles; ++k) poles += m.pk_c[k] * pol[k][i];
            const double e_new = (m.cb * e[i] - poles + curl) / m.ca;
            for (int k = 0; k < m.n_poles; ++k)
                pol[k][i] = m.p1[k] * pol[k][i] + m.p2[k] * (e_new + e[i]);
            e[i] = e_new;
        }
        e[0] = e0_prev + cf_l * (e[1] - e[0]);
        e[n - 1] = eN_prev + cf_r * (e[n - 2] - e[n - 1]);

        for (int k = 0; k < n_samples; ++k) {
            const double a = std::abs(e[sample_node[k]]);
            max_abs = std::max(max_abs, a);
            if (cw) {
                if (t_e >= t_measure) {
                    const double val = e[sample_node[k]];
                    if (a > peak[k]) peak[k] = a;
                    acc_i[k] += val * std::cos(w0 * t_e) * dt;
                    acc_q[k] += val * std::sin(w0 * t_e) * dt;
                }
            } else if (a > peak[k]) {
                peak[k] = a;
                peak_time[k] = t_e;
            }
        }
        if (cw) {
            // Per-period peaks of the last two source periods, for the drift check.
            const long pidx = static_cast<long>((steps * dt - t_e) / period);
            if (pidx <= 1) {
                if (pidx != period_index_prev) {
                    if (period_index_prev == 1) prev_period_peak = period_peak;
                    std::fill(period_peak.begin(), period_peak.end(), 0.0);
                    period_index_prev = pidx;
                }
                for (int k = 0; k < n_samples; ++k)
                    period_peak[k] = std::max(period_peak[k], std::abs(e[sample_node[k]]));
            }
        }
    }

    FdtdRun run;
    run.steps = steps;
    run.dt_s = dt;
    run.max_abs_field = max_abs;

    double drift = 0.0;
    if (cw) {
        for (int k = 0; k < n_samples; ++k) {
            const double hi = std::max(period_peak[k], prev_period_peak[k]);
            if (hi > 1e-12)
                drift = std::max(drift, std::abs(period_peak[k] - prev_period_peak[k]) / hi);
        }
        run.final_period_drift = drift;
        if (drift > 0.01)
            throw std::runtime_error("fdtd: steady state not converged (amplitude drift " +
                                     std::to_string(drift * 100.0) + "% between final periods)");
    }

    PropagationResult& r = run.result;
    r.frequency_hz = f0;
    const PlaneWaveConstants pc = propagation_constant(stack.terminal, f0);
    r.alpha_np_m = pc.alpha_np_m;
    r.beta_rad_m = pc.beta_rad_m;
    r.dz_mm = dz_mm;
    r.field.resize(n_samples);
    if (cw) {
        const double ref_amp = peak[0];
        const double ref_phase = std::atan2(-acc_q[0], acc_i[0]);
        for (int k = 0; k < n_samples; ++k) {
            const double phase = std::atan2(-acc_q[k], acc_i[k]) - ref_phase;
            r.field[k] = std::polar(peak[k] / ref_amp, phase);
        }
    } else {
        for (int k = 0; k < n_samples; ++k)
            r.field[k] = peak[0] > 0.0 ? peak[k] / peak[0] : 0.0;
        run.peak_time_s = peak_time;
        run.peak_amp = peak;
    }
    return run;
}

}  // namespace implantsim
