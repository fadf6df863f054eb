#include "implantsim/propagation.hpp"

#include <cmath>
#include <stdexcept>

#include "implantsim/units.hpp"

namespace implantsim {

namespace {

using cd = std::complex<double>;

struct Medium {
    cd eps_c;
    cd k;    // beta - j*alpha, e^{-jkz} convention
    cd eta;  // wave impedance
    double z_start_m = 0.0;
    double thickness_m = 0.0;  // 0 for the semi-infinite terminal
    cd A{0.0, 0.0};            // forward amplitude at z_start
    cd B{0.0, 0.0};            // backward amplitude at z_start
};

struct Solution {
    std::vector<Medium> media;  // [0] vacuum (z<0), then layers, last = terminal
    cd surface_field;           // total E at z=0

    // Total field at depth z (meters, >= 0), unnormalized.
    cd eval(double z_m) const {
        size_t i = 1;
        while (i + 1 < media.size() &&
               z_m > media[i].z_start_m + media[i].thickness_m + 1e-15)
            ++i;
        const Medium& m = media[i];
        const cd ph = cd(0.0, -1.0) * m.k * (z_m - m.z_start_m);
        return m.A * std::exp(ph) + m.B * std::exp(-ph);
    }

    // Time-averaged Poynting flux at depth z.
    double flux(double z_m) const {
        size_t i = 1;
        while (i + 1 < media.size() &&
               z_m > media[i].z_start_m + media[i].thickness_m + 1e-15)
            ++i;
        const Medium& m = media[i];
        const cd ph = cd(0.0, -1.0) * m.k * (z_m - m.z_start_m);
        const cd e = m.A * std::exp(ph) + m.B * std::exp(-ph);
        const cd h = (m.A * std::exp(ph) - m.B * std::exp(-ph)) / m.eta;
        return 0.5 * (e * std::conj(h)).real();
    }
};

Solution solve(const LayerStack& stack, double f_hz) {
    stack.validate();

    Solution s;
    s.media.reserve(stack.layers.size() + 2);

    Medium vac;
    vac.eps_c = cd(1.0, 0.0);
    vac.k = cd(2.0 * M_PI * f_hz / kC0, 0.0);
    vac.eta = cd(kEta0, 0.0);
    vac.z_start_m = 0.0;  // coefficients referenced at the surface
    s.media.push_back(vac);

    double z = 0.0;
    for (const TissueLayer& l : stack.layers) {
        Medium m;
        m.eps_c = complex_permittivity(l.dielectric, f_hz);
        m.k = wavenumber(l.dielectric, f_hz);
        m.eta = kEta0 / std::sqrt(m.eps_c);
        m.z_start_m = z;
        m.thickness_m = l.thickness_mm * 1e-3;
        z += m.thickness_m;
        s.media.push_back(m);
    }
    Medium term;
    term.eps_c = complex_permittivity(stack.terminal, f_hz);
    term.k = wavenumber(stack.terminal, f_hz);
    term.eta = kEta0 / std::sqrt(term.eps_c);
    term.z_start_m = z;
    s.media.push_back(term);

    // Backward recursion from the terminal (transmitted wave only, unit seed).
    s.media.back().A = 1.0;
    s.media.back().B = 0.0;
    for (size_t i = s.media.size() - 1; i-- > 0;) {
        Medium& left = s.media[i];
        const Medium& right = s.media[i + 1];
        const cd h = left.eta / right.eta;
        const cd sum = right.A + right.B;
        const cd dif = h * (right.A - right.B);
        // Amplitudes at the interface (end of the left medium)...
        const cd a_end = 0.5 * (sum + dif);
        const cd b_end = 0.5 * (sum - dif);
        // ...propagated back to the left medium's reference plane.
        const cd ph = cd(0.0, 1.0) * left.k * left.thickness_m;
        left.A = a_end * std::exp(ph);
        left.B = b_end * std::exp(-ph);
    }
    s.surface_field = s.media[1].A + s.media[1].B;
    return s;
}

}  // namespace

double PropagationResult::one_way_loss_db(double depth_mm) const {
    if (field.empty()) throw std::out_of_range("one_way_loss_db: empty field");
    if (depth_mm < 0.0 || depth_mm > max_depth_mm() + 1e-9)
        throw std::out_of_range("one_way_loss_db: depth beyond sampled range");
    const double idx = depth_mm / dz_mm;
    const size_t i0 = std::min(static_cast<size_t>(idx), field.size() - 1);
    const size_t i1 = std::min(i0 + 1, field.size() - 1);
    const double frac = idx - static_cast<double>(i0);
    const double db0 = -amplitude_to_db(std::abs(field[i0]));
    const double db1 = -amplitude_to_db(std::abs(field[i1]));
    return db0 + (db1 - db0) * frac;
}

PropagationResult transfer_matrix_field(const LayerStack& stack, double f_hz,
                                        double dz_mm) {
    if (dz_mm <= 0.0) throw std::invalid_argument("transfer_matrix_field: dz must be > 0");
    const Solution s = solve(stack, f_hz);

    PropagationResult r;
    r.frequency_hz = f_hz;
    const PlaneWaveConstants pc = propagation_constant(stack.terminal, f_hz);
    r.alpha_np_m = pc.alpha_np_m;
    r.beta_rad_m = pc.beta_rad_m;
    r.dz_mm = dz_mm;

    const size_t n = static_cast<size_t>(std::floor(stack.depth_range_mm() / dz_mm)) + 1;
    r.field.resize(n);
    for (size_t i = 0; i < n; ++i)
        r.field[i] = s.eval(i * dz_mm * 1e-3) / s.surface_field;

    const cd a0 = s.media[0].A;
    r.reflection = s.media[0].B / a0;
    r.transmission = 1.0 / a0;  // terminal seed amplitude over incident

    const double s_inc = 0.5 * std::norm(a0) / kEta0;
    r.flux_in = s.flux(0.0) / s_inc;
    r.flux_transmitted = s.flux(s.media.back().z_start_m) / s_inc;

    // Dissipation per layer from the closed-form |E|^2 integral.
    double diss = 0.0;
    const double w = 2.0 * M_PI * f_hz;
    for (size_t i = 1; i + 1 < s.media.size(); ++i) {
        const Medium& m = s.media[i];
        const double eps_im = -m.eps_c.imag();
        if (eps_im <= 0.0) continue;
        const double alpha = -m.k.imag();
        const double beta = m.k.real();
        const double d = m.thickness_m;
        const double i1 = alpha > 0.0 ? (1.0 - std::exp(-2.0 * alpha * d)) / (2.0 * alpha) : d;
        const double i2 = alpha > 0.0 ? (std::exp(2.0 * alpha * d) - 1.0) / (2.0 * alpha) : d;
        const cd i3 = beta != 0.0
                          ? (1.0 - std::exp(cd(0.0, -2.0 * beta * d))) / cd(0.0, 2.0 * beta)
                          : cd(d, 0.0);
        const double integral = std::norm(m.A) * i1 + std::norm(m.B) * i2 +
                                2.0 * (m.A * std::conj(m.B) * i3).real();
        diss += 0.5 * w * kEps0 * eps_im * integral;
    }
    r.flux_dissipated = diss / s_inc;
    return r;
}

std::complex<double> field_at_depth(const LayerStack& stack, double f_hz,
                                    double depth_mm) {
    if (depth_mm < 0.0 || depth_mm > stack.depth_range_mm())
        throw std::out_of_range("field_at_depth: depth outside stack range");
    const Solution s = solve(stack, f_hz);
    return s.eval(depth_mm * 1e-3) / s.surface_field;
}

double loss_at_depth(const LayerStack& stack, double f_hz, double depth_mm) {
    return -amplitude_to_db(std::abs(field_at_depth(stack, f_hz, depth_mm)));
}

std::vector<TmmBlock> transfer_matrix_blocks(const LayerStack& stack, double f_hz) {
    const Solution s = solve(stack, f_hz);
    std::vector<TmmBlock> blocks;
    for (size_t i = 0; i + 1 < s.media.size(); ++i) {
        const cd h = s.media[i].eta / s.media[i + 1].eta;
        TmmBlock iface;
        iface.m00 = 0.5 * (1.0 + h);
        iface.m01 = 0.5 * (1.0 - h);
        iface.m10 = 0.5 * (1.0 - h);
        iface.m11 = 0.5 * (1.0 + h);
        iface.analytic_det = h;
        blocks.push_back(iface);
        if (s.media[i].thickness_m > 0.0 && i > 0) {
            const cd ph = cd(0.0, 1.0) * s.media[i].k * s.media[i].thickness_m;
            TmmBlock prop;
            prop.m00 = std::exp(ph);
            prop.m01 = 0.0;
            prop.m10 = 0.0;
            prop.m11 = std::exp(-ph);
            prop.analytic_det = 1.0;
            blocks.push_back(prop);
        }
    }
    return blocks;
}

}  // namespace implantsim
