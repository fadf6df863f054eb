#include "implantsim/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "implantsim/units.hpp"

namespace implantsim {

std::string fmt6(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ", ";
        row += cells[i];
    }
    row += "\n";
    return row;
}

std::string propagation_csv(const PropagationResult& r) {
    std::string out = "depth_mm, field_db, phase_rad\n";
    for (std::size_t i = 0; i < r.field.size(); ++i) {
        const double depth = static_cast<double>(i) * r.dz_mm;
        out += csv_row({fmt6(depth), fmt6(amplitude_to_db(std::abs(r.field[i]))),
                        fmt6(std::arg(r.field[i]))});
    }
    return out;
}

std::string galvanic_sweep_csv(const GalvanicLinkModel& model, double min_cm,
                               double max_cm, double step_cm) {
    if (step_cm <= 0.0) throw std::invalid_argument("galvanic sweep: step must be > 0");
    std::string out = "distance_cm, margin, detected\n";
    const int n = static_cast<int>(std::floor((max_cm - min_cm) / step_cm + 1e-9)) + 1;
    for (int k = 0; k < n; ++k) {
        const double d = min_cm + k * step_cm;
        if (d <= 0.0) continue;  // detector model is defined for d > 0
        const DetectionResult det = galvanic_rx_detect(model, d);
        out += csv_row({fmt6(d), fmt6(det.margin), det.detected ? "true" : "false"});
    }
    return out;
}

void HarvesterTrajectory::record(double t_s, const HarvesterState& s, double p_dc_w,
                                 double p_load_w) {
    rows_.push_back(csv_row({fmt6(t_s * 1e6), fmt6(s.cap.voltage_v), phase_name(s.phase),
                             fmt6(p_dc_w * 1e6), fmt6(p_load_w * 1e6)}));
}

std::string HarvesterTrajectory::csv() const {
    std::string out = "t_us, v_cap, phase, p_dc_uw, p_load_uw\n";
    for (const std::string& r : rows_) out += r;
    return out;
}

std::string tissue_preset_text(const TissuePreset& p) {
    std::ostringstream out;
    out << "tissue " << p.name << "\n";
    out << "  eps_inf " << fmt6(p.dielectric.eps_inf) << "\n";
    for (const ColePole& pole : p.dielectric.poles)
        out << "  pole " << fmt6(pole.delta_eps) << " " << fmt6(pole.tau_s) << " "
            << fmt6(pole.alpha) << "\n";
    out << "  sigma " << fmt6(p.dielectric.sigma_ionic) << "\n";
    out << "  debye_fit_max_rel_err " << fmt6(p.debye.max_rel_err) << "\n";
    out << "end\n";
    return out.str();
}

void save_tissue_presets(const std::vector<TissuePreset>& presets,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write tissue presets: " + path);
    out << "# tissue dielectric presets (4-pole Cole-Cole, values dimensionless/"
           "seconds/S per m)\n";
    for (const TissuePreset& p : presets) out << tissue_preset_text(p);
}

std::vector<TissuePreset> load_tissue_presets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tissue presets: " + path);
    std::vector<TissuePreset> out;
    TissuePreset cur;
    bool open = false;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok) || tok[0] == '#') continue;
        if (tok == "tissue") {
            cur = TissuePreset{};
            ss >> cur.name;
            open = true;
        } else if (tok == "eps_inf") {
            ss >> cur.dielectric.eps_inf;
        } else if (tok == "pole") {
            ColePole p{};
            ss >> p.delta_eps >> p.tau_s >> p.alpha;
            cur.dielectric.poles.push_back(p);
        } else if (tok == "sigma") {
            ss >> cur.dielectric.sigma_ionic;
        } else if (tok == "debye_fit_max_rel_err") {
            ss >> cur.debye.max_rel_err;
        } else if (tok == "end") {
            if (!open) throw std::runtime_error("tissue presets: stray 'end' in " + path);
            cur.dielectric.validate();
            out.push_back(cur);
            open = false;
        } else {
            throw std::runtime_error("tissue presets: unknown key '" + tok + "' in " + path);
        }
    }
    if (open) throw std::runtime_error("tissue presets: missing 'end' in " + path);
    return out;
}

}  // namespace implantsim
