#include "implantsim/stack.hpp"

#include <stdexcept>

namespace implantsim {

double LayerStack::total_layer_thickness_mm() const {
    double t = 0.0;
    for (const TissueLayer& l : layers) t += l.thickness_mm;
    return t;
}

double LayerStack::depth_range_mm() const {
    return total_layer_thickness_mm() + terminal_extent_mm;
}

void LayerStack::validate() const {
    if (layers.empty()) throw std::invalid_argument("stack: at least one layer required");
    for (const TissueLayer& l : layers) {
        if (l.thickness_mm <= 0.0)
            throw std::invalid_argument("stack: layer thickness must be > 0");
        l.dielectric.validate();
    }
    terminal.validate();
    if (total_layer_thickness_mm() > 500.0)
        throw std::invalid_argument("stack: total thickness exceeds 500 mm sanity bound");
    if (terminal_extent_mm < 0.0)
        throw std::invalid_argument("stack: terminal extent must be >= 0");
}

LayerStack LayerStack::debye_fitted(double f_lo_hz, double f_hi_hz) const {
    auto fitted = [&](const DielectricModel& m, Tissue id) -> DielectricModel {
        if (m.is_debye()) return m;
        // Presets carry a cached fit; custom dielectrics are fitted here.
        if (id != Tissue::custom) {
            const TissuePreset& p = tissue_preset(id);
            if (p.debye.f_lo_hz == f_lo_hz && p.debye.f_hi_hz == f_hi_hz)
                return p.debye.model;
        }
        return fit_debye(m, f_lo_hz, f_hi_hz).model;
    };
    LayerStack out = *this;
    for (TissueLayer& l : out.layers) l.dielectric = fitted(l.dielectric, l.tissue_id);
    out.terminal = fitted(terminal, terminal_id);
    return out;
}

LayerStack muscle_halfspace() {
    const TissuePreset& muscle = tissue_preset(Tissue::muscle);
    LayerStack s;
    s.layers = {{Tissue::muscle, 200.0, muscle.dielectric}};
    s.terminal = muscle.dielectric;
    s.terminal_id = Tissue::muscle;
    return s;
}

LayerStack skin_fat_muscle() {
    LayerStack s;
    s.layers = {{Tissue::skin, 2.0, tissue_preset(Tissue::skin).dielectric},
                {Tissue::fat, 10.0, tissue_preset(Tissue::fat).dielectric}};
    s.terminal = tissue_preset(Tissue::muscle).dielectric;
    s.terminal_id = Tissue::muscle;
    return s;
}

}  // namespace implantsim
