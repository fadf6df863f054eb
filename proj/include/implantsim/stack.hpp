// Layered tissue geometry: ordered layers over a semi-infinite terminal medium.

#pragma once

#include <vector>

#include "implantsim/dielectric.hpp"

namespace implantsim {

struct TissueLayer {
    Tissue tissue_id = Tissue::custom;
    double thickness_mm = 1.0;
    DielectricModel dielectric;
};

struct LayerStack {
    std::vector<TissueLayer> layers;  // outermost first
    DielectricModel terminal;         // semi-infinite backing medium
    Tissue terminal_id = Tissue::custom;
    // How far into the terminal medium depth queries and field sampling extend.
    double terminal_extent_mm = 150.0;

    double total_layer_thickness_mm() const;
    double depth_range_mm() const;  // layers + terminal extent
    void validate() const;          // throws std::invalid_argument

    // Same geometry with every dispersive dielectric replaced by its Debye fit
    // over [f_lo, f_hi]; dielectrics that are already Debye pass through.
    LayerStack debye_fitted(double f_lo_hz, double f_hi_hz) const;
};

// Muscle layer (200 mm) over muscle terminal: a uniform half-space, the
// phantom-equivalent geometry used for link-budget calibration.
LayerStack muscle_halfspace();

// Skin 2 mm / fat 10 mm / muscle terminal. Default layered geometry; the
// thicknesses are configuration, not measured values.
LayerStack skin_fat_muscle();

}  // namespace implantsim
