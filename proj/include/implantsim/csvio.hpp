// Deterministic text output helpers: every numeric CSV cell is printed with 6
// significant digits so repeated runs are byte-identical, plus the structured
// tissue-preset data file format.

#pragma once

#include <string>
#include <vector>

#include "implantsim/comms.hpp"
#include "implantsim/dielectric.hpp"
#include "implantsim/harvester.hpp"
#include "implantsim/propagation.hpp"

namespace implantsim {

// %.6g formatting; "inf"/"-inf"/"nan" spelled out.
std::string fmt6(double v);

// One CSV row from already-formatted cells.
std::string csv_row(const std::vector<std::string>& cells);

// PropagationResult export: `depth_mm, field_db, phase_rad`.
std::string propagation_csv(const PropagationResult& r);

// Galvanic link sweep: `distance_cm, margin, detected`.
std::string galvanic_sweep_csv(const GalvanicLinkModel& model, double min_cm,
                               double max_cm, double step_cm);

// Harvester state trajectory recorder; rows are
// `t_us, v_cap, phase, p_dc_uw, p_load_uw`.
class HarvesterTrajectory {
  public:
    void record(double t_s, const HarvesterState& s, double p_dc_w, double p_load_w);
    std::string csv() const;
    std::size_t size() const { return rows_.size(); }

  private:
    std::vector<std::string> rows_;
};

// Structured text data file for tissue presets: name, eps_inf, poles
// (delta_eps, tau, alpha), sigma, and the recorded Debye fit residual.
std::string tissue_preset_text(const TissuePreset& p);
void save_tissue_presets(const std::vector<TissuePreset>& presets,
                         const std::string& path);
std::vector<TissuePreset> load_tissue_presets(const std::string& path);

}  // namespace implantsim
