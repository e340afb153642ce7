#pragma once

#include <string>

#include "ioident/estimate.hpp"

namespace ioident {

// All CSV emitters print doubles with 17 significant digits, so a read-back
// reproduces the values bit for bit.

/// Header `t,u,y,x_<name>...`, one row per grid point.
std::string trajectory_to_csv(const Trajectory& traj, const std::vector<std::string>& state_names);
Trajectory trajectory_from_csv(const std::string& text, std::vector<std::string>* state_names);

/// Header `t,value`; loading enforces a uniform grid (tolerance 1e-9 * h).
std::string sampled_to_csv(const SampledFunction& f);
SampledFunction sampled_from_csv(const std::string& text);

/// Header `t,observation`.
std::string observations_to_csv(const std::vector<double>& times, const std::vector<double>& obs);
void observations_from_csv(const std::string& text, std::vector<double>& times,
                           std::vector<double>& obs);

/// Header `<param>,...,probability`, one row per cell in storage order.
std::string posterior_to_csv(const PosteriorGrid& grid);
PosteriorGrid posterior_from_csv(const std::string& text);

/// JSON model document: states, params (with optional defaults), rhs keyed by
/// state, output, optional x0.
struct LoadedModel {
    GeneralSystem system;
    ParamMap defaults;
};
LoadedModel model_from_json(const std::string& json_text);
std::string model_to_json(const GeneralSystem& sys, const ParamMap& defaults);

/// Plain-text identifiability report: Gram eigenvalue table, rank, null
/// directions and Cramer-Rao bounds (pass nullptr to omit the bounds).
std::string format_ident_report(const GramReport& gram, const CramerRaoReport* crb);

std::string format_fit_report(const FitResult& fit);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ioident
