#pragma once

#include <string>
#include <vector>

#include "lab/packing.hpp"
#include "lab/report.hpp"
#include "lab/triangulation.hpp"

namespace lab {

// Experiment runners.  Each takes a user configuration (validated against
// the experiment's documented keys, defaults merged in), runs the trials
// concurrently with per-trial derived seeds, and returns a Report whose
// pass/fail state reflects exactly the thresholds declared in the config.
// When render_dir is non-empty, representative SVG figures are written there.

Report run_rqc_homogenize(const json& cfg, const std::string& render_dir = "");
Report run_delaunay_pack(const json& cfg, const std::string& render_dir = "");
Report run_heschramm_locality(const json& cfg,
                              const std::string& render_dir = "");
Report run_boundary_coverage(const json& cfg,
                             const std::string& render_dir = "");
Report run_modulus_distortion(const json& cfg,
                              const std::string& render_dir = "");

std::vector<std::string> experiment_names();
json default_config(const std::string& experiment);
Report run_experiment(const std::string& experiment, const json& cfg,
                      const std::string& render_dir = "");

// Largest rho such that the disk B(0, rho) avoids the packed image of the
// carrier boundary: 1 - max over direction samples of the distance from the
// unit circle to the boundary polyline of packed centers.
double coverage_radius(const Triangulation& tri, const CirclePacking& pack,
                       int directions);

}  // namespace lab
