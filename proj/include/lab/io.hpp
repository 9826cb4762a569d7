#pragma once

#include <string>
#include <vector>

#include "lab/beltrami.hpp"
#include "lab/modulus.hpp"
#include "lab/packing.hpp"
#include "lab/percolation.hpp"
#include "lab/pointset.hpp"
#include "lab/triangulation.hpp"

namespace lab {

// 17 significant digits: the printed decimal reads back to the same double.
std::string format_double(double v);

void write_triangulation(const Triangulation& t, const std::string& path);
Triangulation read_triangulation(const std::string& path);

void write_pointset(const PointSet& p, const std::string& path);
PointSet read_pointset(const std::string& path);

// Circles plus the recorded normalization.  Combinatorics are not part of
// the format, so the reader returns a packing with empty triangle data.
void write_packing(const CirclePacking& p, const std::string& path);
CirclePacking read_packing(const std::string& path);

// Run-length encoded rows, bottom row (j = -N) first; each row alternates
// blue/yellow run lengths starting with blue (leading 0 = row starts yellow).
void write_grid(const GridColoring& g, const std::string& path);
GridColoring read_grid(const std::string& path);  // cell size defaults to 1

// Cell window contents only; the reader centers the window at the origin and
// uses a zero exterior coefficient.
void write_field(const BeltramiField& f, const std::string& path);
BeltramiField read_field(const std::string& path);

void write_map(const DiscreteMap& m, const std::string& path);
DiscreteMap read_map(const std::string& path);

void write_quadrilateral(const Quadrilateral& q, const std::string& path);
Quadrilateral read_quadrilateral(const std::string& path);

void write_metric(const std::vector<double>& rho, const std::string& path);
std::vector<double> read_metric(const std::string& path);

// Key-value text block for a modulus computation.
std::string modulus_report_text(const ModulusResult& r);

// Deterministic SVG pictures (fixed precision, no timestamps).
void render_svg(const Triangulation& t, const std::string& path);
void render_svg(const CirclePacking& p, const std::string& path);
// Deep-blue cells are overlaid when overlay_m > 0.
void render_svg(const GridColoring& g, const std::string& path,
                int overlay_m = 0);
void render_svg(const DiscreteMap& m, const std::string& path);

}  // namespace lab
