#include "lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lab/beltrami.hpp"
#include "lab/io.hpp"
#include "lab/modulus.hpp"
#include "lab/parallel.hpp"
#include "lab/percolation.hpp"
#include "lab/plmap.hpp"
#include "lab/stats.hpp"

namespace lab {

namespace {

json dvec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::uint64_t seed_of(const json& cfg) {
  return cfg.at("seed").get<std::uint64_t>();
}

Point point_of(const json& v, const std::string& key) {
  cpx z = cpx_from_json(v, key);
  return Point{z.real(), z.imag()};
}

DilatationLaw law_from_config(const json& cfg) {
  std::string kind = cfg.at("law").get<std::string>();
  if (kind == "point_mass")
    return DilatationLaw::point_mass(cpx_from_json(cfg.at("mu"), "mu"));
  if (kind == "two_point")
    return DilatationLaw::two_point(cpx_from_json(cfg.at("mu1"), "mu1"),
                                    cpx_from_json(cfg.at("mu2"), "mu2"),
                                    cfg.at("prob").get<double>());
  if (kind == "uniform_disk")
    return DilatationLaw::uniform_disk(cfg.at("k_max").get<double>());
  throw std::runtime_error("unknown law '" + kind + "'");
}

int nearest_interior_vertex(const Triangulation& t, Point z) {
  int best = -1;
  double bd = 0.0;
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    if (t.is_boundary[v]) continue;
    double d = dist2(t.vertices[v], z);
    if (best < 0 || d < bd) {
      best = static_cast<int>(v);
      bd = d;
    }
  }
  require(best >= 0, "triangulation has no interior vertex");
  return best;
}

int nearest_vertex_excluding(const Triangulation& t, Point z, int skip) {
  int best = -1;
  double bd = 0.0;
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    if (static_cast<int>(v) == skip) continue;
    double d = dist2(t.vertices[v], z);
    if (best < 0 || d < bd) {
      best = static_cast<int>(v);
      bd = d;
    }
  }
  require(best >= 0, "triangulation needs a second vertex");
  return best;
}

// automorphism of the unit disk sending z1 to 0 and z2 to (0,1)
Mobius disk_automorphism(Point z1, Point z2) {
  cpx a{z1.x, z1.y}, w{z2.x, z2.y};
  cpx base = (w - a) / (1.0 - std::conj(a) * w);
  require(std::abs(base) > 1e-12, "normalization points must be distinct");
  Mobius m;
  m.a = a;
  m.theta = -std::arg(base);
  return m;
}

struct DiskTrial {
  PointSet pts;       // raw sample (sampling box)
  Triangulation tri;  // clipped to the unit disk
  CirclePacking packing;
  int retries = 0;
};

// Poisson sample on a box around the disk, Delaunay, clip to the disk, pack,
// normalize at the vertices nearest z1 (interior) and z2.  A failed attempt
// (non-disk clip, degenerate sample) is retried with a fresh derived seed.
DiskTrial packed_disk_trial(double intensity, double margin, Point z1,
                            Point z2, double tol, bool accelerate,
                            std::uint64_t trial_seed, int max_retries) {
  Domain disk = Domain::disk(Point{0.0, 0.0}, 1.0);
  double b = 1.0 + margin;
  Domain box = Domain::rectangle(Point{-b, -b}, Point{b, b});
  std::string last = "no attempt made";
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    try {
      PointSet pts =
          sample_poisson(box, intensity, derive_seed(trial_seed, attempt));
      Triangulation full = delaunay(pts);
      ClipResult clip = clip_to_domain(full, disk);
      require(clip.is_disk, "clipped complex is not a disk");
      PackOptions opt;
      opt.tolerance = tol;
      opt.accelerate = accelerate;
      CirclePacking packing = max_circle_packing(clip.tri, opt);
      int v1 = nearest_interior_vertex(clip.tri, z1);
      int v2 = nearest_vertex_excluding(clip.tri, z2, v1);
      DiskTrial out;
      out.packing = normalize_packing(packing, v1, v2);
      out.pts = std::move(pts);
      out.tri = std::move(clip.tri);
      out.retries = attempt;
      return out;
    } catch (const std::exception& e) {
      last = e.what();
    }
  }
  throw std::runtime_error("disk trial failed after retries: " + last);
}

std::vector<Point> disk_grid(double radius, double spacing) {
  require(spacing > 0.0, "grid spacing must be positive");
  std::vector<Point> out;
  int m = static_cast<int>(std::floor(radius / spacing));
  for (int j = -m; j <= m; ++j)
    for (int i = -m; i <= m; ++i) {
      Point p{i * spacing, j * spacing};
      if (norm2(p) <= radius * radius + 1e-15) out.push_back(p);
    }
  return out;
}

// image of the rectangle boundary under f, corners marked, pair 0
Quadrilateral image_quadrilateral(const PLMap& plm, const Rect& rect,
                                  int per_side) {
  auto corners = rect.corners();
  Quadrilateral q;
  q.marked_pair = 0;
  for (int s = 0; s < 4; ++s) {
    Point from = corners[s], to = corners[(s + 1) % 4];
    for (int u = 0; u < per_side; ++u) {
      double frac = static_cast<double>(u) / per_side;
      Point p{from.x + frac * (to.x - from.x), from.y + frac * (to.y - from.y)};
      Point w = plm.eval(p);
      q.polygon.push_back(w);
      if (u == 0) q.marked[s] = w;
    }
  }
  return q;
}

json rqc_defaults() {
  return json{{"law", "two_point"},
              {"mu", json::array({1.0 / 3, 0.0})},
              {"mu1", json::array({1.0 / 3, 0.0})},
              {"mu2", json::array({-1.0 / 3, 0.0})},
              {"prob", 0.5},
              {"k_max", 0.5},
              {"strip_k", 1.0 / 3},
              {"deltas", json::array({0.125, 0.0625, 0.03125})},
              {"trials", 20},
              {"window", 1.0},
              {"domain_half", 5.0},
              {"extent", 4.0},
              {"h", 0.015625},
              {"tolerance", 1e-10},
              {"max_iterations", 2000},
              {"reference", "auto"},
              {"epsilon", 0.05},
              {"max_final_median", 0.05},
              {"require_decreasing", true},
              {"seed", 1}};
}

json delaunay_pack_defaults() {
  return json{{"intensities", json::array({500.0, 2000.0, 8000.0})},
              {"trials", 20},
              {"z1", json::array({0.3, 0.0})},
              {"z2", json::array({-0.2, 0.1})},
              {"window_radius", 0.7},
              {"eval_spacing", 0.02},
              {"sample_margin", 0.1},
              {"decay_factor", 1.5},
              {"max_final_median", 0.08},
              {"pack_tolerance", 1e-12},
              {"accelerate", true},
              {"max_retries", 20},
              {"seed", 1}};
}

json heschramm_defaults() {
  return json{{"intensity", 4000.0},
              {"repetitions", 10},
              {"resamplings", 10},
              {"center", json::array({0.0, 0.0})},
              {"inner_side", 0.3},
              {"outer_side", 0.4},
              {"per_side", 16},
              {"mesh_level", 4},
              {"z1", json::array({0.0, 0.0})},
              {"z2", json::array({0.5, 0.0})},
              {"sample_margin", 0.1},
              {"pack_tolerance", 1e-12},
              {"accelerate", true},
              {"max_retries", 20},
              {"seed", 1}};
}

json coverage_defaults() {
  return json{{"intensities", json::array({2000.0, 8000.0})},
              {"trials", 20},
              {"directions", 64},
              {"min_coverage", 0.9},
              {"success_fraction", 0.9},
              {"require_monotone", true},
              {"z1", json::array({0.0, 0.0})},
              {"z2", json::array({0.5, 0.0})},
              {"sample_margin", 0.1},
              {"pack_tolerance", 1e-12},
              {"accelerate", true},
              {"max_retries", 20},
              {"seed", 1}};
}

json distortion_defaults() {
  return json{{"intensity", 4000.0},
              {"trials", 20},
              {"epsilon", 0.2},
              {"samples", 200},
              {"mesh_level", 4},
              {"sample_radius", 0.85},
              {"cell_constant", 3.0},
              {"max_yellow_fraction", 0.05},
              {"min_finite_fraction", 1.0},
              {"z1", json::array({0.0, 0.0})},
              {"z2", json::array({0.5, 0.0})},
              {"sample_margin", 0.1},
              {"pack_tolerance", 1e-12},
              {"accelerate", true},
              {"max_retries", 20},
              {"seed", 1}};
}

}  // namespace

Report run_rqc_homogenize(const json& user, const std::string& render_dir) {
  json cfg = normalize_config(user, rqc_defaults(), "rqc_homogenize");
  std::string law_name = cfg.at("law").get<std::string>();
  bool strips = law_name == "strips";
  double strip_k = cfg.at("strip_k").get<double>();
  DilatationLaw law =
      strips ? DilatationLaw::point_mass(0.0) : law_from_config(cfg);

  std::uint64_t seed = seed_of(cfg);
  double window = cfg.at("window").get<double>();
  double extent = cfg.at("extent").get<double>();
  double h = cfg.at("h").get<double>();
  double tol = cfg.at("tolerance").get<double>();
  double epsilon = cfg.at("epsilon").get<double>();
  int trials = strips ? 1 : cfg.at("trials").get<int>();
  std::vector<double> deltas = cfg.at("deltas").get<std::vector<double>>();
  require(!deltas.empty(), "rqc_homogenize: need at least one delta");
  require(trials >= 1, "rqc_homogenize: need at least one trial");

  double half = cfg.at("domain_half").get<double>();
  Domain dom = Domain::rectangle(Point{-half, -half}, Point{half, half});
  SolveOptions sopt;
  sopt.extent = extent;
  sopt.max_iterations = cfg.at("max_iterations").get<int>();

  // resolve the reference map the solutions are compared against
  std::string ref_name = cfg.at("reference").get<std::string>();
  if (ref_name == "auto") {
    if (strips)
      ref_name = "strips";
    else if (law_name == "point_mass")
      ref_name = "constant";
    else if (law_name == "two_point" && law.mu2 == -law.mu1 &&
             law.prob == 0.5)
      ref_name = "identity";
    else
      ref_name = "fitted";
  }
  AffineMap fixed_reference;
  if (ref_name == "strips")
    fixed_reference = affine_for_constant(strip_k * strip_k);
  else if (ref_name == "constant")
    fixed_reference = affine_for_constant(law.mu1);
  else
    require(ref_name == "identity" || ref_name == "fitted",
            "rqc_homogenize: unknown reference '" + ref_name + "'");

  Report rep;
  rep.experiment = "rqc_homogenize";
  rep.config = cfg;
  rep.seed = seed;

  json per_delta = json::array();
  std::vector<double> medians;
  double worst_residual = 0.0;
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    double delta = deltas[di];
    std::vector<DiscreteMap> maps(trials);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      BeltramiField field =
          strips ? strips_field(delta, strip_k, extent + 1.0)
                 : sample_field(law, delta, dom, cpx(0.0, 0.0),
                                derive_seed(seed, di * 1000003 + t));
      maps[t] = solve_beltrami(field, h, tol, sopt);
    });

    AffineMap reference = fixed_reference;
    if (ref_name == "fitted") {
      cpx sa = 0.0, sb = 0.0, sc = 0.0;
      for (const DiscreteMap& m : maps) {
        AffineMap f = fit_affine(m, window).map;
        sa += f.a;
        sb += f.b;
        sc += f.c;
      }
      reference.a = sa / static_cast<double>(trials);
      reference.b = sb / static_cast<double>(trials);
      reference.c = sc / static_cast<double>(trials);
    }

    std::vector<double> dists(trials);
    int close = 0;
    for (int t = 0; t < trials; ++t) {
      dists[t] = sup_distance(maps[t], reference, window);
      if (dists[t] <= epsilon) ++close;
      worst_residual = std::max(worst_residual, maps[t].residual);
    }
    double med = median(dists);
    medians.push_back(med);
    json entry;
    entry["delta"] = delta;
    entry["reference"] = ref_name;
    entry["distances"] = dvec(dists);
    entry["median"] = med;
    entry["close_fraction"] =
        static_cast<double>(close) / static_cast<double>(trials);
    per_delta.push_back(entry);

    if (!render_dir.empty() && di + 1 == deltas.size()) {
      std::filesystem::create_directories(render_dir);
      render_svg(maps[0], render_dir + "/map.svg");
    }
  }
  rep.metrics["per_delta"] = per_delta;
  rep.metrics["medians"] = dvec(medians);
  rep.metrics["worst_residual"] = worst_residual;

  if (cfg.at("require_decreasing").get<bool>())
    for (std::size_t i = 0; i + 1 < medians.size(); ++i)
      if (!(medians[i + 1] < medians[i]))
        rep.failures.push_back(
            "median sup-distance did not decrease from delta=" +
            format_double(deltas[i]) + " to delta=" +
            format_double(deltas[i + 1]));
  double max_final = cfg.at("max_final_median").get<double>();
  if (medians.back() > max_final)
    rep.failures.push_back("final median " + format_double(medians.back()) +
                           " exceeds max_final_median " +
                           format_double(max_final));
  if (worst_residual > 10.0 * tol)
    rep.failures.push_back("solver residual " + format_double(worst_residual) +
                           " exceeds 10x tolerance");
  return rep;
}

Report run_delaunay_pack(const json& user, const std::string& render_dir) {
  json cfg = normalize_config(user, delaunay_pack_defaults(), "delaunay_pack");
  std::uint64_t seed = seed_of(cfg);
  std::vector<double> intensities =
      cfg.at("intensities").get<std::vector<double>>();
  require(!intensities.empty(), "delaunay_pack: need at least one intensity");
  int trials = cfg.at("trials").get<int>();
  require(trials >= 1, "delaunay_pack: need at least one trial");
  Point z1 = point_of(cfg.at("z1"), "z1");
  Point z2 = point_of(cfg.at("z2"), "z2");
  double radius = cfg.at("window_radius").get<double>();
  double margin = cfg.at("sample_margin").get<double>();
  double tol = cfg.at("pack_tolerance").get<double>();
  bool accelerate = cfg.at("accelerate").get<bool>();
  int max_retries = cfg.at("max_retries").get<int>();
  require(norm(z1) < 1.0 && norm(z2) < 1.0,
          "normalization points must lie inside the disk");

  std::vector<Point> grid =
      disk_grid(radius, cfg.at("eval_spacing").get<double>());
  Mobius phi = disk_automorphism(z1, z2);

  Report rep;
  rep.experiment = "delaunay_pack";
  rep.config = cfg;
  rep.seed = seed;

  json per_intensity = json::array();
  std::vector<double> medians;
  for (std::size_t li = 0; li < intensities.size(); ++li) {
    double lambda = intensities[li];
    std::vector<double> dists(trials);
    std::vector<double> retries(trials);
    std::vector<double> missed(trials);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      DiskTrial trial = packed_disk_trial(
          lambda, margin, z1, z2, tol, accelerate,
          derive_seed(seed, li * 1000003 + t), max_retries);
      PLMap plm = packing_map(trial.tri, trial.packing);
      double sup = 0.0;
      int miss = 0;
      for (const Point& q : grid) {
        if (plm.locate(q) < 0) {
          ++miss;
          continue;
        }
        Point w = plm.eval(q);
        cpx ref = phi.apply(cpx(q.x, q.y));
        sup = std::max(sup, std::hypot(w.x - ref.real(), w.y - ref.imag()));
      }
      dists[t] = sup;
      retries[t] = trial.retries;
      missed[t] = miss;
      if (!render_dir.empty() && li + 1 == intensities.size() && t == 0) {
        std::filesystem::create_directories(render_dir);
        render_svg(trial.tri, render_dir + "/triangulation.svg");
        render_svg(trial.packing, render_dir + "/packing.svg");
      }
    });
    double med = median(dists);
    medians.push_back(med);
    json entry;
    entry["intensity"] = lambda;
    entry["distances"] = dvec(dists);
    entry["median"] = med;
    entry["retries"] = dvec(retries);
    entry["missed_eval_points"] = dvec(missed);
    per_intensity.push_back(entry);
  }
  rep.metrics["per_intensity"] = per_intensity;
  rep.metrics["medians"] = dvec(medians);

  double decay = cfg.at("decay_factor").get<double>();
  if (medians.size() >= 2 && !(medians.front() >= decay * medians.back()))
    rep.failures.push_back(
        "median sup error decayed by " +
        format_double(medians.back() > 0 ? medians.front() / medians.back()
                                         : std::numeric_limits<double>::infinity()) +
        ", required factor " + format_double(decay));
  double max_final = cfg.at("max_final_median").get<double>();
  if (medians.back() > max_final)
    rep.failures.push_back("final median " + format_double(medians.back()) +
                           " exceeds max_final_median " +
                           format_double(max_final));
  return rep;
}

Report run_heschramm_locality(const json& user, const std::string& render_dir) {
  json cfg = normalize_config(user, heschramm_defaults(), "heschramm_locality");
  std::uint64_t seed = seed_of(cfg);
  double lambda = cfg.at("intensity").get<double>();
  int reps = cfg.at("repetitions").get<int>();
  int resamples = cfg.at("resamplings").get<int>();
  require(reps >= 1 && resamples >= 2,
          "heschramm_locality: need repetitions >= 1 and resamplings >= 2");
  Point center = point_of(cfg.at("center"), "center");
  double inner = cfg.at("inner_side").get<double>();
  double outer = cfg.at("outer_side").get<double>();
  require(inner > 0.0 && inner < outer,
          "inner square must sit strictly inside the outer square");
  int per_side = cfg.at("per_side").get<int>();
  int mesh_level = cfg.at("mesh_level").get<int>();
  Point z1 = point_of(cfg.at("z1"), "z1");
  Point z2 = point_of(cfg.at("z2"), "z2");
  double margin = cfg.at("sample_margin").get<double>();
  double tol = cfg.at("pack_tolerance").get<double>();
  bool accelerate = cfg.at("accelerate").get<bool>();
  int max_retries = cfg.at("max_retries").get<int>();

  Rect inner_sq{center, inner / 2, inner / 2, 0.0};
  Rect outer_sq{center, outer / 2, outer / 2, 0.0};
  Domain disk = Domain::disk(Point{0.0, 0.0}, 1.0);
  double b = 1.0 + margin;
  Domain box = Domain::rectangle(Point{-b, -b}, Point{b, b});

  // frozen interior points, one draw per repetition
  std::vector<std::vector<Point>> frozen(reps);
  for (int rep = 0; rep < reps; ++rep) {
    PointSet base =
        sample_poisson(box, lambda, derive_seed(derive_seed(seed, rep), 0));
    for (const Point& p : base.pts)
      if (outer_sq.contains(p)) frozen[rep].push_back(p);
  }

  // task ordering: repetition-major, locality tasks then full-resampling ones
  int per_rep = 2 * resamples;
  std::vector<double> moduli(static_cast<std::size_t>(reps) * per_rep, 0.0);
  std::vector<double> task_retries(moduli.size(), 0.0);
  parallel_for(moduli.size(), [&](std::size_t task) {
    int rep = static_cast<int>(task) / per_rep;
    int slot = static_cast<int>(task) % per_rep;
    bool locality = slot < resamples;
    int r = locality ? slot : slot - resamples;
    std::uint64_t rep_seed = derive_seed(seed, rep);
    std::uint64_t task_seed =
        derive_seed(rep_seed, locality ? 100 + r : 50000 + r);
    std::string last = "no attempt made";
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
      try {
        PointSet draw =
            sample_poisson(box, lambda, derive_seed(task_seed, attempt));
        PointSet pts;
        if (locality) {
          pts.pts = frozen[rep];
          for (const Point& p : draw.pts)
            if (!outer_sq.contains(p)) pts.pts.push_back(p);
        } else {
          pts = std::move(draw);
        }
        Triangulation full = delaunay(pts);
        ClipResult clip = clip_to_domain(full, disk);
        require(clip.is_disk, "clipped complex is not a disk");
        PackOptions opt;
        opt.tolerance = tol;
        opt.accelerate = accelerate;
        CirclePacking packing = max_circle_packing(clip.tri, opt);
        int v1 = nearest_interior_vertex(clip.tri, z1);
        int v2 = nearest_vertex_excluding(clip.tri, z2, v1);
        CirclePacking normalized = normalize_packing(packing, v1, v2);
        PLMap plm = packing_map(clip.tri, normalized);
        Quadrilateral q = image_quadrilateral(plm, inner_sq, per_side);
        moduli[task] = modulus_quadrilateral(q, mesh_level).value;
        task_retries[task] = attempt;
        if (!render_dir.empty() && task == 0) {
          std::filesystem::create_directories(render_dir);
          render_svg(normalized, render_dir + "/packing.svg");
        }
        return;
      } catch (const std::exception& e) {
        last = e.what();
      }
    }
    throw std::runtime_error("locality task failed after retries: " + last);
  });

  Report rep_out;
  rep_out.experiment = "heschramm_locality";
  rep_out.config = cfg;
  rep_out.seed = seed;

  std::vector<double> locality_spreads(reps), full_spreads(reps);
  json per_rep_json = json::array();
  for (int rep = 0; rep < reps; ++rep) {
    auto begin = moduli.begin() + static_cast<std::ptrdiff_t>(rep) * per_rep;
    std::vector<double> loc(begin, begin + resamples);
    std::vector<double> full(begin + resamples, begin + per_rep);
    locality_spreads[rep] =
        *std::max_element(loc.begin(), loc.end()) -
        *std::min_element(loc.begin(), loc.end());
    full_spreads[rep] = *std::max_element(full.begin(), full.end()) -
                        *std::min_element(full.begin(), full.end());
    json entry;
    entry["locality_moduli"] = dvec(loc);
    entry["full_moduli"] = dvec(full);
    entry["locality_spread"] = locality_spreads[rep];
    entry["full_spread"] = full_spreads[rep];
    per_rep_json.push_back(entry);
  }
  double med_loc = median(locality_spreads);
  double med_full = median(full_spreads);
  rep_out.metrics["per_repetition"] = per_rep_json;
  rep_out.metrics["median_locality_spread"] = med_loc;
  rep_out.metrics["median_full_spread"] = med_full;
  rep_out.metrics["retries"] = dvec(task_retries);
  if (!(med_loc < med_full))
    rep_out.failures.push_back(
        "locality spread " + format_double(med_loc) +
        " is not smaller than the full-resampling spread " +
        format_double(med_full));
  return rep_out;
}

double coverage_radius(const Triangulation& tri, const CirclePacking& pack,
                       int directions) {
  require(directions >= 3, "need at least three direction samples");
  require(tri.vertices.size() == pack.size(),
          "packing does not match the triangulation");
  std::vector<int> cycle = tri.boundary_cycle();
  require(cycle.size() >= 3, "boundary cycle too short");
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) {
    double th = 2.0 * std::numbers::pi * k / directions;
    Point u{std::cos(th), std::sin(th)};
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < cycle.size(); ++s) {
      Point a = pack.centers[cycle[s]];
      Point b = pack.centers[cycle[(s + 1) % cycle.size()]];
      d = std::min(d, point_segment_dist(u, a, b));
    }
    worst = std::max(worst, d);
  }
  return 1.0 - worst;
}

Report run_boundary_coverage(const json& user, const std::string& render_dir) {
  json cfg = normalize_config(user, coverage_defaults(), "boundary_coverage");
  std::uint64_t seed = seed_of(cfg);
  std::vector<double> intensities =
      cfg.at("intensities").get<std::vector<double>>();
  require(!intensities.empty(),
          "boundary_coverage: need at least one intensity");
  int trials = cfg.at("trials").get<int>();
  require(trials >= 1, "boundary_coverage: need at least one trial");
  int directions = cfg.at("directions").get<int>();
  Point z1 = point_of(cfg.at("z1"), "z1");
  Point z2 = point_of(cfg.at("z2"), "z2");
  double margin = cfg.at("sample_margin").get<double>();
  double tol = cfg.at("pack_tolerance").get<double>();
  bool accelerate = cfg.at("accelerate").get<bool>();
  int max_retries = cfg.at("max_retries").get<int>();
  double min_cov = cfg.at("min_coverage").get<double>();

  Report rep;
  rep.experiment = "boundary_coverage";
  rep.config = cfg;
  rep.seed = seed;

  json per_intensity = json::array();
  std::vector<double> medians, fractions;
  for (std::size_t li = 0; li < intensities.size(); ++li) {
    double lambda = intensities[li];
    std::vector<double> cov(trials);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      DiskTrial trial = packed_disk_trial(
          lambda, margin, z1, z2, tol, accelerate,
          derive_seed(seed, li * 1000003 + t), max_retries);
      cov[t] = coverage_radius(trial.tri, trial.packing, directions);
      if (!render_dir.empty() && li + 1 == intensities.size() && t == 0) {
        std::filesystem::create_directories(render_dir);
        render_svg(trial.packing, render_dir + "/packing.svg");
      }
    });
    int hits = 0;
    for (double c : cov)
      if (c >= min_cov) ++hits;
    double med = median(cov);
    medians.push_back(med);
    fractions.push_back(static_cast<double>(hits) /
                        static_cast<double>(trials));
    json entry;
    entry["intensity"] = lambda;
    entry["coverage"] = dvec(cov);
    entry["median"] = med;
    entry["success_fraction"] = fractions.back();
    per_intensity.push_back(entry);
  }
  rep.metrics["per_intensity"] = per_intensity;
  rep.metrics["medians"] = dvec(medians);

  double want = cfg.at("success_fraction").get<double>();
  if (fractions.back() < want)
    rep.failures.push_back("coverage success fraction " +
                           format_double(fractions.back()) +
                           " at the largest intensity is below " +
                           format_double(want));
  if (cfg.at("require_monotone").get<bool>())
    for (std::size_t i = 0; i + 1 < medians.size(); ++i)
      if (medians[i + 1] < medians[i])
        rep.failures.push_back(
            "median coverage decreased from intensity " +
            format_double(intensities[i]) + " to " +
            format_double(intensities[i + 1]));
  return rep;
}

Report run_modulus_distortion(const json& user, const std::string& render_dir) {
  json cfg = normalize_config(user, distortion_defaults(), "modulus_distortion");
  std::uint64_t seed = seed_of(cfg);
  double lambda = cfg.at("intensity").get<double>();
  int trials = cfg.at("trials").get<int>();
  require(trials >= 1, "modulus_distortion: need at least one trial");
  double epsilon = cfg.at("epsilon").get<double>();
  int samples = cfg.at("samples").get<int>();
  int mesh_level = cfg.at("mesh_level").get<int>();
  double sample_radius = cfg.at("sample_radius").get<double>();
  double C = cfg.at("cell_constant").get<double>();
  require(C > 0.0, "cell constant must be positive");
  Point z1 = point_of(cfg.at("z1"), "z1");
  Point z2 = point_of(cfg.at("z2"), "z2");
  double margin = cfg.at("sample_margin").get<double>();
  double tol = cfg.at("pack_tolerance").get<double>();
  bool accelerate = cfg.at("accelerate").get<bool>();
  int max_retries = cfg.at("max_retries").get<int>();

  double delta = C / std::sqrt(lambda);
  double cube = C * C * C;

  Report rep;
  rep.experiment = "modulus_distortion";
  rep.config = cfg;
  rep.seed = seed;

  std::vector<double> kvals(trials,
                            std::numeric_limits<double>::infinity());
  std::vector<double> yellow_fracs(trials, 1.0);
  std::vector<int> degenerate(trials, 0);
  Domain sample_dom = Domain::disk(Point{0.0, 0.0}, sample_radius);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    std::uint64_t trial_seed = derive_seed(seed, t);
    DiskTrial trial = packed_disk_trial(lambda, margin, z1, z2, tol,
                                        accelerate, trial_seed, max_retries);
    PLMap plm = packing_map(trial.tri, trial.packing);

    // cell occupancy statistics for the C/sqrt(lambda) grid
    int N = static_cast<int>(std::ceil(1.0 / delta)) + 1;
    int side = 2 * N + 1;
    std::vector<int> counts(static_cast<std::size_t>(side) * side, 0);
    for (const Point& p : trial.pts.pts) {
      int i = static_cast<int>(std::llround(std::floor(p.x / delta + 0.5)));
      int j = static_cast<int>(std::llround(std::floor(p.y / delta + 0.5)));
      if (i < -N || i > N || j < -N || j > N) continue;
      ++counts[static_cast<std::size_t>(j + N) * side + (i + N)];
    }
    long long inside = 0, bad = 0;
    for (int j = -N; j <= N; ++j)
      for (int i = -N; i <= N; ++i) {
        double x0 = (i - 0.5) * delta, x1 = (i + 0.5) * delta;
        double y0 = (j - 0.5) * delta, y1 = (j + 0.5) * delta;
        double far = std::max(x0 * x0, x1 * x1) + std::max(y0 * y0, y1 * y1);
        if (far >= 1.0) continue;  // keep cells compactly inside the disk
        ++inside;
        int cnt = counts[static_cast<std::size_t>(j + N) * side + (i + N)];
        if (cnt < 1 || cnt > cube) ++bad;
      }
    yellow_fracs[t] =
        inside ? static_cast<double>(bad) / static_cast<double>(inside) : 1.0;

    try {
      auto f = [&plm](Point p) { return plm.eval(p); };
      RoughQcResult qc = rough_qc_test(f, sample_dom, epsilon, samples,
                                       derive_seed(trial_seed, 777),
                                       mesh_level);
      kvals[t] = qc.K;
      degenerate[t] = qc.degenerate ? 1 : 0;
    } catch (const std::exception&) {
      degenerate[t] = 1;  // sampled rectangle escaped the carrier
    }

    if (!render_dir.empty() && t == 0) {
      std::filesystem::create_directories(render_dir);
      render_svg(trial.tri, render_dir + "/triangulation.svg");
      GridColoring g;
      g.N = N;
      g.delta = delta;
      g.r = 0.0;
      g.seed = trial_seed;
      g.yellow.assign(static_cast<std::size_t>(side) * side, 0);
      for (int j = -N; j <= N; ++j)
        for (int i = -N; i <= N; ++i) {
          double x0 = (i - 0.5) * delta, x1 = (i + 0.5) * delta;
          double y0 = (j - 0.5) * delta, y1 = (j + 0.5) * delta;
          double far = std::max(x0 * x0, x1 * x1) + std::max(y0 * y0, y1 * y1);
          if (far >= 1.0) continue;
          int cnt = counts[static_cast<std::size_t>(j + N) * side + (i + N)];
          if (cnt < 1 || cnt > cube) g.yellow[g.idx(i, j)] = 1;
        }
      render_svg(g, render_dir + "/valence.svg");
    }
  });

  std::vector<double> finite;
  for (int t = 0; t < trials; ++t)
    if (std::isfinite(kvals[t])) finite.push_back(kvals[t]);
  double finite_fraction =
      static_cast<double>(finite.size()) / static_cast<double>(trials);

  json ks = json::array();
  for (double k : kvals)
    ks.push_back(std::isfinite(k) ? json(k) : json("infinite"));
  rep.metrics["k_values"] = ks;
  rep.metrics["finite_fraction"] = finite_fraction;
  if (!finite.empty()) {
    rep.metrics["k_median"] = median(finite);
    rep.metrics["k_max"] = *std::max_element(finite.begin(), finite.end());
  }
  rep.metrics["yellow_fractions"] = dvec(yellow_fracs);
  rep.metrics["mean_yellow_fraction"] = mean(yellow_fracs);
  rep.metrics["grid_delta"] = delta;

  if (finite_fraction < cfg.at("min_finite_fraction").get<double>())
    rep.failures.push_back("finite distortion fraction " +
                           format_double(finite_fraction) + " is below " +
                           format_double(
                               cfg.at("min_finite_fraction").get<double>()));
  if (mean(yellow_fracs) > cfg.at("max_yellow_fraction").get<double>())
    rep.failures.push_back(
        "mean yellow cell fraction " + format_double(mean(yellow_fracs)) +
        " exceeds " + format_double(cfg.at("max_yellow_fraction").get<double>()));
  return rep;
}

std::vector<std::string> experiment_names() {
  return {"rqc_homogenize", "delaunay_pack", "heschramm_locality",
          "boundary_coverage", "modulus_distortion"};
}

json default_config(const std::string& experiment) {
  if (experiment == "rqc_homogenize") return rqc_defaults();
  if (experiment == "delaunay_pack") return delaunay_pack_defaults();
  if (experiment == "heschramm_locality") return heschramm_defaults();
  if (experiment == "boundary_coverage") return coverage_defaults();
  if (experiment == "modulus_distortion") return distortion_defaults();
  throw std::runtime_error("unknown experiment '" + experiment + "'");
}

Report run_experiment(const std::string& experiment, const json& cfg,
                      const std::string& render_dir) {
  if (experiment == "rqc_homogenize") return run_rqc_homogenize(cfg, render_dir);
  if (experiment == "delaunay_pack") return run_delaunay_pack(cfg, render_dir);
  if (experiment == "heschramm_locality")
    return run_heschramm_locality(cfg, render_dir);
  if (experiment == "boundary_coverage")
    return run_boundary_coverage(cfg, render_dir);
  if (experiment == "modulus_distortion")
    return run_modulus_distortion(cfg, render_dir);
  throw std::runtime_error("unknown experiment '" + experiment + "'");
}

}  // namespace lab
