#include "lab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path + " for reading");
  return in;
}

void expect_word(std::istream& in, const std::string& word,
                 const std::string& path) {
  std::string got;
  in >> got;
  require(in.good() && got == word,
          path + ": expected '" + word + "', got '" + got + "'");
}

double read_double(std::istream& in, const std::string& path) {
  double v;
  in >> v;
  require(!in.fail(), path + ": malformed number");
  return v;
}

long long read_int(std::istream& in, const std::string& path) {
  long long v;
  in >> v;
  require(!in.fail(), path + ": malformed integer");
  return v;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  require(out.good(), "write to " + path + " failed");
}

// fixed 4-decimal coordinate for SVG output
std::string svg_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v + 0.0);  // avoid negative zero
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_triangulation(const Triangulation& t, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "TRI " << t.vertices.size() << ' ' << t.triangles.size() << '\n';
  for (const Point& v : t.vertices)
    out << "V " << format_double(v.x) << ' ' << format_double(v.y) << '\n';
  for (const auto& tri : t.triangles)
    out << "T " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  finish(out, path);
}

Triangulation read_triangulation(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "TRI", path);
  long long nv = read_int(in, path), nt = read_int(in, path);
  require(nv >= 0 && nt >= 0, path + ": negative counts");
  Triangulation t;
  t.vertices.reserve(nv);
  for (long long i = 0; i < nv; ++i) {
    expect_word(in, "V", path);
    double x = read_double(in, path), y = read_double(in, path);
    t.vertices.push_back(Point{x, y});
  }
  for (long long i = 0; i < nt; ++i) {
    expect_word(in, "T", path);
    int a = static_cast<int>(read_int(in, path));
    int b = static_cast<int>(read_int(in, path));
    int c = static_cast<int>(read_int(in, path));
    require(a >= 0 && b >= 0 && c >= 0 && a < nv && b < nv && c < nv,
            path + ": triangle index out of range");
    t.triangles.push_back({a, b, c});
  }
  compute_connectivity(t);
  return t;
}

void write_pointset(const PointSet& p, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "PTS " << p.pts.size() << '\n';
  for (const Point& q : p.pts)
    out << "P " << format_double(q.x) << ' ' << format_double(q.y) << '\n';
  finish(out, path);
}

PointSet read_pointset(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "PTS", path);
  long long n = read_int(in, path);
  require(n >= 0, path + ": negative count");
  PointSet p;
  p.pts.reserve(n);
  for (long long i = 0; i < n; ++i) {
    expect_word(in, "P", path);
    double x = read_double(in, path), y = read_double(in, path);
    p.pts.push_back(Point{x, y});
  }
  return p;
}

void write_packing(const CirclePacking& p, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "PACK " << p.size() << '\n';
  for (size_t v = 0; v < p.size(); ++v)
    out << "C " << v << ' ' << format_double(p.centers[v].x) << ' '
        << format_double(p.centers[v].y) << ' ' << format_double(p.radii[v])
        << ' ' << (p.is_boundary[v] ? 1 : 0) << '\n';
  out << "MOB " << format_double(p.normalization.a.real()) << ' '
      << format_double(p.normalization.a.imag()) << ' '
      << format_double(p.normalization.theta) << '\n';
  finish(out, path);
}

CirclePacking read_packing(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "PACK", path);
  long long n = read_int(in, path);
  require(n >= 0, path + ": negative count");
  CirclePacking p;
  p.centers.resize(n);
  p.radii.resize(n);
  p.is_boundary.resize(n);
  for (long long v = 0; v < n; ++v) {
    expect_word(in, "C", path);
    long long idx = read_int(in, path);
    require(idx == v, path + ": circles must be listed in index order");
    p.centers[v].x = read_double(in, path);
    p.centers[v].y = read_double(in, path);
    p.radii[v] = read_double(in, path);
    long long b = read_int(in, path);
    require(b == 0 || b == 1, path + ": boundary flag must be 0 or 1");
    p.is_boundary[v] = static_cast<char>(b);
  }
  expect_word(in, "MOB", path);
  double are = read_double(in, path), aim = read_double(in, path);
  p.normalization.a = cpx(are, aim);
  p.normalization.theta = read_double(in, path);
  return p;
}

void write_grid(const GridColoring& g, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "GRID " << g.N << ' ' << format_double(g.r) << ' ' << g.seed << '\n';
  for (int j = -g.N; j <= g.N; ++j) {
    out << 'R';
    int run = 0;
    bool color = false;  // runs alternate, blue first
    for (int i = -g.N; i <= g.N; ++i) {
      bool yellow = g.is_yellow(i, j);
      if (yellow == color) {
        ++run;
      } else {
        out << ' ' << run;
        color = !color;
        run = 1;
      }
    }
    out << ' ' << run << '\n';
  }
  finish(out, path);
}

GridColoring read_grid(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "GRID", path);
  GridColoring g;
  g.N = static_cast<int>(read_int(in, path));
  require(g.N >= 0, path + ": negative grid size");
  g.r = read_double(in, path);
  unsigned long long seed;
  in >> seed;
  require(!in.fail(), path + ": malformed seed");
  g.seed = seed;
  g.delta = 1.0;
  int side = g.side();
  g.yellow.assign(static_cast<size_t>(side) * side, 0);
  for (int j = -g.N; j <= g.N; ++j) {
    expect_word(in, "R", path);
    int i = -g.N;
    bool color = false;
    while (i <= g.N) {
      long long run = read_int(in, path);
      require(run >= 0 && i + run <= g.N + 1, path + ": bad run length");
      if (color)
        for (long long s = 0; s < run; ++s) g.yellow[g.idx(i + s, j)] = 1;
      i += static_cast<int>(run);
      color = !color;
    }
  }
  return g;
}

void write_field(const BeltramiField& f, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "MU " << format_double(f.delta) << ' ' << f.nx << ' ' << f.ny << '\n';
  for (const cpx& m : f.mu)
    out << format_double(m.real()) << ' ' << format_double(m.imag()) << '\n';
  finish(out, path);
}

BeltramiField read_field(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "MU", path);
  BeltramiField f;
  f.delta = read_double(in, path);
  require(f.delta > 0.0, path + ": cell size must be positive");
  f.nx = static_cast<int>(read_int(in, path));
  f.ny = static_cast<int>(read_int(in, path));
  require(f.nx > 0 && f.ny > 0, path + ": empty field");
  f.ix0 = -(f.nx / 2);  // the format stores the window contents only
  f.iy0 = -(f.ny / 2);
  f.mu.resize(static_cast<size_t>(f.nx) * f.ny);
  for (cpx& m : f.mu) {
    double re = read_double(in, path), im = read_double(in, path);
    m = cpx(re, im);
  }
  return f;
}

void write_map(const DiscreteMap& m, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "MAP " << format_double(m.h) << ' ' << m.n << ' ' << m.n << '\n';
  for (const cpx& w : m.w)
    out << format_double(w.real()) << ' ' << format_double(w.imag()) << '\n';
  finish(out, path);
}

DiscreteMap read_map(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "MAP", path);
  DiscreteMap m;
  m.h = read_double(in, path);
  require(m.h > 0.0, path + ": node spacing must be positive");
  long long nx = read_int(in, path), ny = read_int(in, path);
  require(nx > 0 && nx == ny, path + ": map grid must be square");
  m.n = static_cast<int>(nx);
  m.extent = 0.5 * m.h * m.n;  // supercell is centered
  m.w.resize(static_cast<size_t>(m.n) * m.n);
  for (cpx& w : m.w) {
    double re = read_double(in, path), im = read_double(in, path);
    w = cpx(re, im);
  }
  return m;
}

void write_quadrilateral(const Quadrilateral& q, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "QUAD " << q.polygon.size() << '\n';
  for (const Point& v : q.polygon)
    out << "V " << format_double(v.x) << ' ' << format_double(v.y) << '\n';
  for (const Point& v : q.marked)
    out << "M " << format_double(v.x) << ' ' << format_double(v.y) << '\n';
  out << "PAIR " << q.marked_pair << '\n';
  finish(out, path);
}

Quadrilateral read_quadrilateral(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "QUAD", path);
  long long n = read_int(in, path);
  require(n >= 4, path + ": polygon needs at least four vertices");
  Quadrilateral q;
  q.polygon.reserve(n);
  for (long long i = 0; i < n; ++i) {
    expect_word(in, "V", path);
    double x = read_double(in, path), y = read_double(in, path);
    q.polygon.push_back(Point{x, y});
  }
  for (int k = 0; k < 4; ++k) {
    expect_word(in, "M", path);
    double x = read_double(in, path), y = read_double(in, path);
    q.marked[k] = Point{x, y};
  }
  expect_word(in, "PAIR", path);
  long long pair = read_int(in, path);
  require(pair == 0 || pair == 1, path + ": marked pair flag must be 0 or 1");
  q.marked_pair = static_cast<int>(pair);
  return q;
}

void write_metric(const std::vector<double>& rho, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "RHO " << rho.size() << '\n';
  for (double w : rho) out << "W " << format_double(w) << '\n';
  finish(out, path);
}

std::vector<double> read_metric(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_word(in, "RHO", path);
  long long n = read_int(in, path);
  require(n >= 0, path + ": negative count");
  std::vector<double> rho;
  rho.reserve(n);
  for (long long i = 0; i < n; ++i) {
    expect_word(in, "W", path);
    rho.push_back(read_double(in, path));
  }
  return rho;
}

std::string modulus_report_text(const ModulusResult& r) {
  std::ostringstream out;
  out << "value " << format_double(r.value) << '\n'
      << "error " << format_double(r.error) << '\n'
      << "enclosure_low " << format_double(r.lo) << '\n'
      << "enclosure_high " << format_double(r.hi) << '\n'
      << "primal_energy " << format_double(r.primal_energy) << '\n'
      << "dual_energy " << format_double(r.dual_energy) << '\n'
      << "mesh_vertices " << r.mesh_vertices << '\n';
  return out.str();
}

namespace {

struct SvgCanvas {
  std::ofstream out;
  explicit SvgCanvas(const std::string& path, double x, double y, double w,
                     double h)
      : out(open_out(path)) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << svg_num(x)
        << ' ' << svg_num(y) << ' ' << svg_num(w) << ' ' << svg_num(h)
        << "\">\n";
  }
  void close(const std::string& path) {
    out << "</svg>\n";
    finish(out, path);
  }
};

}  // namespace

void render_svg(const Triangulation& t, const std::string& path) {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  if (!t.vertices.empty()) {
    x0 = x1 = t.vertices[0].x;
    y0 = y1 = t.vertices[0].y;
    for (const Point& v : t.vertices) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
  }
  double pad = 0.05 * std::max(x1 - x0, y1 - y0) + 1e-3;
  SvgCanvas svg(path, x0 - pad, -y1 - pad, (x1 - x0) + 2 * pad,
                (y1 - y0) + 2 * pad);
  double width = 0.0015 * std::max(x1 - x0 + 2 * pad, y1 - y0 + 2 * pad);
  for (const auto& [u, v] : t.edges())
    svg.out << "<line x1=\"" << svg_num(t.vertices[u].x) << "\" y1=\""
            << svg_num(-t.vertices[u].y) << "\" x2=\""
            << svg_num(t.vertices[v].x) << "\" y2=\""
            << svg_num(-t.vertices[v].y) << "\" stroke=\"#444444\" "
            << "stroke-width=\"" << svg_num(width) << "\"/>\n";
  svg.close(path);
}

void render_svg(const CirclePacking& p, const std::string& path) {
  SvgCanvas svg(path, -1.1, -1.1, 2.2, 2.2);
  // the unit circle as a path, so circle elements count the packing exactly
  svg.out << "<path d=\"M 1 0 A 1 1 0 1 0 -1 0 A 1 1 0 1 0 1 0 Z\" "
             "fill=\"none\" stroke=\"#000000\" stroke-width=\"0.006\"/>\n";
  for (size_t v = 0; v < p.size(); ++v)
    svg.out << "<circle cx=\"" << svg_num(p.centers[v].x) << "\" cy=\""
            << svg_num(-p.centers[v].y) << "\" r=\"" << svg_num(p.radii[v])
            << "\" fill=\"none\" stroke=\""
            << (p.is_boundary[v] ? "#c0392b" : "#2a6db0")
            << "\" stroke-width=\"0.004\"/>\n";
  svg.close(path);
}

void render_svg(const GridColoring& g, const std::string& path,
                int overlay_m) {
  double d = g.delta;
  double half = (g.N + 0.5) * d;
  SvgCanvas svg(path, -half, -half, 2 * half, 2 * half);
  svg.out << "<rect x=\"" << svg_num(-half) << "\" y=\"" << svg_num(-half)
          << "\" width=\"" << svg_num(2 * half) << "\" height=\""
          << svg_num(2 * half) << "\" fill=\"#dce9f5\"/>\n";
  for (int j = -g.N; j <= g.N; ++j)
    for (int i = -g.N; i <= g.N; ++i)
      if (g.is_yellow(i, j))
        svg.out << "<rect x=\"" << svg_num((i - 0.5) * d) << "\" y=\""
                << svg_num(-(j + 0.5) * d) << "\" width=\"" << svg_num(d)
                << "\" height=\"" << svg_num(d) << "\" fill=\"#e8c23a\"/>\n";
  if (overlay_m > 0) {
    DeepBlueMask mask = deep_blue(g, overlay_m);
    for (int j = -g.N; j <= g.N; ++j)
      for (int i = -g.N; i <= g.N; ++i)
        if (mask.is_deep(i, j))
          svg.out << "<rect x=\"" << svg_num((i - 0.5) * d) << "\" y=\""
                  << svg_num(-(j + 0.5) * d) << "\" width=\"" << svg_num(d)
                  << "\" height=\"" << svg_num(d) << "\" fill=\"#1d4f91\"/>\n";
  }
  svg.close(path);
}

void render_svg(const DiscreteMap& m, const std::string& path) {
  // image of the coordinate grid over the central half of the supercell
  int lo = m.n / 4, hi = 3 * m.n / 4;
  int stride = std::max(1, (hi - lo) / 32);
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool first = true;
  for (int j = lo; j <= hi; ++j)
    for (int i = lo; i <= hi; ++i) {
      cpx w = m.value(i, j);
      if (first) {
        x0 = x1 = w.real();
        y0 = y1 = w.imag();
        first = false;
      }
      x0 = std::min(x0, w.real());
      x1 = std::max(x1, w.real());
      y0 = std::min(y0, w.imag());
      y1 = std::max(y1, w.imag());
    }
  double pad = 0.05 * std::max(x1 - x0, y1 - y0) + 1e-3;
  SvgCanvas svg(path, x0 - pad, -y1 - pad, (x1 - x0) + 2 * pad,
                (y1 - y0) + 2 * pad);
  double width = 0.002 * std::max(x1 - x0 + 2 * pad, y1 - y0 + 2 * pad);
  auto polyline = [&](bool row, int fixed) {
    svg.out << "<polyline fill=\"none\" stroke=\"#2a6db0\" stroke-width=\""
            << svg_num(width) << "\" points=\"";
    for (int s = lo; s <= hi; ++s) {
      cpx w = row ? m.value(s, fixed) : m.value(fixed, s);
      if (s > lo) svg.out << ' ';
      svg.out << svg_num(w.real()) << ',' << svg_num(-w.imag());
    }
    svg.out << "\"/>\n";
  };
  for (int j = lo; j <= hi; j += stride) polyline(true, j);
  for (int i = lo; i <= hi; i += stride) polyline(false, i);
  svg.close(path);
}

}  // namespace lab
