#include "lab/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace lab {

json Report::to_json() const {
  json out;
  out["experiment"] = experiment;
  out["version"] = kVersion;
  out["seed"] = seed;
  out["passed"] = passed();
  out["failures"] = failures;
  out["config"] = config;
  out["metrics"] = metrics;
  return out;
}

std::string Report::text() const {
  std::ostringstream out;
  out << experiment << " report (version " << kVersion << ", seed " << seed
      << ")\n";
  out << "status: " << (passed() ? "PASS" : "FAIL") << '\n';
  for (const std::string& f : failures) out << "  threshold missed: " << f << '\n';
  out << "\nconfig:\n" << config.dump(2) << '\n';
  out << "\nmetrics:\n" << metrics.dump(2) << '\n';
  return out.str();
}

json normalize_config(const json& user, const json& defaults,
                      const std::string& experiment) {
  require(user.is_object(), experiment + ": config must be a JSON object");
  json out = defaults;
  for (const auto& [key, value] : user.items()) {
    require(defaults.contains(key),
            experiment + ": unknown config key '" + key + "'");
    out[key] = value;
  }
  return out;
}

json parse_json(const std::string& text, const std::string& what) {
  json parsed = json::parse(text, nullptr, false);
  require(!parsed.is_discarded(), what + ": invalid JSON");
  return parsed;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

void write_report_files(const Report& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/report.json");
    require(out.good(), "cannot write " + dir + "/report.json");
    out << r.to_json().dump(2) << '\n';
    require(out.good(), "write to " + dir + "/report.json failed");
  }
  {
    std::ofstream out(dir + "/report.txt");
    require(out.good(), "cannot write " + dir + "/report.txt");
    out << r.text();
    require(out.good(), "write to " + dir + "/report.txt failed");
  }
}

cpx cpx_from_json(const json& v, const std::string& key) {
  require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
          "config key '" + key + "' must be a [re, im] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

json cpx_to_json(cpx z) { return json::array({z.real(), z.imag()}); }

}  // namespace lab
