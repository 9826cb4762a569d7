#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "lab/core.hpp"

namespace lab {

// insertion-ordered so that serialized reports are byte-stable
using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

struct Report {
  std::string experiment;
  json config;   // effective configuration (defaults merged with the input)
  json metrics;  // per-trial data and summary statistics
  std::vector<std::string> failures;  // violated thresholds; empty = pass
  std::uint64_t seed = 0;

  bool passed() const { return failures.empty(); }
  json to_json() const;
  std::string text() const;
};

// Merges a user configuration over the defaults; any key absent from the
// defaults is rejected.
json normalize_config(const json& user, const json& defaults,
                      const std::string& experiment);

json parse_json(const std::string& text, const std::string& what);
json load_json_file(const std::string& path);

// Writes <dir>/report.json and <dir>/report.txt, creating dir if needed.
void write_report_files(const Report& r, const std::string& dir);

// [re, im] array <-> complex value
cpx cpx_from_json(const json& v, const std::string& key);
json cpx_to_json(cpx z);

}  // namespace lab
