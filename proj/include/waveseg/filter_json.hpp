#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "waveseg/core.hpp"
#include "waveseg/filterbank.hpp"

namespace waveseg {

/// Loads a user-supplied filter bank from JSON:
///   {"name": "...", "h0": [...], "f0": [...], "tolerance": 5e-3}
/// tolerance is optional. The high-pass filters and tap origins are derived
/// as for the built-in pairs and the reconstruction check runs on load.
inline FilterPair load_filter_pair_json(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("h0") || !doc.contains("f0")) {
    throw FormatError(path + ": filter JSON needs h0 and f0 arrays");
  }
  try {
    const std::string name = doc.value("name", std::string("custom"));
    const auto h0 = doc.at("h0").get<std::vector<double>>();
    const auto f0 = doc.at("f0").get<std::vector<double>>();
    const double tol = doc.value("tolerance", 5e-3);
    return make_filter_pair(name, h0, f0, tol);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// Resolves a --filter argument: a built-in name or a path to a JSON bank.
inline FilterPair resolve_filter(const std::string& spec) {
  if (spec == "o1" || spec == "bio1" || spec == "bio2" || spec == "canonical") {
    return builtin_filter_pair(spec);
  }
  if (spec.find('.') != std::string::npos || spec.find('/') != std::string::npos) {
    return load_filter_pair_json(spec);
  }
  throw NameError("unknown filter pair: " + spec);
}

}  // namespace waveseg
