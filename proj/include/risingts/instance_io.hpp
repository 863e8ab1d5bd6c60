#pragma once

#include "risingts/instance.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace risingts {

/// Malformed configuration or instance document (wrong fields, bad
/// parameter values). Distinct from InstanceError, which flags a
/// well-formed document describing an invalid bandit.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

/// {"horizon": T, "arms": [{"family", "params", "law", "law_params"}, ...]}.
/// Linear-capped parameters are written as exact "p/q" strings.
Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& doc);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const Instance& instance);

/// Reads a whole JSON file; ConfigError when missing or unparsable.
Json read_json_file(const std::filesystem::path& path);
/// Writes doc.dump(2) plus a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// 16 hex digits of FNV-1a over the canonical instance document.
std::string instance_hash(const Instance& instance);

/// "p/q" (or "p" when q = 1).
std::string rational_to_string(const Rational& r);
/// Accepts "p/q", "p", or a JSON number.
Rational rational_from_json(const Json& value, const std::string& where);

}  // namespace risingts
