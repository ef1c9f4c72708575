#include "patmine/pipeline_config.hpp"

#include <stdexcept>

#include "patmine/error.hpp"
#include "patmine/io_util.hpp"

namespace patmine {
namespace {

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
  PipelineConfig cfg;
  std::size_t lineno = 0;
  for (const auto& raw : read_lines(path)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) +
                       ": expected key = value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string PipelineConfig::get(const std::string& key,
                                const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long PipelineConfig::get_int(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw UsageError("config key " + key + " is not an integer: " +
                     it->second);
  }
}

double PipelineConfig::get_real(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw UsageError("config key " + key + " is not a number: " + it->second);
  }
}

bool PipelineConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") {
    return true;
  }
  if (it->second == "false" || it->second == "0" || it->second == "no") {
    return false;
  }
  throw UsageError("config key " + key + " is not a boolean: " + it->second);
}

std::uint64_t PipelineConfig::get_seed(std::uint64_t fallback) const {
  const auto it = values_.find("seed");
  if (it == values_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw UsageError("config key seed is not an integer: " + it->second);
  }
}

}  // namespace patmine
