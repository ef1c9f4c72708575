#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace patmine {

// Flat "key = value" configuration with dotted section prefixes
// ("lda.num_topics = 60").  '#' starts a comment.  Command-line flags
// override configuration values; configuration overrides defaults.
class PipelineConfig {
 public:
  PipelineConfig() = default;
  static PipelineConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_real(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::uint64_t get_seed(std::uint64_t fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace patmine
