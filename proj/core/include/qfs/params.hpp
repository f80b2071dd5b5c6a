#pragma once

#include <map>
#include <string>
#include <vector>

namespace qfs {

// Typed view over a scenario's key=value section. Reading validates against
// the declared schema; unknown keys are rejected before dispatch.
class ParamMap {
 public:
  ParamMap() = default;
  explicit ParamMap(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, std::string fallback) const;

  // Throws ConfigError if a key is not in the allowed set.
  void require_known(const std::vector<std::string>& allowed,
                     const std::string& scenario) const;

  const std::map<std::string, std::string>& raw() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct ParamSpec {
  std::string name;
  std::string type;  // "int" | "float" | "bool" | "string"
  std::string default_value;
  std::string help;
};

}  // namespace qfs
