#include "qfs/params.hpp"

#include <algorithm>
#include <stdexcept>

#include "qfs/errors.hpp"

namespace qfs {

double ParamMap::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("parameter '" + key + "' is not a number: " + it->second);
  }
}

long long ParamMap::get_int(const std::string& key, long long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("parameter '" + key + "' is not an integer: " + it->second);
  }
}

bool ParamMap::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("parameter '" + key + "' is not a boolean: " + it->second);
}

std::string ParamMap::get_string(const std::string& key, std::string fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

void ParamMap::require_known(const std::vector<std::string>& allowed,
                             const std::string& scenario) const {
  for (const auto& [key, value] : kv_) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown parameter '" + key + "' for scenario " + scenario);
  }
}

}  // namespace qfs
