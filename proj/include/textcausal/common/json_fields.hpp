#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/common/errors.hpp"

namespace textcausal::fields {

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <typename T>
const char* expected_name() {
  if constexpr (std::is_same_v<T, bool>) {
    return "a boolean";
  } else if constexpr (std::is_integral_v<T>) {
    return "an integer";
  } else if constexpr (std::is_floating_point_v<T>) {
    return "a number";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return "a string";
  } else {
    return "an array";
  }
}

// Reads j[key] into out when present; a type mismatch names the full path.
template <typename T>
void read(const nlohmann::json& j, const std::string& key, const std::string& path, T& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  bool ok = true;
  if constexpr (std::is_same_v<T, bool>) {
    ok = v.is_boolean();
  } else if constexpr (std::is_unsigned_v<T>) {
    ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  } else if constexpr (std::is_integral_v<T>) {
    ok = v.is_number_integer();
  } else if constexpr (std::is_floating_point_v<T>) {
    ok = v.is_number();
  } else if constexpr (std::is_same_v<T, std::string>) {
    ok = v.is_string();
  } else {
    ok = v.is_array();
  }
  if (!ok) {
    throw ConfigError(join(path, key) + ": expected " + expected_name<T>() + ", got " +
                      std::string(v.type_name()) + " " + v.dump());
  }
  try {
    out = v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(join(path, key) + ": expected " + expected_name<T>() + ", got " + v.dump());
  }
}

// Rejects keys outside `allowed` so typos are not silently ignored.
inline void check_keys(const nlohmann::json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw ConfigError((path.empty() ? std::string("config") : path) + ": expected a table");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError(join(path, item.key()) + ": unknown key");
  }
}

inline const nlohmann::json& section(const nlohmann::json& j, const std::string& key,
                                     const std::string& path) {
  const auto& s = j.at(key);
  if (!s.is_object()) throw ConfigError(join(path, key) + ": expected a table");
  return s;
}

}  // namespace textcausal::fields
