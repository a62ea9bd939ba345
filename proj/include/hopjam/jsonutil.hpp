#pragma once

// Typed JSON field access that reports schema violations as ConfigError.

#include <string>

#include <json.hpp>

#include "hopjam/error.hpp"

namespace hopjam::jsonutil {

template <typename T>
T get_field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get_field<T>(j, key, where);
}

}  // namespace hopjam::jsonutil
