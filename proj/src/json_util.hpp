#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "fraudbench/error.hpp"

namespace fraudbench::detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& context,
                                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(context.empty() ? item.key() : context + "." + item.key(),
                        "unknown key");
    }
  }
}

inline const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline const json& require(const json& obj, const std::string& context,
                           const std::string& key) {
  const json* v = find(obj, key);
  if (!v) {
    throw ConfigError(context.empty() ? key : context + "." + key, "missing key");
  }
  return *v;
}

template <typename T>
T get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<T>();
}

inline std::int64_t get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t get_uint(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned())) {
    throw ConfigError(field, "expected an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

inline bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field, "expected a boolean");
  return v.get<bool>();
}

inline std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

inline json parse_or_throw(const std::string& text, const std::string& what) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) throw SchemaError(what + ": invalid JSON");
  return parsed;
}

}  // namespace fraudbench::detail
