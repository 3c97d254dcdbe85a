#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "coevo/error.hpp"

namespace coevo::jsonutil {

inline const nlohmann::json& get(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw FormatError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(where + ": missing field '" + key + "'");
    return *it;
}

inline std::string get_string(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto& v = get(obj, key, where);
    if (!v.is_string()) throw FormatError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline const nlohmann::json& get_array(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto& v = get(obj, key, where);
    if (!v.is_array()) throw FormatError(where + ": field '" + key + "' must be an array");
    return v;
}

inline const nlohmann::json& get_object(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto& v = get(obj, key, where);
    if (!v.is_object()) throw FormatError(where + ": field '" + key + "' must be an object");
    return v;
}

inline bool get_bool_or(const nlohmann::json& obj, const char* key, bool fallback, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) throw FormatError(where + ": field '" + key + "' must be a boolean");
    return it->get<bool>();
}

inline std::int64_t get_int_or(const nlohmann::json& obj, const char* key, std::int64_t fallback,
                               const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer()) throw FormatError(where + ": field '" + key + "' must be an integer");
    return it->get<std::int64_t>();
}

}  // namespace coevo::jsonutil
