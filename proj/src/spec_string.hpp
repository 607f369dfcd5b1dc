#pragma once

// Parser for `head:key=value,key=value` identifiers shared by densities and shape generators.

#include <cerrno>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>

#include "aniflow/errors.hpp"

namespace aniflow::detail {

struct SpecString {
  std::string head;
  std::map<std::string, std::string> params;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidArgument("empty value for '" + what + "'");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    throw InvalidArgument("cannot parse '" + t + "' as a number for '" + what + "'");
  return v;
}

inline SpecString parse_spec_string(std::string_view spec) {
  SpecString out;
  const auto colon = spec.find(':');
  out.head = trim(spec.substr(0, colon));
  if (out.head.empty()) throw InvalidArgument("empty identifier in '" + std::string(spec) + "'");
  if (colon == std::string_view::npos) return out;
  std::string_view rest = spec.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("expected key=value, got '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    if (out.params.count(key)) throw InvalidArgument("duplicate key '" + key + "'");
    out.params[key] = trim(item.substr(eq + 1));
  }
  return out;
}

inline void require_keys(const SpecString& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : s.params) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidArgument("unknown parameter '" + key + "' for '" + s.head + "'");
  }
}

inline double get_or(const SpecString& s, const std::string& key, double fallback) {
  const auto it = s.params.find(key);
  return it == s.params.end() ? fallback : parse_real(it->second, key);
}

inline std::string get_or(const SpecString& s, const std::string& key, const std::string& fallback) {
  const auto it = s.params.find(key);
  return it == s.params.end() ? fallback : it->second;
}

}  // namespace aniflow::detail
