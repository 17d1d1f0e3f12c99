// Flat configuration files. TOML-style files are parsed by a small built-in
// reader covering the subset the tool needs ([section] tables, scalar
// key = value pairs, single-line arrays); .json files are accepted too and
// flattened one level, so "section.key" addresses both formats uniformly.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sal {

class ConfigFile {
public:
  static ConfigFile load(const std::string& path);
  static ConfigFile parse_toml(const std::string& text,
                               const std::string& origin = "<string>");
  static ConfigFile parse_json(const std::string& text,
                               const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  // Typed getters; the overloads with a fallback tolerate missing keys but
  // still reject malformed values.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_array(const std::string& key) const;
  std::vector<std::string> get_string_array(const std::string& key) const;
  std::vector<double> get_double_array(const std::string& key) const;

  std::vector<std::string> keys() const;

private:
  struct Entry {
    bool is_array = false;
    bool quoted = false;                // scalar came from a quoted string
    std::string scalar;                 // raw token
    std::vector<std::string> items;     // raw tokens
    std::vector<bool> item_quoted;
  };

  const Entry& entry(const std::string& key) const;
  std::map<std::string, Entry> entries_;
  std::string origin_;
};

} // namespace sal
