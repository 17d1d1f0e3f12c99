#include "sal/config.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sal {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// strips an unquoted trailing comment
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

[[noreturn]] void fail(const std::string& origin, size_t line,
                       const std::string& what) {
  throw std::runtime_error("config " + origin + ":" + std::to_string(line) +
                           ": " + what);
}

} // namespace

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    return parse_json(text, path);
  return parse_toml(text, path);
}

ConfigFile ConfigFile::parse_toml(const std::string& text,
                                  const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  size_t lineno = 0;

  const auto parse_token = [&](std::string token, bool* quoted) {
    token = trim(token);
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
      *quoted = true;
      return token.substr(1, token.size() - 2);
    }
    *quoted = false;
    if (token.empty()) fail(origin, lineno, "empty value");
    return token;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(origin, lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (value.empty()) fail(origin, lineno, "empty value");

    Entry e;
    if (value.front() == '[') {
      if (value.back() != ']') fail(origin, lineno, "unterminated array");
      e.is_array = true;
      std::string body = value.substr(1, value.size() - 2);
      std::string item;
      std::stringstream items(body);
      while (std::getline(items, item, ',')) {
        if (trim(item).empty()) continue;
        bool quoted = false;
        e.items.push_back(parse_token(item, &quoted));
        e.item_quoted.push_back(quoted);
      }
    } else {
      e.quoted = false;
      e.scalar = parse_token(value, &e.quoted);
    }
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.entries_[full] = std::move(e);
  }
  return cfg;
}

ConfigFile ConfigFile::parse_json(const std::string& text,
                                  const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error("config " + origin + ": " + e.what());
  }
  if (!doc.is_object())
    throw std::runtime_error("config " + origin + ": top level must be an object");

  const auto scalar_token = [](const nlohmann::json& v, bool* quoted) {
    *quoted = v.is_string();
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    return v.dump();
  };

  const auto add = [&](const std::string& key, const nlohmann::json& v) {
    Entry e;
    if (v.is_array()) {
      e.is_array = true;
      for (const auto& item : v) {
        bool quoted = false;
        e.items.push_back(scalar_token(item, &quoted));
        e.item_quoted.push_back(quoted);
      }
    } else {
      e.scalar = scalar_token(v, &e.quoted);
    }
    cfg.entries_[key] = std::move(e);
  };

  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      for (const auto& [inner, v] : value.items()) add(key + "." + inner, v);
    } else {
      add(key, value);
    }
  }
  return cfg;
}

bool ConfigFile::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

const ConfigFile::Entry& ConfigFile::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end())
    throw std::runtime_error("config " + origin_ + ": missing key '" + key +
                             "'");
  return it->second;
}

namespace {

double token_to_double(const std::string& token, const std::string& origin,
                       const std::string& key) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::runtime_error("config " + origin + ": key '" + key +
                             "' is not a number (got '" + token + "')");
  return v;
}

std::int64_t token_to_int(const std::string& token, const std::string& origin,
                          const std::string& key) {
  std::int64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::runtime_error("config " + origin + ": key '" + key +
                             "' is not an integer (got '" + token + "')");
  return v;
}

} // namespace

std::string ConfigFile::get_string(const std::string& key) const {
  const Entry& e = entry(key);
  if (e.is_array)
    throw std::runtime_error("config " + origin_ + ": key '" + key +
                             "' is an array, expected a string");
  return e.scalar;
}

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double ConfigFile::get_double(const std::string& key) const {
  return token_to_double(get_string(key), origin_, key);
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& key) const {
  return token_to_int(get_string(key), origin_, key);
}

std::int64_t ConfigFile::get_int(const std::string& key,
                                 std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool ConfigFile::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::runtime_error("config " + origin_ + ": key '" + key +
                           "' is not a boolean (got '" + v + "')");
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::int64_t> ConfigFile::get_int_array(
    const std::string& key) const {
  const Entry& e = entry(key);
  if (!e.is_array)
    throw std::runtime_error("config " + origin_ + ": key '" + key +
                             "' is not an array");
  std::vector<std::int64_t> out;
  for (const auto& item : e.items)
    out.push_back(token_to_int(item, origin_, key));
  return out;
}

std::vector<double> ConfigFile::get_double_array(const std::string& key) const {
  const Entry& e = entry(key);
  if (!e.is_array)
    throw std::runtime_error("config " + origin_ + ": key '" + key +
                             "' is not an array");
  std::vector<double> out;
  for (const auto& item : e.items)
    out.push_back(token_to_double(item, origin_, key));
  return out;
}

std::vector<std::string> ConfigFile::get_string_array(
    const std::string& key) const {
  const Entry& e = entry(key);
  if (!e.is_array)
    throw std::runtime_error("config " + origin_ + ": key '" + key +
                             "' is not an array");
  return e.items;
}

std::vector<std::string> ConfigFile::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

} // namespace sal
