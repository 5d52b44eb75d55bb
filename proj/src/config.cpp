// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "matbake/error.h"

namespace matbake {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& name) {
  ConfigFile cfg;
  cfg.name_ = name;
  std::istringstream stream(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(name + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      cfg.sections_[section];  // allow empty sections
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

void ConfigFile::check_known_keys(
    const std::vector<std::pair<std::string, std::string>>& schema) const {
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, value] : entries) {
      bool known = std::any_of(schema.begin(), schema.end(), [&](const auto& sk) {
        return sk.first == section && sk.second == key;
      });
      if (!known)
        throw ConfigError(name_ + ": unknown config key [" + section + "] " + key);
    }
  }
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  return int(get_int64(section, key, fallback));
}

int64_t ConfigFile::get_int64(const std::string& section, const std::string& key,
                              int64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  try {
    size_t used = 0;
    int64_t out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw ConfigError("config [" + section + "] " + key + ": expected integer, got '" + v + "'");
  }
}

float ConfigFile::get_float(const std::string& section, const std::string& key,
                            float fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  try {
    size_t used = 0;
    float out = std::stof(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw ConfigError("config [" + section + "] " + key + ": expected number, got '" + v + "'");
  }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get_string(section, key, "");
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config [" + section + "] " + key + ": expected boolean, got '" + v + "'");
}

Vec3f ConfigFile::get_vec3(const std::string& section, const std::string& key,
                           const Vec3f& fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  std::istringstream ls(v);
  Vec3f out;
  if (ls >> out.x) {
    if (!(ls >> out.y)) { out.y = out.z = out.x; return out; }  // scalar broadcast
    if (!(ls >> out.z))
      throw ConfigError("config [" + section + "] " + key + ": expected 1 or 3 numbers");
    return out;
  }
  throw ConfigError("config [" + section + "] " + key + ": expected numbers, got '" + v + "'");
}

}  // namespace matbake
