// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "matbake/vecmath.h"

namespace matbake {

// INI-style key/value file with sections. Keys are validated against the
// schema of known (section, key) pairs; unknown entries are hard errors so
// typos cannot silently change a run.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text, const std::string& name);

  // Throws ConfigError on any (section, key) not present in `schema`.
  void check_known_keys(const std::vector<std::pair<std::string, std::string>>& schema) const;

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  int64_t get_int64(const std::string& section, const std::string& key, int64_t fallback) const;
  float get_float(const std::string& section, const std::string& key, float fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  Vec3f get_vec3(const std::string& section, const std::string& key,
                 const Vec3f& fallback) const;

 private:
  std::string name_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace matbake
