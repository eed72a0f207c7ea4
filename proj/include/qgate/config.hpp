#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgate/types.hpp"

namespace qgate {

// Minimal INI-style config: [section] headers, key = value pairs, '#'/';'
// comments. Getter errors carry field-level context ("section.key: ...").
class IniFile {
 public:
  static IniFile parse_string(const std::string& text, const std::string& origin = "<string>");
  static IniFile parse_file(const std::string& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;

  template <typename T>
  T get_or(const std::string& section, const std::string& key, T fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void set(const std::string& section, const std::string& key, double value);
  void set(const std::string& section, const std::string& key, long long value);

  std::string serialize() const;

  const std::vector<std::string>& section_order() const { return section_order_; }
  std::vector<std::string> keys(const std::string& section) const;

 private:
  const std::string& raw(const std::string& section, const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::vector<std::string> section_order_;
  std::map<std::string, std::vector<std::string>> key_order_;
};

}  // namespace qgate
