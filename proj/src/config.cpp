#include "qgate/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qgate {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text, const std::string& origin) {
  IniFile ini;
  ini.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      if (!ini.sections_.count(section)) {
        ini.sections_[section];
        ini.section_order_.push_back(section);
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside of a section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (!ini.sections_[section].count(key)) ini.key_order_[section].push_back(key);
    ini.sections_[section][key] = value;
  }
  return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

bool IniFile::has_section(const std::string& section) const { return sections_.count(section); }

bool IniFile::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key);
}

const std::string& IniFile::raw(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end() || !it->second.count(key))
    throw ConfigError(section + "." + key + ": missing required key");
  return it->second.at(key);
}

std::string IniFile::get_string(const std::string& section, const std::string& key) const {
  return raw(section, key);
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
  const std::string& v = raw(section, key);
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(section + "." + key + ": expected a number, got '" + v + "'");
  }
}

int IniFile::get_int(const std::string& section, const std::string& key) const {
  const std::string& v = raw(section, key);
  try {
    size_t used = 0;
    long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return static_cast<int>(i);
  } catch (const std::exception&) {
    throw ConfigError(section + "." + key + ": expected an integer, got '" + v + "'");
  }
}

bool IniFile::get_bool(const std::string& section, const std::string& key) const {
  std::string v = raw(section, key);
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(section + "." + key + ": expected a boolean, got '" + v + "'");
}

template <>
double IniFile::get_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}
template <>
int IniFile::get_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}
template <>
bool IniFile::get_or(const std::string& section, const std::string& key, bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}
template <>
std::string IniFile::get_or(const std::string& section, const std::string& key,
                            std::string fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

void IniFile::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!sections_.count(section)) section_order_.push_back(section);
  if (!sections_[section].count(key)) key_order_[section].push_back(key);
  sections_[section][key] = value;
}

void IniFile::set(const std::string& section, const std::string& key, double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  set(section, key, os.str());
}

void IniFile::set(const std::string& section, const std::string& key, long long value) {
  set(section, key, std::to_string(value));
}

std::vector<std::string> IniFile::keys(const std::string& section) const {
  auto it = key_order_.find(section);
  return it == key_order_.end() ? std::vector<std::string>{} : it->second;
}

std::string IniFile::serialize() const {
  std::ostringstream os;
  for (const auto& section : section_order_) {
    os << "[" << section << "]\n";
    for (const auto& key : keys(section)) os << key << " = " << sections_.at(section).at(key) << "\n";
    os << "\n";
  }
  return os.str();
}

}  // namespace qgate
