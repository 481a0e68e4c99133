#ifndef RVLBM_CONFIG_HPP_
#define RVLBM_CONFIG_HPP_

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvlbm {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` settings. Blank lines and `#` comments are ignored;
/// later assignments override earlier ones.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> find(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& text, const std::string& what);
std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace rvlbm

#endif  // RVLBM_CONFIG_HPP_
