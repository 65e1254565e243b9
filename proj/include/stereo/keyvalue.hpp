#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stereo {

/// Ordered key=value document: one key per line, '#' starts a comment,
/// surrounding whitespace is ignored. Used for calibration, scene specs,
/// run configuration and benchmark reports.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);

  const std::vector<std::string>& keys() const noexcept { return order_; }
  std::string to_string() const;
  void save(const std::string& path) const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(std::string_view text);
int parse_int(std::string_view text);

}  // namespace stereo
