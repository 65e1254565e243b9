#include "stereo/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "stereo/error.hpp"

namespace stereo {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(Errc::InvalidParameter, "not a number: '" + std::string(text) + "'");
  return v;
}

int parse_int(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(Errc::InvalidParameter, "not an integer: '" + std::string(text) + "'");
  return v;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile kv;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": empty key");
    kv.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(Errc::InvalidParameter, "missing key '" + key + "'");
  return it->second;
}

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
  try {
    return parse_double(get(key));
  } catch (const Error& e) {
    throw Error(Errc::InvalidParameter, "key '" + key + "': " + e.what());
  }
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueFile::get_int(const std::string& key) const {
  try {
    return parse_int(get(key));
  } catch (const Error& e) {
    throw Error(Errc::InvalidParameter, "key '" + key + "': " + e.what());
  }
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  throw Error(Errc::InvalidParameter, "key '" + key + "': not a boolean: '" + *v + "'");
}

void KeyValueFile::set(const std::string& key, std::string value) {
  if (values_.count(key) == 0) order_.push_back(key);
  values_[key] = std::move(value);
}

void KeyValueFile::set(const std::string& key, double value) { set(key, format_double(value)); }
void KeyValueFile::set(const std::string& key, int value) { set(key, std::to_string(value)); }

std::string KeyValueFile::to_string() const {
  std::string out;
  for (const auto& k : order_) out += k + "=" + values_.at(k) + "\n";
  return out;
}

void KeyValueFile::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
  out << to_string();
}

}  // namespace stereo
