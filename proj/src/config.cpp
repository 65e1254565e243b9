#include "stereo/config.hpp"

#include <functional>
#include <map>

#include "stereo/error.hpp"
#include "stereo/eval.hpp"

namespace stereo {
namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(Errc::InvalidParameter, "'" + key + "': not a boolean: '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto i = [&](const std::string& k, auto get) {
      t[k] = [get](RunConfig& c, const std::string& key, const std::string& v) {
        try {
          get(c) = parse_int(v);
        } catch (const Error&) {
          throw Error(Errc::InvalidParameter, "'" + key + "': not an integer: '" + v + "'");
        }
      };
    };
    auto d = [&](const std::string& k, auto get) {
      t[k] = [get](RunConfig& c, const std::string& key, const std::string& v) {
        try {
          get(c) = parse_double(v);
        } catch (const Error&) {
          throw Error(Errc::InvalidParameter, "'" + key + "': not a number: '" + v + "'");
        }
      };
    };
    auto b = [&](const std::string& k, auto get) {
      t[k] = [get](RunConfig& c, const std::string& key, const std::string& v) { get(c) = parse_bool(key, v); };
    };
#define E(name) [](RunConfig& c) -> auto& { return c.tracker.matcher.elas.name; }
#define S(name) [](RunConfig& c) -> auto& { return c.tracker.matcher.sgbm.name; }
#define G(name) [](RunConfig& c) -> auto& { return c.tracker.seg.name; }
    i("elas.grid_step", E(grid_step));
    d("elas.support_ratio", E(support_ratio));
    i("elas.consistency_tolerance", E(consistency_tolerance));
    i("elas.min_support_texture", E(min_support_texture));
    i("elas.support_window", E(support_window));
    i("elas.support_agreement", E(support_agreement));
    i("elas.min_support_neighbours", E(min_support_neighbours));
    d("elas.gamma", E(gamma));
    d("elas.sigma", E(sigma));
    d("elas.beta", E(beta));
    i("elas.d_min", E(d_min));
    i("elas.d_max", E(d_max));
    i("elas.lr_tolerance", E(lr_tolerance));
    b("elas.left_only", E(left_only));
    b("elas.subsample", E(subsample));
    b("elas.subpixel", E(subpixel));
    d("elas.speckle_tolerance", E(speckle_tolerance));
    i("elas.gap_width", E(gap_width));
    i("sgbm.pre_filter_cap", S(pre_filter_cap));
    i("sgbm.sad_window", S(sad_window));
    i("sgbm.p1", S(p1));
    i("sgbm.p2", S(p2));
    i("sgbm.uniqueness_ratio", S(uniqueness_ratio));
    i("sgbm.speckle_window", S(speckle_window));
    i("sgbm.speckle_range", S(speckle_range));
    i("sgbm.disp12_max_diff", S(disp12_max_diff));
    i("sgbm.d_min", S(d_min));
    i("sgbm.d_max", S(d_max));
    i("sgbm.directions", S(directions));
    b("sgbm.subpixel", S(subpixel));
    i("seg.blur_size", G(blur_size));
    d("seg.blur1_sigma", G(blur1_sigma));
    i("seg.threshold", G(threshold));
    i("seg.dilations", G(dilations));
    d("seg.blur2_sigma", G(blur2_sigma));
    i("seg.erosions", G(erosions));
    i("seg.u_plus", G(u_plus));
    i("seg.u_minus", G(u_minus));
    i("seg.min_blob_area", G(min_blob_area));
    i("seg.roi_margin", G(roi_margin));
    i("seg.buffer_len", G(buffer_len));
#undef E
#undef S
#undef G
    d("gaze.alpha", [](RunConfig& c) -> auto& { return c.tracker.gaze_alpha; });
    i("threads", [](RunConfig& c) -> auto& { return c.threads; });
    t["matcher"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.tracker.matcher.id = parse_matcher(v);
    };
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& t = setters();
  const auto it = t.find(key);
  require(it != t.end(), Errc::InvalidParameter, "unknown configuration key '" + key + "'");
  it->second(*this, key, value);
}

void RunConfig::apply(const KeyValueFile& kv) {
  for (const auto& k : kv.keys()) set(k, kv.get(k));
}

void RunConfig::validate() const {
  tracker.validate();
  require(threads >= 0, Errc::InvalidParameter, "threads must be >= 0");
}

std::vector<std::pair<std::string, std::string>> RunConfig::dump() const {
  auto d = parameter_dump(tracker);
  d.emplace_back("threads", std::to_string(threads));
  return d;
}

std::string RunConfig::to_text() const {
  KeyValueFile kv;
  for (const auto& [k, v] : dump()) kv.set(k, v);
  return kv.to_string();
}

RunConfig RunConfig::defaults(MatcherId matcher, int width, int height) {
  RunConfig c;
  c.tracker = TrackerParams::for_resolution(matcher, width, height);
  return c;
}

RunConfig RunConfig::resolve(int width, int height, const std::optional<std::string>& file,
                             const std::vector<std::string>& overrides, const std::optional<MatcherId>& matcher_flag) {
  RunConfig c = defaults(matcher_flag.value_or(MatcherId::Elas), width, height);
  if (file) c.apply(KeyValueFile::load(*file));
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    require(eq != std::string::npos && eq > 0, Errc::InvalidParameter, "override must be key=value: '" + o + "'");
    c.set(o.substr(0, eq), o.substr(eq + 1));
  }
  if (matcher_flag) c.tracker.matcher.id = *matcher_flag;
  c.validate();
  return c;
}

}  // namespace stereo
