#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stereo/attention.hpp"
#include "stereo/keyvalue.hpp"

namespace stereo {

/// Merged run configuration. Resolution: resolution-dependent defaults, then
/// the config file, then command-line overrides; validated after merging.
struct RunConfig {
  TrackerParams tracker;
  int threads = 0;  ///< 0 keeps the environment / hardware default

  /// Sets one parameter by its dotted name ("elas.sigma", "seg.threshold",
  /// "matcher", "gaze.alpha", "threads"). Unknown keys are rejected.
  void set(const std::string& key, const std::string& value);
  void apply(const KeyValueFile& kv);
  void validate() const;
  std::vector<std::pair<std::string, std::string>> dump() const;
  std::string to_text() const;

  static RunConfig defaults(MatcherId matcher, int width, int height);
  /// `overrides` holds "key=value" strings; an explicit matcher flag beats
  /// a "matcher" key in the file.
  static RunConfig resolve(int width, int height, const std::optional<std::string>& file,
                           const std::vector<std::string>& overrides,
                           const std::optional<MatcherId>& matcher_flag = std::nullopt);
};

}  // namespace stereo
