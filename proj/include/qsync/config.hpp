#pragma once

// Versioned physical defaults and scan lists. The defaults file is compiled
// into the binary; --config replaces it and --set patches single keys.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsync/sweep.hpp"

namespace qsync::config {

inline constexpr int kConfigVersion = 1;

struct Scans {
  std::vector<int> n_early;
  std::vector<double> rates;
  std::vector<double> init_error;
  std::vector<double> temperature;
};

struct Defaults {
  int version = kConfigVersion;
  sweep::SimulationBase base;
  double eps_max = sweep::kDefaultEpsMax;
  sweep::GridPoint export_lcm;
  sweep::GridPoint export_gcm;
  sweep::GridPoint export_me;
  Scans scans;
  nlohmann::json source;  // effective tree after overrides

  const sweep::GridPoint& export_point(Model model) const;
};

/// The defaults file as compiled in.
const char* embedded_defaults_text();

/// Throws FormatError on a missing key, wrong type or version mismatch.
Defaults from_json(const nlohmann::json& tree);
Defaults embedded_defaults();
Defaults load_file(const std::filesystem::path& path);

/// Applies a "dotted.key=value" override in place. The key must already
/// exist; the value is parsed as JSON, falling back to a plain string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string digest_hex(const nlohmann::json& tree);

}  // namespace qsync::config
