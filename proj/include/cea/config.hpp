#pragma once

// JSON chain configurations. A document looks like
//
//   { "name": "...", "generator": "triangular3-111",
//     "params": { "phi1": "exp(t)", ... },
//     "window": { "s_min": 0.1, "t_max": 10 },
//     "relabel": [2, 1, 3] }
//
// Indices inside documents (permutations, fixed points, relabellings) are
// one-based. See docs/config_schema.md for every generator.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cea/chain.hpp"
#include "cea/generators.hpp"

namespace cea {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& message);
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

extern const std::vector<std::string> kGenerators;

struct LoadedChain {
  ChainFamily chain;
  std::string name;
  std::string generator;
  nlohmann::json document;
  // Present for the symmetric generator.
  std::optional<RowSumDiagnostics> diagnostics;
  double max_asymmetry = 0.0;
};

// Builds a chain from a parsed document. Relative direct-sum block paths are
// resolved against base_dir. key_path prefixes error locations.
LoadedChain build_chain(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                        const std::string& key_path = "");

nlohmann::json read_json(const std::filesystem::path& path);
LoadedChain load_chain(const std::filesystem::path& path);

// 64-bit FNV-1a of the compact JSON dump.
std::uint64_t config_hash(const nlohmann::json& doc);
std::string hex_hash(std::uint64_t h);

}  // namespace cea
