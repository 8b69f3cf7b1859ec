#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ofa {

// Bad config text or flag combination. `line` is 1-based, 0 when not tied to a line.
struct ConfigError : std::runtime_error {
  int line = 0;
  ConfigError(int ln, const std::string& msg);
};

// The instance could not be built: a pair axiom or admissibility failed.
struct ConstructionError : std::runtime_error {
  std::string axiom;
  ConstructionError(const std::string& ax, const std::string& msg);
};

// Pair description. F: FF(Z/n). C: ring K = Z/k, group L = Z/l with tables.
// B: ring L = Z/l, module K = Z/k with tables. Empty tables take defaults
// (dot l.k = l k^2, smul l.k = l k).
struct PairSpec {
  char type = 'F';
  int k = 2, l = 2;
  std::vector<int> d, u, s, dot, smul;
};

struct RunConfig {
  std::string name = "custom";
  std::string construction;  // "", "ofasymp", "ofaorth"
  int rank = 0;
  PairSpec pair;
  std::optional<std::vector<int>> adm_a, adm_b;  // ideal generators
  char dl_system = 0;                            // 0, 'B', 'C', 'F'
  int dl_rank = 0;
  std::vector<std::string> suites;
  uint64_t budget = 10'000'000;
  uint64_t seed = 1;
};

const std::vector<std::string>& suite_names();
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);  // throws ConfigError
std::string list_presets();

std::string serialize_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);  // throws ConfigError
// Suite/construction compatibility; throws ConfigError.
void validate_config(const RunConfig& cfg);

struct RunOptions {
  int workers = 1;
  bool mutate = false;       // plant one fault per suite
  bool all_records = false;
  size_t record_cap = 1000;  // per family; at least one full witness is always kept
};

struct RunResult {
  uint64_t failures = 0;
  uint64_t instances = 0;
  nlohmann::json summary;
  std::vector<nlohmann::json> records;
  std::string text;  // human-readable summary
};

// Builds the instance and runs every suite. Throws ConfigError / ConstructionError.
RunResult run(const RunConfig& cfg, const RunOptions& opt);

// Entry point for the verify binary. Exit 0 iff zero failures; 2 config error;
// 3 construction failure.
int verify_main(int argc, char** argv);

}  // namespace ofa
