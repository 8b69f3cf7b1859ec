#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace ofa {

struct Failure {
  std::string check;
  std::string witness;
};

// Outcome of one checker run. Failures are ordered by instance index.
struct Report {
  std::string check;
  uint64_t instances = 0;
  std::vector<Failure> failures;
  uint64_t seed = 0;
  uint64_t budget = 0;
  std::string mode = "exhaustive";
  std::map<std::string, uint64_t> counts;

  bool ok() const { return failures.empty(); }
  void expect(bool cond, const std::string& what, const std::function<std::string()>& witness);
  void merge(const Report& other);
  nlohmann::json to_json() const;
};

// Runs fn(i) for i in [0, n) on `workers` threads. Results land in index order,
// so callers that merge by index get identical output for any worker count.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

// FNV-1a, used for stable instance identifiers.
uint64_t stable_hash(const std::string& s);

}  // namespace ofa
