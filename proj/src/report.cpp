#include "ofa/report.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace ofa {

void Report::expect(bool cond, const std::string& what,
                    const std::function<std::string()>& witness) {
  ++counts[what];
  ++instances;
  if (!cond) failures.push_back({what, witness()});
}

void Report::merge(const Report& other) {
  instances += other.instances;
  for (const auto& f : other.failures) failures.push_back(f);
  for (const auto& [k, v] : other.counts) counts[k] += v;
  if (other.mode != "exhaustive") mode = other.mode;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["instances"] = instances;
  j["seed"] = seed;
  j["budget"] = budget;
  j["mode"] = mode;
  j["pass"] = ok();
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : failures) fs.push_back({{"check", f.check}, {"witness", f.witness}});
  j["failures"] = fs;
  nlohmann::json cs = nlohmann::json::object();
  for (const auto& [k, v] : counts) cs[k] = v;
  j["counts"] = cs;
  return j;
}

void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  int w = int(std::min<size_t>(size_t(workers), n));
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

uint64_t stable_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ofa
