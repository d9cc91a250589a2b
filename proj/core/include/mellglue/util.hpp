#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mellglue {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Finite multiset of naturals under the Dershowitz-Manna order. Over a total
// order on the elements this coincides with lexicographic comparison of the
// descending sorts, a proper prefix being smaller.
struct Multiset {
  std::vector<long> desc;  // sorted descending

  Multiset() = default;
  explicit Multiset(std::vector<long> xs) : desc(std::move(xs)) {
    std::sort(desc.begin(), desc.end(), std::greater<long>());
  }

  int compare(const Multiset& o) const {
    size_t n = std::min(desc.size(), o.desc.size());
    for (size_t i = 0; i < n; ++i) {
      if (desc[i] != o.desc[i]) return desc[i] < o.desc[i] ? -1 : 1;
    }
    if (desc.size() != o.desc.size()) return desc.size() < o.desc.size() ? -1 : 1;
    return 0;
  }
  bool operator<(const Multiset& o) const { return compare(o) < 0; }
  bool operator==(const Multiset& o) const { return desc == o.desc; }
};

inline uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

// Parallelism cap: MELLGLUE_THREADS, default hardware concurrency.
unsigned thread_cap();

// Runs fn(i) for i in [0, n). Items are chunked over at most thread_cap()
// threads; fn must not touch shared mutable state.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace mellglue
