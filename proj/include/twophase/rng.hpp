#pragma once

#include <cstdint>
#include <random>

namespace twophase {

// std::mt19937_64 is fully specified; the distribution helpers are not, so
// doubles are built from the raw bits and seeded draws agree across
// standard libraries.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % (hi - lo + 1)); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace twophase
