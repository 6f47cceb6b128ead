// SPDX-License-Identifier: Apache-2.0
//
// SplitMix64: tiny seeded generator used for reproducible sweeps.
// The update rule is fixed by the output format contract (identical
// seeds must reproduce identical files on any platform), so we do not
// use <random> engines/distributions here.
#pragma once

#include <cstdint>

namespace ancurv {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    std::uint64_t state_;
};

}  // namespace ancurv
