// Copyright 2026 The twirlcert authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWIRLCERT_RNG_HPP
#define TWIRLCERT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace twirlcert {

// splitmix64 mixing step; used to derive independent substream seeds.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> ids) {
    uint64_t h = splitmix64(base);
    for (uint64_t id : ids) {
        h = splitmix64(h ^ (id * 0x9e3779b97f4a7c15ULL));
    }
    return h;
}

// Deterministic random stream backed by std::mt19937_64. All draws below are
// implemented directly on the raw 64-bit output so results are identical
// across standard library implementations (std::*_distribution is not
// portable). Substreams are derived from the root seed, never from engine
// state, so records can be evaluated in any order.
class RandomStream {
  public:
    explicit RandomStream(uint64_t seed) : seed_(seed), engine_(seed) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, bound) via rejection.
    uint64_t uniform_below(uint64_t bound) {
        if (bound == 0) {
            return 0;
        }
        uint64_t threshold = (~uint64_t{0} - bound + 1) % bound;  // 2^64 mod bound
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1, u2;
        do {
            u1 = uniform_unit();
        } while (u1 == 0.0);
        u2 = uniform_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    RandomStream substream(std::initializer_list<uint64_t> ids) const {
        return RandomStream(derive_seed(seed_, ids));
    }

  private:
    uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace twirlcert

#endif
