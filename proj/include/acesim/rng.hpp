// Copyright 2026 The acesim Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace acesim {

/// splitmix64 step; used to derive independent seed streams from a root seed.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed derivation: hash-chain the root seed with a list of
/// stream identifiers. Workers seeded this way are independent of scheduling.
inline uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> path) {
    uint64_t s = root ^ 0xd1b54a32d192ed03ULL;
    for (uint64_t p : path) {
        s ^= splitmix64(s) + 0x9e3779b97f4a7c15ULL * (p + 1);
        (void)splitmix64(s);
    }
    return splitmix64(s);
}

/// mt19937_64 wrapper with hand-rolled conversions so sampled values do not
/// depend on the standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    uint64_t below(uint64_t n) {
        if ((n & (n - 1)) == 0) return gen_() & (n - 1);  // power of two
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return x % n;
    }

    bool bernoulli(double p) { return unit() < p; }

    /// Index sampled from an unnormalized weight vector via inverse CDF.
    size_t categorical(const std::vector<double>& w) {
        double total = 0.0;
        for (double v : w) total += v;
        double u = unit() * total;
        double acc = 0.0;
        for (size_t i = 0; i + 1 < w.size(); ++i) {
            acc += w[i];
            if (u < acc) return i;
        }
        return w.size() - 1;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace acesim
