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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "acesim/kernels.hpp"
#include "acesim/rng.hpp"

using namespace acesim;
namespace k = acesim::kernels;

namespace {

std::vector<double> random_vec(int len, Rng& rng) {
    std::vector<double> v(static_cast<size_t>(len));
    for (double& x : v) x = 2.0 * rng.unit() - 1.0;
    return v;
}

}  // namespace

#if defined(__x86_64__) || defined(_M_X64)

// The AVX2 variants avoid FMA and keep the scalar evaluation order, so they
// must match the scalar reference bit for bit.
TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
    if (!k::avx2::supported()) {
        MESSAGE("AVX2 unavailable on this host; skipping");
        return;
    }
    Rng rng(42);
    for (int n = 1; n <= 3; ++n) {
        const int len = 1 << (2 * n);
        for (int trial = 0; trial < 25; ++trial) {
            double lam4[4], lam16[16], m[16];
            for (double& x : lam4) x = 2.0 * rng.unit() - 1.0;
            for (double& x : lam16) x = 2.0 * rng.unit() - 1.0;
            for (double& x : m) x = 2.0 * rng.unit() - 1.0;

            for (int q = 0; q < n; ++q) {
                auto a = random_vec(len, rng);
                auto b = a;
                k::scalar::channel1q(a.data(), n, q, lam4);
                k::avx2::channel1q(b.data(), n, q, lam4);
                CHECK(a == b);

                a = random_vec(len, rng);
                b = a;
                k::scalar::ptm1q(a.data(), n, q, m);
                k::avx2::ptm1q(b.data(), n, q, m);
                CHECK(a == b);
            }
            for (int q0 = 0; q0 < n; ++q0) {
                for (int q1 = 0; q1 < n; ++q1) {
                    if (q0 == q1) continue;
                    auto a = random_vec(len, rng);
                    auto b = a;
                    k::scalar::channel2q(a.data(), n, q0, q1, lam16);
                    k::avx2::channel2q(b.data(), n, q0, q1, lam16);
                    CHECK(a == b);
                }
            }
            {
                auto src = random_vec(len, rng);
                std::vector<int32_t> from(static_cast<size_t>(len));
                std::vector<double> sign(static_cast<size_t>(len));
                for (int i = 0; i < len; ++i) {
                    from[static_cast<size_t>(i)] = static_cast<int32_t>(rng.below(static_cast<uint64_t>(len)));
                    sign[static_cast<size_t>(i)] = rng.bernoulli(0.5) ? 1.0 : -1.0;
                }
                std::vector<double> a(static_cast<size_t>(len)), b(static_cast<size_t>(len));
                k::scalar::signed_permute(a.data(), src.data(), from.data(), sign.data(), len);
                k::avx2::signed_permute(b.data(), src.data(), from.data(), sign.data(), len);
                CHECK(a == b);
            }
            {
                auto a = random_vec(len, rng);
                auto b = a;
                k::scalar::had4(a.data(), n);
                k::avx2::had4(b.data(), n);
                CHECK(a == b);
            }
        }
    }
}

TEST_CASE("backend can be forced at runtime") {
    if (!k::avx2::supported()) return;
    const k::Backend original = k::active_backend();
    k::force_backend(k::Backend::Scalar);
    CHECK(k::active_backend() == k::Backend::Scalar);
    k::force_backend(k::Backend::Avx2);
    CHECK(k::active_backend() == k::Backend::Avx2);
    k::force_backend(original);
}

#endif  // x86_64

TEST_CASE("had4 is involutory up to 4^n") {
    Rng rng(5);
    for (int n = 1; n <= 3; ++n) {
        const int len = 1 << (2 * n);
        auto v = random_vec(len, rng);
        auto orig = v;
        k::ops().had4(v.data(), n);
        k::ops().had4(v.data(), n);
        for (int i = 0; i < len; ++i) {
            CHECK(v[static_cast<size_t>(i)] ==
                  doctest::Approx(orig[static_cast<size_t>(i)] * len).epsilon(1e-13));
        }
    }
}

TEST_CASE("wht_pow2 matches the direct parity sum") {
    Rng rng(6);
    for (int bits = 1; bits <= 3; ++bits) {
        const int len = 1 << bits;
        auto v = random_vec(len, rng);
        auto direct = std::vector<double>(static_cast<size_t>(len), 0.0);
        for (int j = 0; j < len; ++j) {
            for (int m = 0; m < len; ++m) {
                direct[static_cast<size_t>(j)] +=
                    (__builtin_popcount(static_cast<unsigned>(j & m)) & 1) ? -v[static_cast<size_t>(m)]
                                                                           : v[static_cast<size_t>(m)];
            }
        }
        k::wht_pow2(v.data(), len);
        for (int j = 0; j < len; ++j)
            CHECK(v[static_cast<size_t>(j)] == doctest::Approx(direct[static_cast<size_t>(j)]).epsilon(1e-12));
    }
}
