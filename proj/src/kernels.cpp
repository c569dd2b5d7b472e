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

#include "acesim/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace acesim::kernels {

namespace {

Ops scalar_ops() {
    return Ops{scalar::channel1q, scalar::channel2q, scalar::signed_permute,
               scalar::ptm1q, scalar::had4};
}

#if defined(ACESIM_HAVE_AVX2)
Ops avx2_ops() {
    return Ops{avx2::channel1q, avx2::channel2q, avx2::signed_permute,
               avx2::ptm1q, avx2::had4};
}
#endif

bool avx2_available() {
#if defined(ACESIM_HAVE_AVX2)
    return avx2::supported();
#else
    return false;
#endif
}

Backend pick_default() {
    if (const char* env = std::getenv("ACESIM_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available())
                throw std::runtime_error("ACESIM_KERNELS=avx2 but AVX2 is unavailable");
            return Backend::Avx2;
        }
    }
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

struct Dispatch {
    Backend backend;
    Ops table;
    Dispatch() : backend(pick_default()), table(scalar_ops()) {
#if defined(ACESIM_HAVE_AVX2)
        if (backend == Backend::Avx2) table = avx2_ops();
#endif
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

void force_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available())
        throw std::runtime_error("AVX2 backend unavailable on this host");
    dispatch().backend = b;
#if defined(ACESIM_HAVE_AVX2)
    dispatch().table = (b == Backend::Avx2) ? avx2_ops() : scalar_ops();
#else
    dispatch().table = scalar_ops();
#endif
}

const Ops& ops() { return dispatch().table; }

}  // namespace acesim::kernels
