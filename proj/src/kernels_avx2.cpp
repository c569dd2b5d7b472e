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

#if defined(ACESIM_HAVE_AVX2)

#include <immintrin.h>

// AVX2 variants. Multiplies and adds are kept separate (no FMA) and in the
// same order as the scalar kernels, so results are bit-identical to the
// scalar backend.

namespace acesim::kernels::avx2 {

bool supported() { return __builtin_cpu_supports("avx2"); }

void channel1q(double* v, int n, int qubit, const double* lam4) {
    const int stride = digit_stride(n, qubit);
    const int len = digit_stride(n, -1);
    if (stride == 1) {
        const __m256d lam = _mm256_loadu_pd(lam4);
        for (int i = 0; i < len; i += 4) {
            _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_loadu_pd(v + i), lam));
        }
        return;
    }
    // stride is a power of 4, so runs of `stride` doubles share one factor.
    for (int base = 0; base < len; base += 4 * stride) {
        for (int d = 0; d < 4; ++d) {
            const __m256d f = _mm256_set1_pd(lam4[d]);
            double* p = v + base + d * stride;
            for (int i = 0; i < stride; i += 4) {
                _mm256_storeu_pd(p + i, _mm256_mul_pd(_mm256_loadu_pd(p + i), f));
            }
        }
    }
}

void channel2q(double* v, int n, int q0, int q1, const double* lam16) {
    int s0 = digit_stride(n, q0);
    int s1 = digit_stride(n, q1);
    double lam_local[16];
    const double* lam = lam16;
    if (s0 < s1) {  // normalize so the second digit varies faster
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) lam_local[4 * a + b] = lam16[4 * b + a];
        lam = lam_local;
        int t = s0; s0 = s1; s1 = t;
    }
    const int len = digit_stride(n, -1);
    if (s1 == 1) {
        for (int base = 0; base < len; base += 4) {
            const int d0 = (base / s0) & 3;
            const __m256d row = _mm256_loadu_pd(lam + 4 * d0);
            _mm256_storeu_pd(v + base, _mm256_mul_pd(_mm256_loadu_pd(v + base), row));
        }
        return;
    }
    for (int base = 0; base < len; base += 4) {
        const int d0 = (base / s0) & 3;
        const int d1 = (base / s1) & 3;
        const __m256d f = _mm256_set1_pd(lam[4 * d0 + d1]);
        _mm256_storeu_pd(v + base, _mm256_mul_pd(_mm256_loadu_pd(v + base), f));
    }
}

void signed_permute(double* dst, const double* src, const int32_t* from,
                    const double* sign, int len) {
    for (int i = 0; i < len; i += 4) {
        const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(from + i));
        const __m256d g = _mm256_i32gather_pd(src, idx, 8);
        const __m256d s = _mm256_loadu_pd(sign + i);
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(s, g));
    }
}

void ptm1q(double* v, int n, int qubit, const double* m) {
    const int stride = digit_stride(n, qubit);
    const int len = digit_stride(n, -1);
    if (stride >= 4) {
        for (int base = 0; base < len; base += 4 * stride) {
            for (int i = 0; i < stride; i += 4) {
                double* p = v + base + i;
                const __m256d a = _mm256_loadu_pd(p);
                const __m256d b = _mm256_loadu_pd(p + stride);
                const __m256d c = _mm256_loadu_pd(p + 2 * stride);
                const __m256d d = _mm256_loadu_pd(p + 3 * stride);
                for (int r = 0; r < 4; ++r) {
                    __m256d acc = _mm256_mul_pd(_mm256_set1_pd(m[4 * r]), a);
                    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(m[4 * r + 1]), b));
                    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(m[4 * r + 2]), c));
                    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(m[4 * r + 3]), d));
                    _mm256_storeu_pd(p + r * stride, acc);
                }
            }
        }
        return;
    }
    // stride == 1: each aligned group of 4 is one digit block.
    const __m256d c0 = _mm256_set_pd(m[12], m[8], m[4], m[0]);
    const __m256d c1 = _mm256_set_pd(m[13], m[9], m[5], m[1]);
    const __m256d c2 = _mm256_set_pd(m[14], m[10], m[6], m[2]);
    const __m256d c3 = _mm256_set_pd(m[15], m[11], m[7], m[3]);
    for (int base = 0; base < len; base += 4) {
        double* p = v + base;
        __m256d acc = _mm256_mul_pd(c0, _mm256_set1_pd(p[0]));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c1, _mm256_set1_pd(p[1])));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c2, _mm256_set1_pd(p[2])));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c3, _mm256_set1_pd(p[3])));
        _mm256_storeu_pd(p, acc);
    }
}

void had4(double* v, int n) {
    const int len = digit_stride(n, -1);
    for (int q = 0; q < n; ++q) {
        const int stride = digit_stride(n, q);
        if (stride >= 4) {
            for (int base = 0; base < len; base += 4 * stride) {
                for (int i = 0; i < stride; i += 4) {
                    double* p = v + base + i;
                    const __m256d a = _mm256_loadu_pd(p);
                    const __m256d b = _mm256_loadu_pd(p + stride);
                    const __m256d c = _mm256_loadu_pd(p + 2 * stride);
                    const __m256d d = _mm256_loadu_pd(p + 3 * stride);
                    const __m256d apb = _mm256_add_pd(a, b);
                    const __m256d amb = _mm256_sub_pd(a, b);
                    const __m256d cpd = _mm256_add_pd(c, d);
                    const __m256d cmd = _mm256_sub_pd(c, d);
                    _mm256_storeu_pd(p, _mm256_add_pd(apb, cpd));
                    _mm256_storeu_pd(p + stride, _mm256_sub_pd(apb, cpd));
                    _mm256_storeu_pd(p + 2 * stride, _mm256_add_pd(amb, cmd));
                    _mm256_storeu_pd(p + 3 * stride, _mm256_sub_pd(amb, cmd));
                }
            }
        } else {
            // Last stage butterflies sit inside a single vector; the shuffle
            // dance is not worth it at these sizes.
            for (int base = 0; base < len; base += 4) {
                double* p = v + base;
                const double a = p[0], b = p[1], c = p[2], d = p[3];
                const double apb = a + b, amb = a - b;
                const double cpd = c + d, cmd = c - d;
                p[0] = apb + cpd;
                p[1] = apb - cpd;
                p[2] = amb + cmd;
                p[3] = amb - cmd;
            }
        }
    }
}

}  // namespace acesim::kernels::avx2

#endif  // ACESIM_HAVE_AVX2
