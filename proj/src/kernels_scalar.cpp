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

namespace acesim::kernels {

namespace scalar {

void channel1q(double* v, int n, int qubit, const double* lam4) {
    const int stride = digit_stride(n, qubit);
    const int len = digit_stride(n, -1);  // 4^n
    for (int base = 0; base < len; base += 4 * stride) {
        for (int d = 0; d < 4; ++d) {
            const double f = lam4[d];
            double* p = v + base + d * stride;
            for (int i = 0; i < stride; ++i) p[i] *= f;
        }
    }
}

void channel2q(double* v, int n, int q0, int q1, const double* lam16) {
    const int s0 = digit_stride(n, q0);
    const int s1 = digit_stride(n, q1);
    const int len = digit_stride(n, -1);
    for (int i = 0; i < len; ++i) {
        const int d0 = (i / s0) & 3;
        const int d1 = (i / s1) & 3;
        v[i] *= lam16[4 * d0 + d1];
    }
}

void signed_permute(double* dst, const double* src, const int32_t* from,
                    const double* sign, int len) {
    for (int i = 0; i < len; ++i) dst[i] = sign[i] * src[from[i]];
}

void ptm1q(double* v, int n, int qubit, const double* m) {
    const int stride = digit_stride(n, qubit);
    const int len = digit_stride(n, -1);
    for (int base = 0; base < len; base += 4 * stride) {
        for (int i = 0; i < stride; ++i) {
            double* p = v + base + i;
            const double a = p[0], b = p[stride], c = p[2 * stride], d = p[3 * stride];
            p[0]          = m[0] * a + m[1] * b + m[2] * c + m[3] * d;
            p[stride]     = m[4] * a + m[5] * b + m[6] * c + m[7] * d;
            p[2 * stride] = m[8] * a + m[9] * b + m[10] * c + m[11] * d;
            p[3 * stride] = m[12] * a + m[13] * b + m[14] * c + m[15] * d;
        }
    }
}

// Radix-4 butterfly of the symplectic Hadamard: per qubit, (a,b,c,d) ->
// (a+b+c+d, a+b-c-d, a-b+c-d, a-b-c+d) in digit order (I,X,Y,Z).
void had4(double* v, int n) {
    const int len = digit_stride(n, -1);
    for (int q = 0; q < n; ++q) {
        const int stride = digit_stride(n, q);
        for (int base = 0; base < len; base += 4 * stride) {
            for (int i = 0; i < stride; ++i) {
                double* p = v + base + i;
                const double a = p[0], b = p[stride], c = p[2 * stride], d = p[3 * stride];
                const double apb = a + b, amb = a - b;
                const double cpd = c + d, cmd = c - d;
                p[0]          = apb + cpd;
                p[stride]     = apb - cpd;
                p[2 * stride] = amb + cmd;
                p[3 * stride] = amb - cmd;
            }
        }
    }
}

}  // namespace scalar

void wht_pow2(double* v, int len) {
    for (int h = 1; h < len; h <<= 1) {
        for (int base = 0; base < len; base += 2 * h) {
            for (int i = base; i < base + h; ++i) {
                const double a = v[i], b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
    }
}

}  // namespace acesim::kernels
