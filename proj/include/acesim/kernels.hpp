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

#include <cstddef>
#include <cstdint>

// Inner-loop kernels for Pauli-vector simulation. Every kernel has a scalar
// reference implementation and (on x86-64) an AVX2 variant selected at
// runtime. The AVX2 variants avoid FMA contraction and keep the scalar
// summation order, so both backends produce bit-identical results; the
// equivalence tests assert exact equality.
//
// Vector layout: a state over n qubits is a length 4^n array indexed by the
// base-4 Pauli index (digit order I=0, X=1, Y=2, Z=3; qubit 0 most
// significant). digit_stride(n, q) = 4^(n-1-q).

namespace acesim::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend selected at startup (AVX2 when the CPU supports it, unless the
/// ACESIM_KERNELS environment variable says "scalar" or "avx2").
Backend active_backend();

/// Force a backend; throws if unavailable on this host. Used by tests.
void force_backend(Backend b);

struct Ops {
    // v[i] *= lam[digit(i, qubit)] for a single-qubit Pauli-channel diagonal.
    void (*channel1q)(double* v, int n, int qubit, const double* lam4);
    // v[i] *= lam[4*digit(i,q0) + digit(i,q1)] for a two-qubit channel.
    void (*channel2q)(double* v, int n, int q0, int q1, const double* lam16);
    // dst[i] = sign[i] * src[from[i]]; gather form of a signed permutation.
    void (*signed_permute)(double* dst, const double* src, const int32_t* from,
                           const double* sign, int len);
    // 4x4 matrix applied to the digit groups of one qubit (row-major m).
    void (*ptm1q)(double* v, int n, int qubit, const double* m4x4);
    // In-place symplectic Hadamard transform, one radix-4 butterfly per qubit.
    void (*had4)(double* v, int n);
};

const Ops& ops();

// Scalar reference implementations (always available; the oracle side of the
// backend equivalence tests).
namespace scalar {
void channel1q(double* v, int n, int qubit, const double* lam4);
void channel2q(double* v, int n, int q0, int q1, const double* lam16);
void signed_permute(double* dst, const double* src, const int32_t* from,
                    const double* sign, int len);
void ptm1q(double* v, int n, int qubit, const double* m4x4);
void had4(double* v, int n);
}  // namespace scalar

#if defined(ACESIM_HAVE_AVX2)
namespace avx2 {
void channel1q(double* v, int n, int qubit, const double* lam4);
void channel2q(double* v, int n, int q0, int q1, const double* lam16);
void signed_permute(double* dst, const double* src, const int32_t* from,
                    const double* sign, int len);
void ptm1q(double* v, int n, int qubit, const double* m4x4);
void had4(double* v, int n);
bool supported();
}  // namespace avx2
#endif

inline int digit_stride(int n, int qubit) {
    int s = 1;
    for (int i = 0; i < n - 1 - qubit; ++i) s *= 4;
    return s;
}

// In-place Walsh-Hadamard transform over 2^k elements (butterfly form).
// Used for computational-basis outcome extraction; small sizes only.
void wht_pow2(double* v, int len);

}  // namespace acesim::kernels
