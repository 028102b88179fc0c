/*
 Copyright 2026 the a2gsounder authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <cstddef>

#include "a2g/common.hpp"

namespace a2g {

// Thin wrapper around FFTW. Plan creation is serialized internally (FFTW
// planning is not thread-safe); transform execution is safe from any thread
// as long as each call uses its own buffers, which these helpers do.

/// In-place-style forward DFT, no normalization: X[k] = sum_n x[n] e^{-j2πkn/N}.
CVec fft(const CVec& x);

/// Inverse DFT scaled by 1/N: x[n] = (1/N) sum_k X[k] e^{+j2πkn/N}.
CVec ifft(const CVec& X);

/// Unitary pair (1/sqrt(N) both ways); preserves energy.
CVec fft_unitary(const CVec& x);
CVec ifft_unitary(const CVec& X);

} // namespace a2g
