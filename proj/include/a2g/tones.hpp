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

#include <span>
#include <vector>

#include "a2g/common.hpp"
#include "a2g/numerology.hpp"

namespace a2g {

/// Tone frequency offsets (Hz) of the 62 central subcarriers, DC excluded,
/// in sequence order (31 below, then 31 above DC).
std::vector<double> central62_freqs(const Numerology& num);

/// Frequencies (Hz) of the pilot lattice subcarriers for (pci, symbol).
std::vector<double> crs_pilot_freqs(int pci, int symbol, const Numerology& num);

/// Direct DFT of a sample window at arbitrary tone frequencies; the
/// arbitrary-rate counterpart of picking FFT bins.
CVec tone_dft(std::span<const cplx> seg, const std::vector<double>& freqs,
              double fs);

} // namespace a2g
