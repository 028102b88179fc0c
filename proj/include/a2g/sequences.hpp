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

#include <cstdint>
#include <vector>

#include "a2g/common.hpp"
#include "a2g/numerology.hpp"

namespace a2g {

// Synchronization and pilot sequence families. Generator and detector share
// these; all detection round trips rest on that.

/// 62-value Zadoff-Chu synchronization sequence (roots 25/29/34 for index
/// 0/1/2), to be mapped onto the 62 subcarriers around DC (DC itself null).
CVec pss_sequence(int root_index);

/// 62-value +-1 secondary sequence. `sss_index` mod 168 selects the group;
/// `half` picks the first/second half-frame variant; `pss_root_index`
/// selects the scrambling. Mapped like the PSS.
CVec sss_sequence(int sss_index, HalfFrame half, int pss_root_index);

/// Length-31 binary shift register sequence x(i+5)=x(i+2)+x(i) mapped to
/// +-1, cyclically rotated by `shift`; building block of the secondary
/// sequences (exposed for tests).
std::vector<int> msequence31_s(int shift);

/// Pseudo-random scrambling bits: dual-LFSR generator, 1600-step warmup,
/// second register seeded with `cinit`.
std::vector<std::uint8_t> gold_sequence(std::uint32_t cinit, int count);

/// QPSK pilot values for one reference symbol: 2 per resource block,
/// seeded by (pci, slot, symbol position, CP mode). Returns n_rb * 2 values.
CVec crs_sequence(int pci, int slot, int symbol, CpMode cp, int n_rb);

/// Pilot subcarrier indices (within the occupied grid) for a reference
/// symbol: stride-6 lattice at offset (v(symbol) + pci) mod 6.
std::vector<int> crs_subcarrier_indices(int pci, int symbol,
                                        const Numerology& num);

/// Places a 62-value sequence on the central subcarriers of an
/// occupied-grid vector (31 below DC, 31 above, DC untouched).
void place_central62(CVec& grid, const CVec& seq62, const Numerology& num);

/// Extracts the 62 central subcarriers (inverse of place_central62).
CVec take_central62(const CVec& grid, const Numerology& num);

} // namespace a2g
