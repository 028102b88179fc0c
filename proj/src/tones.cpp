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
#include "a2g/tones.hpp"

#include "a2g/sequences.hpp"

namespace a2g {

std::vector<double> central62_freqs(const Numerology& num) {
  std::vector<double> f(62);
  for (int n = 0; n < 31; ++n) f[n] = (n - 31) * num.subcarrier_spacing;
  for (int n = 31; n < 62; ++n) f[n] = (n - 30) * num.subcarrier_spacing;
  return f;
}

std::vector<double> crs_pilot_freqs(int pci, int symbol,
                                    const Numerology& num) {
  const auto idx = crs_subcarrier_indices(pci, symbol, num);
  std::vector<double> f(idx.size());
  for (std::size_t m = 0; m < idx.size(); ++m)
    f[m] = num.subcarrier_offset(idx[m]) * num.subcarrier_spacing;
  return f;
}

CVec tone_dft(std::span<const cplx> seg, const std::vector<double>& freqs,
              double fs) {
  CVec out(freqs.size());
  for (std::size_t t = 0; t < freqs.size(); ++t) {
    const double w = -kTwoPi * freqs[t] / fs;
    // phase recurrence keeps the inner loop trig-free
    const cplx rot = std::polar(1.0, w);
    cplx ph{1.0, 0.0};
    cplx acc = 0.0;
    for (const auto& s : seg) {
      acc += s * ph;
      ph *= rot;
    }
    out[t] = acc;
  }
  return out;
}

} // namespace a2g
