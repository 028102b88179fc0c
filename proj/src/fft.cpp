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
#include "a2g/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace a2g {
namespace {

std::mutex g_plan_mutex;

// One cached plan per (size, direction). Plans are created with
// FFTW_ESTIMATE against a scratch buffer and executed via the new-array
// interface, so they can run concurrently on caller-owned buffers.
fftw_plan get_plan(std::size_t n, int sign) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_complex* scratch = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  cache[key] = p;
  return p;
}

CVec run(const CVec& x, int sign) {
  CVec out(x);
  if (x.empty()) return out;
  fftw_plan p = get_plan(x.size(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(p, buf, buf);
  return out;
}

} // namespace

CVec fft(const CVec& x) { return run(x, FFTW_FORWARD); }

CVec ifft(const CVec& X) {
  CVec out = run(X, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(X.empty() ? 1 : X.size());
  for (auto& v : out) v *= s;
  return out;
}

CVec fft_unitary(const CVec& x) {
  CVec out = run(x, FFTW_FORWARD);
  const double s = 1.0 / std::sqrt(static_cast<double>(x.empty() ? 1 : x.size()));
  for (auto& v : out) v *= s;
  return out;
}

CVec ifft_unitary(const CVec& X) {
  CVec out = run(X, FFTW_BACKWARD);
  const double s = 1.0 / std::sqrt(static_cast<double>(X.empty() ? 1 : X.size()));
  for (auto& v : out) v *= s;
  return out;
}

} // namespace a2g
