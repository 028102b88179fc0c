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

#include <string>

#include "a2g/common.hpp"

namespace a2g {

/// Complex baseband capture with its metadata sidecar.
struct IqTrace {
  CVec samples;
  double sample_rate_hz = 0.0;
  double center_freq_hz = 0.0;
  double start_time_s = 0.0;
  std::string description;

  double duration() const {
    return sample_rate_hz > 0 ? samples.size() / sample_rate_hz : 0.0;
  }
};

/// Writes interleaved little-endian float32 (I,Q) pairs to `path` and a JSON
/// sidecar to `path + ".json"`.
void write_iq(const std::string& path, const IqTrace& trace);

/// Reads an IQ file and its sidecar. Throws ConfigError if either is
/// missing or malformed.
IqTrace read_iq(const std::string& path);

} // namespace a2g
