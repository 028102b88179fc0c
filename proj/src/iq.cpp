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
#include "a2g/iq.hpp"

#include <fstream>
#include <vector>

#include "json.hpp"

namespace a2g {

void write_iq(const std::string& path, const IqTrace& trace) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("write_iq: cannot open " + path);
  std::vector<float> buf(trace.samples.size() * 2);
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    buf[2 * i] = static_cast<float>(trace.samples[i].real());
    buf[2 * i + 1] = static_cast<float>(trace.samples[i].imag());
  }
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!f) throw ConfigError("write_iq: short write to " + path);

  nlohmann::json meta = {{"sample_rate_hz", trace.sample_rate_hz},
                         {"center_freq_hz", trace.center_freq_hz},
                         {"start_time_s", trace.start_time_s},
                         {"description", trace.description}};
  std::ofstream m(path + ".json");
  if (!m) throw ConfigError("write_iq: cannot open sidecar for " + path);
  m << meta.dump(2) << "\n";
}

IqTrace read_iq(const std::string& path) {
  std::ifstream m(path + ".json");
  if (!m) throw ConfigError("read_iq: missing sidecar " + path + ".json");
  nlohmann::json meta;
  try {
    m >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("read_iq: bad sidecar: " + std::string(e.what()));
  }
  IqTrace trace;
  trace.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
  trace.center_freq_hz = meta.value("center_freq_hz", 0.0);
  trace.start_time_s = meta.value("start_time_s", 0.0);
  trace.description = meta.value("description", std::string{});

  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("read_iq: cannot open " + path);
  f.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(f.tellg());
  f.seekg(0);
  if (bytes % (2 * sizeof(float)) != 0)
    throw ConfigError("read_iq: truncated IQ file " + path);
  std::vector<float> buf(bytes / sizeof(float));
  f.read(reinterpret_cast<char*>(buf.data()),
         static_cast<std::streamsize>(bytes));
  if (!f) throw ConfigError("read_iq: short read from " + path);
  trace.samples.resize(buf.size() / 2);
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    trace.samples[i] = {buf[2 * i], buf[2 * i + 1]};
  return trace;
}

} // namespace a2g
