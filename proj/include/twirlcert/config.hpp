// Copyright 2026 The twirlcert authors
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

#ifndef TWIRLCERT_CONFIG_HPP
#define TWIRLCERT_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twirlcert/channels.hpp"
#include "twirlcert/estimator.hpp"

namespace twirlcert {

// Validation failures carry the offending section.key in the message and map
// to CLI exit code 1; size-cap violations map to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

class CapExceeded : public std::runtime_error {
  public:
    explicit CapExceeded(const std::string& message) : std::runtime_error(message) {}
};

enum class Backend { scalable, dense };
enum class GateKind { spreader, circuit };

struct RunConfig {
    // [system]
    size_t n = 0;
    Backend backend = Backend::scalable;

    // [gate]
    GateKind gate_kind = GateKind::spreader;
    uint32_t seed_qubit = 0;  // 0-based (1-based in the file)
    std::optional<std::vector<std::pair<uint32_t, uint32_t>>> chain;
    std::string circuit_file;
    std::string circuit_text;  // inline alternative to circuit_file (tests)

    // [noise]
    NoiseModel noise;
    std::optional<NoiseModel> spam_prep;
    std::optional<NoiseModel> spam_meas;
    std::optional<double> amplitude_damping_gamma;  // dense-oracle-only noise

    // [sampling]
    double epsilon = 0.01;
    double delta = 0.04;
    std::pair<double, double> range{0.0, 1.0};
    std::optional<uint32_t> shots;  // nullopt = exact
    std::optional<uint64_t> m_override;
    std::optional<uint64_t> seed;
    bool bootstrap = false;

    // [output]
    std::string json_path = "report.json";
    std::string csv_path = "report.csv";
    std::vector<double> t_placeholder;  // per-weight preparation times (config-supplied)
};

// Parses the sectioned key=value config text. Unknown sections or keys and
// out-of-domain values raise ConfigError naming the field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Builders resolving the configured gate and plan. build_noisy_gate reads the
// circuit file when the gate kind is `circuit`.
CircuitSpec build_gate_circuit(const RunConfig& config);
NoisyGate build_noisy_gate(const RunConfig& config);
SamplingPlan build_sampling_plan(const RunConfig& config);

// Inline noise grammar used for SPAM and composite components, e.g.
// "depolarizing(p=0.1)" or "dephasing(tau=0.08 t2=1.5,2.0 mode=stepwise)".
NoiseComponent parse_noise_component(const std::string& text, size_t n);

}  // namespace twirlcert

#endif
