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

#ifndef TWIRLCERT_CHANNELS_HPP
#define TWIRLCERT_CHANNELS_HPP

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "twirlcert/clifford.hpp"
#include "twirlcert/pauli.hpp"

namespace twirlcert {

// Stochastic Pauli channel: apply error E with probability p_E. Entries are
// distinct unsigned Paulis; probabilities are nonnegative and sum to 1
// within 1e-12 (validated).
struct PauliChannel {
    size_t num_qubits = 0;
    std::vector<std::pair<PauliOperator, double>> errors;

    void validate() const;
};

// Tensor product of independent single-qubit Pauli channels.
struct FactorizedChannel {
    size_t num_qubits = 0;
    std::vector<PauliChannel> factors;  // one per qubit

    void validate() const;
};

enum class DephasingMode { endpoint, stepwise };

// Per-qubit T2 dephasing over a gate of duration tau. In endpoint mode the
// whole attenuation is applied to the output Pauli; in stepwise mode it is
// accumulated while the Pauli propagates through the gate's circuit, with
// per-step durations defaulting to tau/|circuit|.
struct DephasingModel {
    std::vector<double> t2;  // one entry per qubit
    double tau = 0.0;
    DephasingMode mode = DephasingMode::endpoint;
    std::vector<double> step_durations;  // optional; must match circuit length when set

    void validate() const;
};

// Global depolarizing channel: with probability p the state is replaced by
// the maximally mixed state, so every non-identity Pauli is attenuated by
// exactly (1-p). Kept in closed form so it scales past the sparse-table
// regime; expand_depolarizing() gives the equivalent sparse table for small n.
struct GlobalDepolarizing {
    size_t num_qubits = 0;
    double p = 0.0;

    void validate() const;
};

using NoiseComponent =
    std::variant<PauliChannel, FactorizedChannel, DephasingModel, GlobalDepolarizing>;

// A composition of noise components. All components are diagonal in the Pauli
// basis, so attenuations multiply and the composition order is immaterial.
struct NoiseModel {
    size_t num_qubits = 0;
    std::vector<NoiseComponent> components;

    void validate() const;
    bool has_stepwise_dephasing() const;
    std::vector<const DephasingModel*> dephasing_components() const;
};

// The noisy gate U~ = noise after ideal. `circuit` is the realizing gate
// sequence; it is required when any dephasing component runs in stepwise
// mode. SPAM channels, when present, wrap preparation and measurement and
// are calibrated away by the estimator's reference-ratio logic.
struct NoisyGate {
    size_t num_qubits = 0;
    CliffordTableau ideal;
    std::optional<CircuitSpec> circuit;
    NoiseModel noise;
    std::optional<NoiseModel> spam_prep;
    std::optional<NoiseModel> spam_meas;

    void validate() const;
};

GlobalDepolarizing depolarizing(size_t n, double p);

// Sparse table form of the global depolarizing channel (4^n entries); n <= 8.
PauliChannel expand_depolarizing(size_t n, double p);

// Expands a factorized channel into its sparse table (n <= 8).
PauliChannel expand_factorized(const FactorizedChannel& channel);

// Endpoint form of a dephasing model: per-qubit Z-error channel with
// q_j = (1 - exp(-tau/T2_j)) / 2.
FactorizedChannel dephasing(const DephasingModel& model, size_t n);

// Attenuation of the Pauli observable p under the channel: the factor by
// which the channel scales p in the Pauli basis. Signs of p are ignored
// (attenuation depends on the unsigned part only). Always in [-1, 1].
double attenuation(const PauliChannel& channel, const PauliOperator& p);
double attenuation(const FactorizedChannel& channel, const PauliOperator& p);
double attenuation(const GlobalDepolarizing& channel, const PauliOperator& p);
// Endpoint attenuation of a dephasing model (throws for stepwise mode, which
// needs the circuit; see stepwise_attenuation).
double attenuation(const DephasingModel& model, const PauliOperator& p);
// Product over components; throws if any component is stepwise dephasing.
double attenuation(const NoiseModel& noise, const PauliOperator& p);

// Propagates p through the circuit gate by gate, multiplying in
// exp(-dt/T2_j) for every qubit j left with a transverse (X or Y) component
// after each step. Step durations come from the model or default to
// tau/|circuit|.
double stepwise_attenuation(const DephasingModel& model, const CircuitSpec& circuit,
                            const PauliOperator& p);

// The exact expected overlap x = Tr(U~(rho) M) / 2^n for input Pauli rho and
// observable M = U rho U^dag, under the gate's noise (SPAM excluded; the
// estimator handles SPAM via calibration ratios).
double gate_overlap(const NoisyGate& gate, const PauliOperator& input,
                    const PauliOperator& observable);

// Attenuation a SPAM channel applies to a Pauli (used for both the raw
// signal and the reference calibration signal).
double spam_attenuation(const std::optional<NoiseModel>& spam, const PauliOperator& p);

}  // namespace twirlcert

#endif
