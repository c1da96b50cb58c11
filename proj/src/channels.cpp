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

#include "twirlcert/channels.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace twirlcert {

namespace {
constexpr double kProbabilitySumTolerance = 1e-12;
}

void PauliChannel::validate() const {
    if (num_qubits == 0) {
        throw std::invalid_argument("pauli channel: qubit count must be positive");
    }
    double total = 0.0;
    std::unordered_set<PauliOperator, PauliBitsHash, PauliBitsEqual> seen;
    for (const auto& [error, prob] : errors) {
        if (error.num_qubits() != num_qubits) {
            throw std::invalid_argument("pauli channel: entry dimension mismatch");
        }
        if (error.phase() != 0) {
            throw std::invalid_argument("pauli channel: entries must carry phase +1");
        }
        if (prob < 0.0) {
            throw std::invalid_argument("pauli channel: negative probability");
        }
        if (!seen.insert(error).second) {
            throw std::invalid_argument("pauli channel: duplicate entry " + error.str());
        }
        total += prob;
    }
    if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
        throw std::invalid_argument("pauli channel: probabilities sum to " +
                                    std::to_string(total) + ", expected 1");
    }
}

void FactorizedChannel::validate() const {
    if (factors.size() != num_qubits) {
        throw std::invalid_argument("factorized channel: need one factor per qubit");
    }
    for (const auto& factor : factors) {
        if (factor.num_qubits != 1) {
            throw std::invalid_argument("factorized channel: factors must be single-qubit");
        }
        factor.validate();
    }
}

void DephasingModel::validate() const {
    if (t2.empty()) {
        throw std::invalid_argument("dephasing: need at least one T2 value");
    }
    for (double value : t2) {
        if (!(value > 0.0)) {
            throw std::invalid_argument("dephasing: T2 must be positive");
        }
    }
    if (!(tau >= 0.0)) {
        throw std::invalid_argument("dephasing: tau must be nonnegative");
    }
    for (double d : step_durations) {
        if (!(d >= 0.0)) {
            throw std::invalid_argument("dephasing: step durations must be nonnegative");
        }
    }
}

void GlobalDepolarizing::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("depolarizing: p must lie in [0, 1]");
    }
}

void NoiseModel::validate() const {
    for (const auto& component : components) {
        std::visit([&](const auto& c) { c.validate(); }, component);
        if (const auto* pc = std::get_if<PauliChannel>(&component)) {
            if (pc->num_qubits != num_qubits) {
                throw std::invalid_argument("noise: component dimension mismatch");
            }
        } else if (const auto* fc = std::get_if<FactorizedChannel>(&component)) {
            if (fc->num_qubits != num_qubits) {
                throw std::invalid_argument("noise: component dimension mismatch");
            }
        } else if (const auto* dm = std::get_if<DephasingModel>(&component)) {
            if (dm->t2.size() != num_qubits) {
                throw std::invalid_argument("noise: dephasing needs one T2 per qubit");
            }
        } else if (const auto* gd = std::get_if<GlobalDepolarizing>(&component)) {
            if (gd->num_qubits != num_qubits) {
                throw std::invalid_argument("noise: component dimension mismatch");
            }
        }
    }
}

bool NoiseModel::has_stepwise_dephasing() const {
    for (const auto& component : components) {
        if (const auto* dm = std::get_if<DephasingModel>(&component)) {
            if (dm->mode == DephasingMode::stepwise) {
                return true;
            }
        }
    }
    return false;
}

std::vector<const DephasingModel*> NoiseModel::dephasing_components() const {
    std::vector<const DephasingModel*> found;
    for (const auto& component : components) {
        if (const auto* dm = std::get_if<DephasingModel>(&component)) {
            found.push_back(dm);
        }
    }
    return found;
}

void NoisyGate::validate() const {
    if (ideal.num_qubits() != num_qubits) {
        throw std::invalid_argument("noisy gate: tableau dimension mismatch");
    }
    noise.validate();
    if (noise.num_qubits != num_qubits) {
        throw std::invalid_argument("noisy gate: noise dimension mismatch");
    }
    if (circuit) {
        circuit->validate();
        if (circuit->num_qubits != num_qubits) {
            throw std::invalid_argument("noisy gate: circuit dimension mismatch");
        }
    }
    if (noise.has_stepwise_dephasing() && !circuit) {
        throw std::invalid_argument("noisy gate: stepwise dephasing requires a gate circuit");
    }
    for (const auto* spam : {&spam_prep, &spam_meas}) {
        if (spam->has_value()) {
            (*spam)->validate();
            if ((*spam)->num_qubits != num_qubits) {
                throw std::invalid_argument("noisy gate: SPAM dimension mismatch");
            }
            if ((*spam)->has_stepwise_dephasing()) {
                throw std::invalid_argument("noisy gate: SPAM channels cannot be stepwise");
            }
        }
    }
}

GlobalDepolarizing depolarizing(size_t n, double p) {
    GlobalDepolarizing channel{n, p};
    channel.validate();
    return channel;
}

PauliChannel expand_depolarizing(size_t n, double p) {
    if (n > 8) {
        throw std::invalid_argument("expand_depolarizing: sparse table capped at n <= 8");
    }
    GlobalDepolarizing{n, p}.validate();
    size_t count = size_t{1} << (2 * n);
    PauliChannel channel;
    channel.num_qubits = n;
    channel.errors.reserve(count);
    double uniform = p / static_cast<double>(count);
    for (size_t index = 0; index < count; index++) {
        PauliOperator error(n);
        size_t digits = index;
        for (size_t j = 0; j < n; j++) {
            error.set_axis(j, static_cast<int>(digits & 3));
            digits >>= 2;
        }
        double prob = uniform + (index == 0 ? 1.0 - p : 0.0);
        channel.errors.emplace_back(std::move(error), prob);
    }
    channel.validate();
    return channel;
}

PauliChannel expand_factorized(const FactorizedChannel& channel) {
    channel.validate();
    size_t n = channel.num_qubits;
    if (n > 8) {
        throw std::invalid_argument("expand_factorized: sparse table capped at n <= 8");
    }
    PauliChannel out;
    out.num_qubits = n;
    out.errors.emplace_back(PauliOperator(n), 1.0);
    for (size_t j = 0; j < n; j++) {
        std::vector<std::pair<PauliOperator, double>> next;
        next.reserve(out.errors.size() * channel.factors[j].errors.size());
        for (const auto& [prefix, prob] : out.errors) {
            for (const auto& [factor, fprob] : channel.factors[j].errors) {
                PauliOperator combined = prefix;
                combined.set_x_bit(j, factor.x_bit(0));
                combined.set_z_bit(j, factor.z_bit(0));
                next.emplace_back(std::move(combined), prob * fprob);
            }
        }
        out.errors = std::move(next);
    }
    out.validate();
    return out;
}

FactorizedChannel dephasing(const DephasingModel& model, size_t n) {
    model.validate();
    if (model.t2.size() != n) {
        throw std::invalid_argument("dephasing: need one T2 per qubit");
    }
    FactorizedChannel channel;
    channel.num_qubits = n;
    channel.factors.reserve(n);
    for (size_t j = 0; j < n; j++) {
        double q = (1.0 - std::exp(-model.tau / model.t2[j])) / 2.0;
        PauliChannel factor;
        factor.num_qubits = 1;
        factor.errors.emplace_back(PauliOperator(1), 1.0 - q);
        factor.errors.emplace_back(PauliOperator::single(1, 0, 'Z'), q);
        channel.factors.push_back(std::move(factor));
    }
    return channel;
}

double attenuation(const PauliChannel& channel, const PauliOperator& p) {
    if (channel.num_qubits != p.num_qubits()) {
        throw std::invalid_argument("attenuation: dimension mismatch");
    }
    double total = 0.0;
    for (const auto& [error, prob] : channel.errors) {
        total += commutes(error, p) ? prob : -prob;
    }
    // the probability-sum tolerance (1e-12) can push the sum past +-1
    return std::min(1.0, std::max(-1.0, total));
}

double attenuation(const FactorizedChannel& channel, const PauliOperator& p) {
    if (channel.num_qubits != p.num_qubits()) {
        throw std::invalid_argument("attenuation: dimension mismatch");
    }
    double product = 1.0;
    for (size_t j = 0; j < channel.num_qubits; j++) {
        PauliOperator site(1);
        site.set_x_bit(0, p.x_bit(j));
        site.set_z_bit(0, p.z_bit(j));
        product *= attenuation(channel.factors[j], site);
    }
    return product;
}

double attenuation(const GlobalDepolarizing& channel, const PauliOperator& p) {
    if (channel.num_qubits != p.num_qubits()) {
        throw std::invalid_argument("attenuation: dimension mismatch");
    }
    return p.is_identity_bits() ? 1.0 : 1.0 - channel.p;
}

double attenuation(const DephasingModel& model, const PauliOperator& p) {
    if (model.mode == DephasingMode::stepwise) {
        throw std::invalid_argument(
            "attenuation: stepwise dephasing needs the gate circuit (stepwise_attenuation)");
    }
    if (model.t2.size() != p.num_qubits()) {
        throw std::invalid_argument("attenuation: dimension mismatch");
    }
    double factor = 1.0;
    for (size_t j = 0; j < p.num_qubits(); j++) {
        if (p.x_bit(j)) {  // X or Y component is transverse
            factor *= std::exp(-model.tau / model.t2[j]);
        }
    }
    return factor;
}

double attenuation(const NoiseModel& noise, const PauliOperator& p) {
    double product = 1.0;
    for (const auto& component : noise.components) {
        product *= std::visit([&](const auto& c) { return attenuation(c, p); }, component);
    }
    return product;
}

double stepwise_attenuation(const DephasingModel& model, const CircuitSpec& circuit,
                            const PauliOperator& p) {
    model.validate();
    if (model.mode != DephasingMode::stepwise) {
        throw std::invalid_argument("stepwise_attenuation: model is not in stepwise mode");
    }
    if (model.t2.size() != circuit.num_qubits || p.num_qubits() != circuit.num_qubits) {
        throw std::invalid_argument("stepwise_attenuation: dimension mismatch");
    }
    if (!model.step_durations.empty() && model.step_durations.size() != circuit.gates.size()) {
        throw std::invalid_argument(
            "stepwise_attenuation: step durations do not match the circuit length");
    }
    if (circuit.gates.empty()) {
        return 1.0;
    }
    double default_step = model.tau / static_cast<double>(circuit.gates.size());
    PauliOperator current = p;
    double log_factor = 0.0;
    size_t n = circuit.num_qubits;
    for (size_t k = 0; k < circuit.gates.size(); k++) {
        const auto& g = circuit.gates[k];
        CliffordTableau gate =
            elementary(n, g.tag, g.q0, gate_is_two_qubit(g.tag) ? g.q1 : UINT32_MAX);
        current = conjugate(gate, current);
        double dt = model.step_durations.empty() ? default_step : model.step_durations[k];
        for (size_t j = 0; j < n; j++) {
            if (current.x_bit(j)) {
                log_factor -= dt / model.t2[j];
            }
        }
    }
    return std::exp(log_factor);
}

double gate_overlap(const NoisyGate& gate, const PauliOperator& input,
                    const PauliOperator& observable) {
    double product = 1.0;
    for (const auto& component : gate.noise.components) {
        if (const auto* dm = std::get_if<DephasingModel>(&component)) {
            if (dm->mode == DephasingMode::stepwise) {
                if (!gate.circuit) {
                    throw std::invalid_argument(
                        "gate_overlap: stepwise dephasing requires a gate circuit");
                }
                product *= stepwise_attenuation(*dm, *gate.circuit, input);
                continue;
            }
        }
        product *=
            std::visit([&](const auto& c) { return attenuation(c, observable); }, component);
    }
    return product;
}

double spam_attenuation(const std::optional<NoiseModel>& spam, const PauliOperator& p) {
    return spam ? attenuation(*spam, p) : 1.0;
}

}  // namespace twirlcert
