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
#include <unordered_set>

#include "gtest/gtest.h"
#include "twirlcert/oracle.hpp"

using namespace twirlcert;

namespace {

PauliOperator P(const char* text) {
    return PauliOperator::from_string(text);
}

PauliChannel random_pauli_channel(size_t n, size_t entries, RandomStream& rng) {
    PauliChannel channel;
    channel.num_qubits = n;
    if (n < 16) {
        entries = std::min(entries, (size_t{1} << (2 * n)));
    }
    std::vector<std::pair<PauliOperator, double>> raw;
    raw.emplace_back(PauliOperator(n), rng.uniform_unit() + 0.2);
    std::unordered_set<PauliOperator, PauliBitsHash, PauliBitsEqual> seen;
    seen.insert(raw[0].first);
    while (raw.size() < entries) {
        auto p = sample_uniform_weight(n, 1 + rng.uniform_below(n), rng);
        if (seen.insert(p).second) {
            raw.emplace_back(std::move(p), rng.uniform_unit());
        }
    }
    double total = 0.0;
    for (const auto& [p, weight] : raw) {
        total += weight;
    }
    for (auto& [p, weight] : raw) {
        channel.errors.emplace_back(p, weight / total);
    }
    channel.validate();
    return channel;
}

}  // namespace

TEST(channels, pauli_channel_validation) {
    PauliChannel good;
    good.num_qubits = 1;
    good.errors = {{P("I"), 0.7}, {P("X"), 0.3}};
    EXPECT_NO_THROW(good.validate());

    PauliChannel bad_sum = good;
    bad_sum.errors[1].second = 0.4;
    EXPECT_THROW(bad_sum.validate(), std::invalid_argument);

    PauliChannel duplicate = good;
    duplicate.errors.push_back({P("X"), 0.0});
    EXPECT_THROW(duplicate.validate(), std::invalid_argument);

    PauliChannel negative = good;
    negative.errors[0].second = 1.3;
    negative.errors[1].second = -0.3;
    EXPECT_THROW(negative.validate(), std::invalid_argument);

    PauliChannel signed_entry = good;
    signed_entry.errors[1].first = P("-X");
    EXPECT_THROW(signed_entry.validate(), std::invalid_argument);
}

TEST(channels, depolarizing_attenuation) {
    auto none = depolarizing(3, 0.0);
    auto full = depolarizing(3, 1.0);
    auto partial = depolarizing(3, 0.2);
    for (const char* text : {"XII", "IYI", "ZZZ", "XYZ"}) {
        EXPECT_EQ(attenuation(none, P(text)), 1.0);
        EXPECT_EQ(attenuation(full, P(text)), 0.0);
        EXPECT_DOUBLE_EQ(attenuation(partial, P(text)), 0.8);
    }
    EXPECT_EQ(attenuation(partial, P("III")), 1.0);
    EXPECT_THROW(depolarizing(3, 1.5), std::invalid_argument);
    EXPECT_THROW(depolarizing(3, -0.1), std::invalid_argument);
}

TEST(channels, depolarizing_sparse_expansion_matches) {
    auto closed = depolarizing(2, 0.3);
    auto sparse = expand_depolarizing(2, 0.3);
    EXPECT_EQ(sparse.errors.size(), 16u);
    for (size_t b = 0; b < 16; b++) {
        auto p = oracle::pauli_from_index(2, b);
        EXPECT_NEAR(attenuation(sparse, p), attenuation(closed, p), 1e-14);
    }
}

TEST(channels, pauli_channel_attenuation_example) {
    // {I: 0.7, X: 0.3} on Z -> 0.7 - 0.3 = 0.4
    PauliChannel channel;
    channel.num_qubits = 1;
    channel.errors = {{P("I"), 0.7}, {P("X"), 0.3}};
    EXPECT_DOUBLE_EQ(attenuation(channel, P("Z")), 0.4);
    EXPECT_DOUBLE_EQ(attenuation(channel, P("X")), 1.0);
    EXPECT_DOUBLE_EQ(attenuation(channel, P("Y")), 0.4);
    EXPECT_EQ(attenuation(channel, P("I")), 1.0);
    EXPECT_THROW(attenuation(channel, P("ZZ")), std::invalid_argument);
}

TEST(channels, dephasing_rate_map) {
    DephasingModel zero{{1.0, 2.0}, 0.0, DephasingMode::endpoint, {}};
    auto id_channel = dephasing(zero, 2);
    for (size_t b = 0; b < 16; b++) {
        EXPECT_DOUBLE_EQ(attenuation(id_channel, oracle::pauli_from_index(2, b)), 1.0);
    }

    // single qubit: attenuation of X is 1 - 2q = exp(-tau/T2)
    DephasingModel model{{2.0}, 2.0, DephasingMode::endpoint, {}};
    auto channel = dephasing(model, 1);
    double q = (1.0 - std::exp(-1.0)) / 2.0;
    EXPECT_NEAR(attenuation(channel, P("X")), 1.0 - 2.0 * q, 1e-15);
    EXPECT_NEAR(attenuation(channel, P("X")), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(attenuation(channel, P("Y")), std::exp(-1.0), 1e-15);
    EXPECT_DOUBLE_EQ(attenuation(channel, P("Z")), 1.0);

    // endpoint model attenuation agrees with its factorized channel
    DephasingModel multi{{1.0, 2.0, 0.5}, 0.7, DephasingMode::endpoint, {}};
    auto factorized = dephasing(multi, 3);
    for (size_t b = 0; b < 64; b++) {
        auto p = oracle::pauli_from_index(3, b);
        EXPECT_NEAR(attenuation(multi, p), attenuation(factorized, p), 1e-14);
    }

    EXPECT_THROW((DephasingModel{{0.0}, 1.0, DephasingMode::endpoint, {}}.validate()),
                 std::invalid_argument);
    EXPECT_THROW((DephasingModel{{1.0}, -1.0, DephasingMode::endpoint, {}}.validate()),
                 std::invalid_argument);
}

TEST(channels, factorized_matches_expanded_sparse) {
    RandomStream rng(101);
    for (size_t n : {1u, 2u, 3u}) {
        FactorizedChannel channel;
        channel.num_qubits = n;
        for (size_t j = 0; j < n; j++) {
            channel.factors.push_back(random_pauli_channel(1, 1 + rng.uniform_below(4), rng));
        }
        auto sparse = expand_factorized(channel);
        for (size_t b = 0; b < (size_t{1} << (2 * n)); b++) {
            auto p = oracle::pauli_from_index(n, b);
            EXPECT_NEAR(attenuation(channel, p), attenuation(sparse, p), 1e-12);
        }
    }
}

TEST(channels, attenuation_in_unit_interval) {
    RandomStream rng(102);
    // exhaustive over all Paulis for n <= 3
    for (size_t n : {1u, 2u, 3u}) {
        for (int i = 0; i < 10; i++) {
            auto channel = random_pauli_channel(n, 2 + rng.uniform_below(5), rng);
            for (size_t b = 0; b < (size_t{1} << (2 * n)); b++) {
                double a = attenuation(channel, oracle::pauli_from_index(n, b));
                EXPECT_GE(a, -1.0);
                EXPECT_LE(a, 1.0);
            }
        }
    }
    // randomized for larger n
    for (size_t n : {8u, 16u}) {
        auto channel = random_pauli_channel(n, 8, rng);
        for (int i = 0; i < 200; i++) {
            auto p = sample_uniform_weight(n, 1 + rng.uniform_below(n), rng);
            double a = attenuation(channel, p);
            EXPECT_GE(a, -1.0);
            EXPECT_LE(a, 1.0);
        }
    }
}

TEST(channels, composition_multiplies_attenuations) {
    RandomStream rng(103);
    NoiseModel composite;
    composite.num_qubits = 2;
    auto first = random_pauli_channel(2, 4, rng);
    auto second = depolarizing(2, 0.25);
    composite.components.push_back(first);
    composite.components.push_back(second);
    for (size_t b = 0; b < 16; b++) {
        auto p = oracle::pauli_from_index(2, b);
        EXPECT_NEAR(attenuation(composite, p), attenuation(first, p) * attenuation(second, p),
                    1e-14);
    }
}

TEST(channels, stepwise_z_diagonal_circuit_is_transparent) {
    // all-Z input through a Z-diagonal circuit keeps no transverse component
    DephasingModel model{{1.0, 1.0}, 5.0, DephasingMode::stepwise, {}};
    CircuitSpec circuit = CircuitSpec::parse(2, "ZZ90 1 2\nZ90 1\nS 2\n");
    EXPECT_DOUBLE_EQ(stepwise_attenuation(model, circuit, P("ZZ")), 1.0);
    EXPECT_DOUBLE_EQ(stepwise_attenuation(model, circuit, P("ZI")), 1.0);
}

TEST(channels, stepwise_exponent_additivity) {
    // a held single-qubit X picks up exp(-tau/T2) regardless of step count
    for (size_t steps : {1u, 2u, 5u, 10u}) {
        CircuitSpec circuit;
        circuit.num_qubits = 1;
        for (size_t k = 0; k < steps; k++) {
            circuit.gates.push_back({GateTag::X90, 0});  // X is invariant under X90
        }
        DephasingModel model{{2.0}, 3.0, DephasingMode::stepwise, {}};
        EXPECT_NEAR(stepwise_attenuation(model, circuit, P("X")), std::exp(-1.5), 1e-14)
            << steps;
    }
}

TEST(channels, stepwise_block_regression_value) {
    // Z_2 through the (2,1) block: transverse on qubit 2 for the first two of
    // three equal steps, so the factor is exp(-2 tau / (3 T2)). At tau = T2
    // this is exp(-2/3); the endpoint factor on the output Z_2 Z_1 alone is 1.
    DephasingModel model{{1.0, 1.0}, 1.0, DephasingMode::stepwise, {}};
    CircuitSpec circuit = block_circuit(2, 1, 0);
    double factor = stepwise_attenuation(model, circuit, P("IZ"));
    EXPECT_NEAR(factor, std::exp(-2.0 / 3.0), 1e-14);
    EXPECT_NEAR(factor, 0.513417119032592, 1e-12);

    DephasingModel endpoint{{1.0, 1.0}, 1.0, DephasingMode::endpoint, {}};
    double endpoint_factor = attenuation(endpoint, P("ZZ"));
    EXPECT_DOUBLE_EQ(endpoint_factor, 1.0);
    EXPECT_LE(factor, endpoint_factor);
}

TEST(channels, stepwise_matches_dense_interleaved_product) {
    // The scalable stepwise path must agree with the dense interleaved
    // transfer-matrix product on the full noisy-gate channel.
    DephasingModel model{{1.3, 0.8}, 0.9, DephasingMode::stepwise, {}};
    NoisyGate gate;
    gate.num_qubits = 2;
    gate.circuit = block_circuit(2, 1, 0);
    gate.ideal = from_circuit(*gate.circuit);
    gate.noise.num_qubits = 2;
    gate.noise.components.push_back(model);
    gate.validate();

    auto dense = oracle::densify(gate);
    for (size_t b = 1; b < 16; b++) {
        auto input = oracle::pauli_from_index(2, b);
        auto observable = conjugate(gate.ideal, input);
        double scalable = gate_overlap(gate, input, observable);
        double sign = observable.phase() == 2 ? -1.0 : 1.0;
        double from_ptm = sign * dense.ptm(static_cast<Eigen::Index>(oracle::pauli_index(observable)),
                                           static_cast<Eigen::Index>(b));
        EXPECT_NEAR(scalable, from_ptm, 1e-12) << input.str();
    }
}

TEST(channels, stepwise_durations) {
    DephasingModel model{{1.0}, 1.0, DephasingMode::stepwise, {0.25, 0.75}};
    CircuitSpec circuit;
    circuit.num_qubits = 1;
    circuit.gates = {{GateTag::X90, 0}, {GateTag::X90, 0}};
    EXPECT_NEAR(stepwise_attenuation(model, circuit, P("X")), std::exp(-1.0), 1e-14);

    DephasingModel wrong{{1.0}, 1.0, DephasingMode::stepwise, {0.25}};
    EXPECT_THROW(stepwise_attenuation(wrong, circuit, P("X")), std::invalid_argument);

    DephasingModel endpoint{{1.0}, 1.0, DephasingMode::endpoint, {}};
    EXPECT_THROW(stepwise_attenuation(endpoint, circuit, P("X")), std::invalid_argument);
    EXPECT_THROW(attenuation(model, P("X")), std::invalid_argument);
}

TEST(channels, noisy_gate_validation) {
    NoisyGate gate;
    gate.num_qubits = 2;
    gate.ideal = identity_tableau(2);
    gate.noise.num_qubits = 2;
    gate.noise.components.push_back(
        DephasingModel{{1.0, 1.0}, 1.0, DephasingMode::stepwise, {}});
    EXPECT_THROW(gate.validate(), std::invalid_argument);  // stepwise without circuit
    gate.circuit = block_circuit(2, 0, 1);
    EXPECT_NO_THROW(gate.validate());

    NoisyGate mismatched;
    mismatched.num_qubits = 2;
    mismatched.ideal = identity_tableau(3);
    mismatched.noise.num_qubits = 2;
    EXPECT_THROW(mismatched.validate(), std::invalid_argument);
}

TEST(channels, gate_overlap_uses_output_frame) {
    // noise after the ideal gate: the attenuation is evaluated on the
    // conjugated observable, not the input
    NoisyGate gate;
    gate.num_qubits = 2;
    gate.circuit = block_circuit(2, 1, 0);
    gate.ideal = from_circuit(*gate.circuit);
    gate.noise.num_qubits = 2;
    gate.noise.components.push_back(
        DephasingModel{{1.0, 1.0}, 1.0, DephasingMode::endpoint, {}});
    gate.validate();

    // Z_2 -> Z_2 Z_1 has no transverse part: overlap 1
    auto input = P("IZ");
    EXPECT_DOUBLE_EQ(gate_overlap(gate, input, conjugate(gate.ideal, input)), 1.0);
    // X_2 -> -Z_2 X_1... the observable's transverse weight decides
    auto input2 = P("IX");
    auto observable2 = conjugate(gate.ideal, input2);
    DephasingModel model{{1.0, 1.0}, 1.0, DephasingMode::endpoint, {}};
    EXPECT_DOUBLE_EQ(gate_overlap(gate, input2, observable2),
                     attenuation(model, observable2));
}
