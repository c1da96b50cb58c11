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

#include "twirlcert/oracle.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <unordered_set>

#include "gtest/gtest.h"

using namespace twirlcert;
using oracle::DenseChannel;

namespace {

PauliOperator P(const char* text) {
    return PauliOperator::from_string(text);
}

PauliChannel random_pauli_channel(size_t n, size_t entries, RandomStream& rng) {
    entries = std::min(entries, size_t{1} << (2 * n));
    PauliChannel channel;
    channel.num_qubits = n;
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

DenseChannel densify_channel(const PauliChannel& channel) {
    NoiseModel model;
    model.num_qubits = channel.num_qubits;
    model.components.push_back(channel);
    return oracle::densify(model, channel.num_qubits);
}

}  // namespace

TEST(oracle, pauli_index_round_trip) {
    for (size_t n : {1u, 2u, 3u}) {
        for (size_t b = 0; b < (size_t{1} << (2 * n)); b++) {
            auto p = oracle::pauli_from_index(n, b);
            EXPECT_EQ(oracle::pauli_index(p), b);
        }
    }
    // qubit 1 is the most significant digit
    EXPECT_EQ(oracle::pauli_index(P("XI")), 4u);
    EXPECT_EQ(oracle::pauli_index(P("IX")), 1u);
    EXPECT_EQ(oracle::pauli_index(P("ZZ")), 15u);
}

TEST(oracle, dense_pauli_matrices) {
    auto x = oracle::dense_pauli(P("X"));
    auto y = oracle::dense_pauli(P("Y"));
    auto z = oracle::dense_pauli(P("Z"));
    EXPECT_NEAR(std::abs(x(0, 1) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(y(1, 0) - std::complex<double>(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(z(1, 1) + 1.0), 0.0, 1e-15);
    // XZ = -iY
    auto xz = x * z;
    auto minus_iy = oracle::dense_pauli(P("-iY"));
    EXPECT_LT((xz - minus_iy).cwiseAbs().maxCoeff(), 1e-15);
    // tensor structure and signs survive round trips through multiply()
    auto yz = oracle::dense_pauli(P("YZ"));
    auto ref = Eigen::kroneckerProduct(y, z).eval();
    EXPECT_LT((yz - ref).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(oracle, ptm_of_identity_and_hadamard) {
    auto id_ptm = oracle::ptm_of_tableau(identity_tableau(2));
    EXPECT_LT((id_ptm - oracle::Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-15);

    auto h = oracle::densify(CircuitSpec::parse(1, "H 1\n"));
    // H swaps the X and Z rows and flips Y
    oracle::Matrix expected(4, 4);
    expected << 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0;
    EXPECT_LT((h.ptm - expected).cwiseAbs().maxCoeff(), 1e-12);

    // unitary-channel PTMs agree between the float and exact builders
    auto h_exact = oracle::ptm_of_tableau(from_circuit(CircuitSpec::parse(1, "H 1\n")));
    EXPECT_LT((h.ptm - h_exact).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(oracle, ptm_trace_preservation_row) {
    RandomStream rng(7);
    auto channel = densify_channel(random_pauli_channel(2, 6, rng));
    for (size_t col = 0; col < 16; col++) {
        double expected = col == 0 ? 1.0 : 0.0;
        EXPECT_NEAR(channel.ptm(0, static_cast<Eigen::Index>(col)), expected, 1e-10);
    }
    auto damping = oracle::amplitude_damping(2, {0.3, 0.5});
    for (size_t col = 0; col < 16; col++) {
        double expected = col == 0 ? 1.0 : 0.0;
        EXPECT_NEAR(damping.ptm(0, static_cast<Eigen::Index>(col)), expected, 1e-10);
    }
}

TEST(oracle, tableau_ptm_is_orthogonal) {
    RandomStream rng(8);
    for (size_t n : {1u, 2u, 3u}) {
        auto t = from_circuit(random_circuit(n, 15, rng));
        auto r = oracle::ptm_of_tableau(t);
        size_t pdim = size_t{1} << (2 * n);
        EXPECT_LT((r * r.transpose() -
                   oracle::Matrix::Identity(static_cast<Eigen::Index>(pdim),
                                            static_cast<Eigen::Index>(pdim)))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-15);
    }
}

TEST(oracle, depolarizing_ptm_diagonal) {
    NoiseModel model;
    model.num_qubits = 1;
    model.components.push_back(depolarizing(1, 0.1));
    auto channel = oracle::densify(model, 1);
    oracle::Matrix expected = oracle::Matrix::Zero(4, 4);
    expected.diagonal() << 1.0, 0.9, 0.9, 0.9;
    EXPECT_LT((channel.ptm - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(oracle, exact_pr0_values) {
    // identity channel
    NoiseModel none;
    none.num_qubits = 2;
    EXPECT_DOUBLE_EQ(oracle::exact_pr0(oracle::densify(none, 2)), 1.0);

    // n=1 depolarizing p=0.1: (1 + 3*0.9)/4 = 0.925
    NoiseModel depol;
    depol.num_qubits = 1;
    depol.components.push_back(depolarizing(1, 0.1));
    EXPECT_NEAR(oracle::exact_pr0(oracle::densify(depol, 1)), 0.925, 1e-14);

    // n=2 dephasing with flip probabilities q=(0.1,0.2): the PTM trace
    // factorizes into per-qubit (2 + 2(1-2q_j))/4 = 1-q_j, so
    // Pr(0) = 0.9 * 0.8 = 0.72, cross-checked against the full 16x16 PTM.
    double q1 = 0.1, q2 = 0.2;
    double t2_1 = 1.0, t2_2 = 1.0;
    // invert q = (1-exp(-tau/T2))/2 at tau=1 to hit the target flip rates
    t2_1 = -1.0 / std::log(1.0 - 2.0 * q1);
    t2_2 = -1.0 / std::log(1.0 - 2.0 * q2);
    DephasingModel model{{t2_1, t2_2}, 1.0, DephasingMode::endpoint, {}};
    NoiseModel dephase;
    dephase.num_qubits = 2;
    dephase.components.push_back(model);
    auto dense = oracle::densify(dephase, 2);
    double factorized = (1.0 - q1) * (1.0 - q2);
    EXPECT_NEAR(oracle::exact_pr0(dense), factorized, 1e-12);
    EXPECT_NEAR(oracle::exact_pr0(dense), 0.72, 1e-12);

    // the same value through the Kraus builder (per-qubit Z-flip mixture)
    auto factor_channel = dephasing(model, 2);
    auto sparse = expand_factorized(factor_channel);
    EXPECT_NEAR(oracle::exact_pr0(densify_channel(sparse)), 0.72, 1e-12);
}

TEST(oracle, exact_pr0_of_pauli_channel_is_identity_probability) {
    RandomStream rng(9);
    for (size_t n : {1u, 2u, 3u}) {
        for (int i = 0; i < 10; i++) {
            auto channel = random_pauli_channel(n, 6, rng);
            double p_identity = 0.0;
            for (const auto& [error, prob] : channel.errors) {
                if (error.is_identity_bits()) {
                    p_identity = prob;
                }
            }
            auto dense = densify_channel(channel);
            EXPECT_NEAR(oracle::exact_pr0(dense), p_identity, 1e-12);
            // frame conjugation leaves Pr(0) invariant
            auto frame = from_circuit(random_circuit(n, 12, rng));
            auto r_u = oracle::ptm_of_tableau(frame);
            DenseChannel rotated{n, r_u.transpose() * dense.ptm * r_u, {}};
            EXPECT_NEAR(oracle::exact_pr0(rotated), p_identity, 1e-12);
        }
    }
}

TEST(oracle, exact_average_fidelity_values) {
    // noiseless
    NoiseModel none;
    none.num_qubits = 2;
    NoisyGate gate;
    gate.num_qubits = 2;
    gate.circuit = block_circuit(2, 1, 0);
    gate.ideal = from_circuit(*gate.circuit);
    gate.noise = none;
    EXPECT_NEAR(oracle::exact_average_fidelity(gate.ideal, oracle::densify(gate)), 1.0, 1e-12);

    // n=1 depolarizing p=0.1 -> (2*0.925+1)/3 = 0.95
    NoiseModel depol;
    depol.num_qubits = 1;
    depol.components.push_back(depolarizing(1, 0.1));
    NoisyGate noisy;
    noisy.num_qubits = 1;
    noisy.circuit = CircuitSpec::parse(1, "H 1\n");
    noisy.ideal = from_circuit(*noisy.circuit);
    noisy.noise = depol;
    EXPECT_NEAR(oracle::exact_average_fidelity(noisy.ideal, oracle::densify(noisy)), 0.95,
                1e-12);
}

TEST(oracle, haar_average_matches_exact) {
    RandomStream rng(20260810);

    // identity channel -> 1 with zero spread
    NoiseModel none;
    none.num_qubits = 1;
    NoisyGate id_gate;
    id_gate.num_qubits = 1;
    id_gate.ideal = identity_tableau(1);
    id_gate.noise = none;
    auto exact_one = oracle::haar_average_fidelity_mc(id_gate.ideal, oracle::densify(id_gate),
                                                      1000, rng);
    EXPECT_NEAR(exact_one.mean, 1.0, 1e-12);
    EXPECT_NEAR(exact_one.std_error, 0.0, 1e-9);

    // n=1 depolarizing p=0.1 -> 0.95 within 3 standard errors (1e5 states).
    // The per-state fidelity of a depolarizing channel is constant, so the
    // spread is pure numerical noise here.
    NoiseModel depol;
    depol.num_qubits = 1;
    depol.components.push_back(depolarizing(1, 0.1));
    NoisyGate gate;
    gate.num_qubits = 1;
    gate.circuit = CircuitSpec::parse(1, "H 1\nS 1\n");
    gate.ideal = from_circuit(*gate.circuit);
    gate.noise = depol;
    auto dense = oracle::densify(gate);
    double exact = oracle::exact_average_fidelity(gate.ideal, dense);
    EXPECT_NEAR(exact, 0.95, 1e-12);
    auto mc = oracle::haar_average_fidelity_mc(gate.ideal, dense, 100000, rng);
    EXPECT_NEAR(mc.mean, exact, std::max(3.0 * mc.std_error, 1e-9));

    // dephasing has genuinely state-dependent fidelity
    NoiseModel dephase;
    dephase.num_qubits = 1;
    dephase.components.push_back(DephasingModel{{2.0}, 1.0, DephasingMode::endpoint, {}});
    NoisyGate gate_d;
    gate_d.num_qubits = 1;
    gate_d.ideal = identity_tableau(1);
    gate_d.noise = dephase;
    auto dense_d = oracle::densify(gate_d);
    auto mc_d = oracle::haar_average_fidelity_mc(gate_d.ideal, dense_d, 50000, rng);
    EXPECT_GT(mc_d.std_error, 0.0);
    EXPECT_NEAR(mc_d.mean, oracle::exact_average_fidelity(gate_d.ideal, dense_d),
                3.0 * mc_d.std_error);

    // n=2 composite noise (dephasing o depolarizing) on a block gate
    NoiseModel composite;
    composite.num_qubits = 2;
    composite.components.push_back(depolarizing(2, 0.15));
    composite.components.push_back(
        DephasingModel{{1.4, 0.9}, 0.6, DephasingMode::endpoint, {}});
    NoisyGate gate2;
    gate2.num_qubits = 2;
    gate2.circuit = block_circuit(2, 0, 1);
    gate2.ideal = from_circuit(*gate2.circuit);
    gate2.noise = composite;
    auto dense2 = oracle::densify(gate2);
    double exact2 = oracle::exact_average_fidelity(gate2.ideal, dense2);
    auto mc2 = oracle::haar_average_fidelity_mc(gate2.ideal, dense2, 20000, rng);
    EXPECT_NEAR(mc2.mean, exact2, 3.0 * mc2.std_error);

    EXPECT_THROW(oracle::haar_average_fidelity_mc(gate2.ideal, dense2, 1, rng),
                 std::invalid_argument);
}

TEST(oracle, clifford_group_average_identity) {
    NoiseModel none;
    none.num_qubits = 1;
    auto identity_channel = oracle::densify(none, 1);
    auto result = oracle::clifford_group_average_fidelity(identity_channel);
    EXPECT_NEAR(result.fidelity, 1.0, 1e-12);
    EXPECT_EQ(result.std_error, 0.0);
    EXPECT_LT((result.averaged_ptm - oracle::Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(oracle, clifford_group_average_depolarizes_and_matches_exact) {
    // dephasing noise at n=1: the 24-element group average must (a) have
    // depolarizing PTM form diag(1,c,c,c) and (b) equal the Pr(0)-route value.
    DephasingModel model{{2.0}, 1.0, DephasingMode::endpoint, {}};
    NoiseModel noise;
    noise.num_qubits = 1;
    noise.components.push_back(model);
    auto channel = oracle::densify(noise, 1);
    auto result = oracle::clifford_group_average_fidelity(channel);

    const auto& ptm = result.averaged_ptm;
    double c = ptm(1, 1);
    EXPECT_NEAR(ptm(0, 0), 1.0, 1e-10);
    EXPECT_NEAR(ptm(2, 2), c, 1e-10);
    EXPECT_NEAR(ptm(3, 3), c, 1e-10);
    for (int row = 0; row < 4; row++) {
        for (int col = 0; col < 4; col++) {
            if (row != col) {
                EXPECT_NEAR(ptm(row, col), 0.0, 1e-10);
            }
        }
    }
    double exact = oracle::exact_average_fidelity(identity_tableau(1), channel);
    EXPECT_NEAR(result.fidelity, exact, 1e-10);

    // amplitude damping is not Pauli-diagonal; the twirl still depolarizes
    auto damping = oracle::amplitude_damping(1, {0.35});
    auto damped = oracle::clifford_group_average_fidelity(damping);
    EXPECT_NEAR(damped.averaged_ptm(0, 0), 1.0, 1e-10);
    EXPECT_NEAR(damped.averaged_ptm(1, 1), damped.averaged_ptm(2, 2), 1e-10);
    EXPECT_NEAR(damped.averaged_ptm(1, 1), damped.averaged_ptm(3, 3), 1e-10);
    EXPECT_NEAR(damped.fidelity, oracle::exact_average_fidelity(identity_tableau(1), damping),
                1e-10);
}

TEST(oracle, two_qubit_group_subset_average) {
    RandomStream rng(4242);
    NoiseModel noise;
    noise.num_qubits = 2;
    noise.components.push_back(depolarizing(2, 0.2));
    noise.components.push_back(DephasingModel{{1.0, 2.0}, 0.5, DephasingMode::endpoint, {}});
    auto channel = oracle::densify(noise, 2);
    double exact = oracle::exact_average_fidelity(identity_tableau(2), channel);
    auto result = oracle::clifford_group_average_fidelity(channel, 1500, &rng);
    EXPECT_GT(result.std_error, 0.0);
    EXPECT_NEAR(result.fidelity, exact, 4.0 * result.std_error);

    NoiseModel big;
    big.num_qubits = 3;
    EXPECT_THROW(oracle::clifford_group_average_fidelity(oracle::densify(big, 3)),
                 std::invalid_argument);
    EXPECT_THROW(oracle::clifford_group_average_fidelity(channel, 1500, nullptr),
                 std::invalid_argument);
}

TEST(oracle, twirl_spectrum_identity_and_dephasing) {
    NoiseModel none;
    none.num_qubits = 1;
    auto spectrum = oracle::pauli_twirl_spectrum(oracle::densify(none, 1), identity_tableau(1));
    ASSERT_EQ(spectrum.size(), 2u);
    EXPECT_NEAR(spectrum[0], 1.0, 1e-12);
    EXPECT_NEAR(spectrum[1], 0.0, 1e-12);

    // pure dephasing with flip probability q: Pr(0)=1-q, Pr(1)=q, all on Z
    double q = 0.23;
    PauliChannel channel;
    channel.num_qubits = 1;
    channel.errors = {{P("I"), 1.0 - q}, {P("Z"), q}};
    auto dense = densify_channel(channel);
    auto probs = oracle::pauli_twirl_probabilities(dense, identity_tableau(1));
    ASSERT_EQ(probs.size(), 4u);
    EXPECT_NEAR(probs[0], 1.0 - q, 1e-12);                            // I
    EXPECT_NEAR(probs[oracle::pauli_index(P("Z"))], q, 1e-12);        // Z
    EXPECT_NEAR(probs[oracle::pauli_index(P("X"))], 0.0, 1e-12);
    EXPECT_NEAR(probs[oracle::pauli_index(P("Y"))], 0.0, 1e-12);
    auto spec2 = oracle::pauli_twirl_spectrum(dense, identity_tableau(1));
    EXPECT_NEAR(spec2[0], 1.0 - q, 1e-12);
    EXPECT_NEAR(spec2[1], q, 1e-12);
    EXPECT_NEAR(spec2[0], oracle::exact_pr0(dense), 1e-12);
}

TEST(oracle, twirl_spectrum_recovers_pauli_channel_weights) {
    RandomStream rng(11);
    for (size_t n : {2u, 3u}) {
        auto channel = random_pauli_channel(n, 8, rng);
        std::vector<double> expected(n + 1, 0.0);
        for (const auto& [error, prob] : channel.errors) {
            expected[error.weight()] += prob;
        }
        auto spectrum = oracle::pauli_twirl_spectrum(densify_channel(channel),
                                                     identity_tableau(n));
        for (size_t w = 0; w <= n; w++) {
            EXPECT_NEAR(spectrum[w], expected[w], 1e-12);
        }
    }
}

TEST(oracle, amplitude_damping_spectrum_and_cp) {
    auto damping = oracle::amplitude_damping(2, {0.4, 0.25});
    auto probs = oracle::pauli_twirl_probabilities(damping, identity_tableau(2));
    auto spectrum = oracle::pauli_twirl_spectrum(damping, identity_tableau(2));
    double total = 0.0;
    for (double value : spectrum) {
        total += value;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    for (double value : probs) {
        EXPECT_GE(value, -1e-10);
    }
    // amplitude damping is CP: Choi minimum eigenvalue is nonnegative
    EXPECT_GE(oracle::choi_min_eigenvalue(damping), -1e-10);

    RandomStream rng(12);
    EXPECT_GE(oracle::choi_min_eigenvalue(densify_channel(random_pauli_channel(2, 6, rng))),
              -1e-10);
}

TEST(oracle, dense_evaluator_matches_scalable_for_pauli_noise) {
    RandomStream rng(13);
    for (int i = 0; i < 5; i++) {
        NoisyGate gate;
        gate.num_qubits = 3;
        gate.circuit = spreader_circuit(3, 2);
        gate.ideal = from_circuit(*gate.circuit);
        gate.noise.num_qubits = 3;
        gate.noise.components.push_back(random_pauli_channel(3, 10, rng));
        gate.validate();
        ScalableEvaluator scalable(gate);
        oracle::DenseEvaluator dense(oracle::densify(gate), &gate);
        for (size_t b = 1; b < 64; b++) {
            auto input = oracle::pauli_from_index(3, b);
            auto observable = conjugate(gate.ideal, input);
            EXPECT_NEAR(scalable.overlap(input, observable), dense.overlap(input, observable),
                        1e-12);
        }
    }
}

TEST(oracle, dense_cap_enforced) {
    NoiseModel none;
    none.num_qubits = 6;
    EXPECT_THROW(oracle::densify(none, 6), std::invalid_argument);
    EXPECT_THROW(oracle::dense_unitary(spreader_circuit(6, 5)), std::invalid_argument);
    NoiseModel small;
    small.num_qubits = 5;
    auto channel = oracle::densify(small, 5);
    EXPECT_THROW(oracle::pauli_twirl_spectrum(channel, identity_tableau(5)),
                 std::invalid_argument);
}
