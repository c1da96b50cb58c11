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

#ifndef TWIRLCERT_ORACLE_HPP
#define TWIRLCERT_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

#include "twirlcert/channels.hpp"
#include "twirlcert/clifford.hpp"
#include "twirlcert/estimator.hpp"
#include "twirlcert/pauli.hpp"
#include "twirlcert/rng.hpp"

namespace twirlcert::oracle {

// Dense ground truth is capped here; a 4^n x 4^n transfer matrix at n = 5 is
// the largest that stays comfortably under a second to build.
constexpr size_t kMaxDenseQubits = 5;
constexpr size_t kMaxSpectrumQubits = 4;

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Exact dense channel in the Pauli transfer representation:
// ptm(a, b) = Tr(P_a Lambda(P_b)) / 2^n, indices in base-4 digits
// (I,X,Y,Z) with qubit 1 as the most significant digit. The Kraus list is
// kept when the channel was built from one.
struct DenseChannel {
    size_t num_qubits = 0;
    Matrix ptm;
    std::vector<CMatrix> kraus;
};

// Pauli basis index helpers.
size_t pauli_index(const PauliOperator& p);
PauliOperator pauli_from_index(size_t n, size_t index);

// Dense 2^n x 2^n matrix of a signed Pauli.
CMatrix dense_pauli(const PauliOperator& p);

// Unitary of a circuit, as the ordered product of elementary gate matrices
// (rotations built as (I - i P)/sqrt(2)).
CMatrix dense_unitary(const CircuitSpec& circuit);

Matrix ptm_of_unitary(const CMatrix& u);
Matrix ptm_of_kraus(size_t n, const std::vector<CMatrix>& kraus);

// Exact +-1 transfer matrix of a Clifford tableau (no floating error).
Matrix ptm_of_tableau(const CliffordTableau& t);

DenseChannel densify(const CircuitSpec& circuit);
DenseChannel densify(const CliffordTableau& tableau);
// Dense form of a noise model; stepwise dephasing interleaves per-step
// dephasing factors with the circuit's gates and therefore includes the
// ideal gate action (pass the realizing circuit).
DenseChannel densify(const NoiseModel& noise, size_t n,
                     const CircuitSpec* circuit = nullptr);
// Full noisy-gate channel U~ = noise after ideal gate.
DenseChannel densify(const NoisyGate& gate);

DenseChannel channel_from_kraus(size_t n, std::vector<CMatrix> kraus);

// Per-qubit amplitude damping with decay probability gamma (dense-oracle-only
// noise; the scalable backend has no non-Pauli channels).
DenseChannel amplitude_damping(size_t n, const std::vector<double>& gammas);

// Applies the channel to a density matrix via its PTM.
CMatrix apply_channel(const DenseChannel& channel, const CMatrix& rho);

// Minimum eigenvalue of the Choi matrix; >= -1e-10 for a CP channel.
double choi_min_eigenvalue(const DenseChannel& channel);

// Tr(ptm) / 4^n: the no-error probability of the channel's Pauli twirl.
double exact_pr0(const DenseChannel& noise);

// Forms Lambda = ideal^dag o noisy densely and returns
// (2^n Pr(0) + 1) / (2^n + 1).
double exact_average_fidelity(const CliffordTableau& ideal, const DenseChannel& noisy_gate);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Average of <psi| ideal^dag(noisy(|psi><psi|)) |psi> over Haar-random pure
// states (normalized complex Gaussian vectors). Requires num_states >= 2.
MonteCarloEstimate haar_average_fidelity_mc(const CliffordTableau& ideal,
                                            const DenseChannel& noisy_gate, size_t num_states,
                                            RandomStream& rng);

struct GroupAverageResult {
    double fidelity = 0.0;
    double std_error = 0.0;  // 0 for the exact n=1 enumeration
    Matrix averaged_ptm;     // the twirled channel's transfer matrix
};

// n=1: exact average over the full 24-element single-qubit Clifford group.
// n=2: average over a uniform random subset of the enumerated 11520-element
// two-qubit group (exact uniformity; stderr reported). Throws for n > 2.
GroupAverageResult clifford_group_average_fidelity(const DenseChannel& noisy,
                                                   size_t n2_subset_size = 2000,
                                                   RandomStream* rng = nullptr);

// Per-error twirl probabilities of Lambda = ideal^dag o noisy:
// q_E = (1/4^n) sum_P chi(E,P) ptm(P,P), indexed like pauli_index. They sum
// to 1 (trace preservation) and are nonnegative for CP channels up to
// numerical slack.
std::vector<double> pauli_twirl_probabilities(const DenseChannel& noisy_gate,
                                              const CliffordTableau& ideal);

// The probabilities above binned by weight: Pr(w), w = 0..n; Pr(0) equals
// exact_pr0 of the twirled channel.
std::vector<double> pauli_twirl_spectrum(const DenseChannel& noisy_gate,
                                         const CliffordTableau& ideal);

// Overlap evaluator backed by the full noisy-gate transfer matrix
// (x = s_in s_obs ptm(obs, in)); drives the estimator pipeline for
// backend=dense runs and oracle-equivalence tests. `spam_source`, when given,
// supplies SPAM channels for the calibration-ratio logic.
class DenseEvaluator final : public OverlapEvaluator {
  public:
    explicit DenseEvaluator(DenseChannel full_gate_channel,
                            const NoisyGate* spam_source = nullptr);
    double overlap(const PauliOperator& input, const PauliOperator& observable) const override;
    double calibration(const PauliOperator& input) const override;
    bool has_calibration() const override;

  private:
    DenseChannel noise_;
    const NoisyGate* spam_source_;
};

}  // namespace twirlcert::oracle

#endif
