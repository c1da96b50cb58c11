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

#ifndef TWIRLCERT_CLIFFORD_HPP
#define TWIRLCERT_CLIFFORD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twirlcert/pauli.hpp"
#include "twirlcert/rng.hpp"

namespace twirlcert {

enum class GateTag : uint8_t { H, S, CNOT, X90, Y90, Z90, ZZ90 };

bool gate_is_two_qubit(GateTag tag);
std::string_view gate_name(GateTag tag);
GateTag gate_tag_from_name(std::string_view name);

struct GateApplication {
    GateTag tag;
    uint32_t q0;      // 0-based
    uint32_t q1 = 0;  // second qubit for two-qubit tags
    bool operator==(const GateApplication&) const = default;
};

// An ordered list of elementary gate applications. Gates are listed in
// application order: gates.front() acts on states first. (Operator-product
// notation reads right to left; this is the reverse.) Text form is one gate
// per line with 1-based qubit indices, e.g. "ZZ90 3 4"; '#' starts a comment.
struct CircuitSpec {
    size_t num_qubits = 0;
    std::vector<GateApplication> gates;

    static CircuitSpec parse(size_t num_qubits, std::string_view text);
    std::string str() const;
    void validate() const;
    size_t two_qubit_gate_count() const;
    size_t single_qubit_gate_count() const;

    bool operator==(const CircuitSpec&) const = default;
};

// An n-qubit Clifford gate U stored as the signed conjugation images
// U X_j U^dag and U Z_j U^dag of the 2n Pauli generators.
class CliffordTableau {
  public:
    CliffordTableau() = default;
    explicit CliffordTableau(size_t num_qubits);  // identity

    size_t num_qubits() const { return n_; }
    const PauliOperator& x_image(size_t j) const { return x_images_[j]; }
    const PauliOperator& z_image(size_t j) const { return z_images_[j]; }
    void set_x_image(size_t j, PauliOperator p) { x_images_[j] = std::move(p); }
    void set_z_image(size_t j, PauliOperator p) { z_images_[j] = std::move(p); }

    // Symplectic condition (x_image[j] anticommutes with z_image[j], all
    // other generator pairs commute) plus Hermitian image phases.
    bool is_valid() const;

    bool operator==(const CliffordTableau&) const = default;

  private:
    size_t n_ = 0;
    std::vector<PauliOperator> x_images_, z_images_;
};

CliffordTableau identity_tableau(size_t n);

// Tableau of a single elementary gate embedded in n qubits. X90 is
// exp(-i pi/4 X) and likewise for Y90/Z90/ZZ90. Throws on unknown arity or
// out-of-range / overlapping indices.
CliffordTableau elementary(size_t n, GateTag tag, uint32_t q0, uint32_t q1 = UINT32_MAX);

// Tableau of "a after b": conjugate(compose(a,b), p) == conjugate(a, conjugate(b, p)).
CliffordTableau compose(const CliffordTableau& a, const CliffordTableau& b);

CliffordTableau inverse(const CliffordTableau& t);

// U p U^dag with exact sign. Cost is O(weight-ish) generator multiplies of
// packed words.
PauliOperator conjugate(const CliffordTableau& t, const PauliOperator& p);

CliffordTableau from_circuit(const CircuitSpec& circuit);

// The Eq.-style coherence-increasing block on (i, j): X90(i) after ZZ90(i,j)
// after Y90(i). Maps Z_i -> Z_i Z_j. Indices 0-based, i != j.
CircuitSpec block_circuit(size_t n, uint32_t i, uint32_t j);
CliffordTableau build_block(size_t n, uint32_t i, uint32_t j);

// Chain of blocks spreading single-qubit coherence on seed_qubit (0-based) to
// all n qubits: conjugates Z_seed to Z^(x n). The default chain descends from
// the seed to qubit 0, then ascends above the seed. A custom chain must list
// n-1 (source, target) pairs forming a connected spread from the seed.
std::vector<std::pair<uint32_t, uint32_t>> default_spreader_chain(size_t n, uint32_t seed_qubit);
CircuitSpec spreader_circuit(size_t n, uint32_t seed_qubit,
                             const std::vector<std::pair<uint32_t, uint32_t>>* chain = nullptr);
CliffordTableau build_coherence_spreader(size_t n, uint32_t seed_qubit,
                                         const std::vector<std::pair<uint32_t, uint32_t>>* chain =
                                             nullptr);

// The 24-element single-qubit Clifford group, generated once by closure of
// {H, S} and validated, together with a realizing gate word per element.
struct SingleQubitClifford {
    CliffordTableau tableau;
    CircuitSpec circuit;
};
const std::vector<SingleQubitClifford>& single_qubit_clifford_group();

// The full two-qubit Clifford group mod phases (11520 elements), generated by
// closure of {H, S, CNOT}. Built lazily and cached; used by the dense oracle.
const std::vector<SingleQubitClifford>& two_qubit_clifford_group();

// Tensor product of n independent uniform draws from the 24-element group.
CliffordTableau random_single_qubit_cliffords(size_t n, RandomStream& rng);

// Tableau relabeling qubits by the given permutation (image[j] = perm[j]),
// or by a uniform random permutation.
CliffordTableau permutation_tableau(const std::vector<uint32_t>& perm);
CliffordTableau random_permutation(size_t n, RandomStream& rng);

// Random-circuit tableau for property tests; returns the realizing circuit.
CircuitSpec random_circuit(size_t n, size_t num_gates, RandomStream& rng);

}  // namespace twirlcert

#endif
