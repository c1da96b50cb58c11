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

#ifndef TWIRLCERT_PAULI_HPP
#define TWIRLCERT_PAULI_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twirlcert/rng.hpp"

namespace twirlcert {

// Signed n-qubit Pauli operator in symplectic (X-bits, Z-bits) form.
//
// The operator represented is i^phase * (P_1 x P_2 x ... x P_n), where the
// single-qubit factor for bit pair (x, z) is I (0,0), X (1,0), Z (0,1) or
// Y (1,1), with no hidden phase on Y. Products fix the sign convention
// X*Z = -i*Y, so each factor satisfies P(x,z) = i^(x*z) * X^x * Z^z.
//
// Bits are packed 64 per machine word. Qubit 1 of the protocol is index 0
// here and is the leftmost character of the text form, e.g. "+IIIIIIZ" puts
// a Z on qubit 7 of a 7-qubit register.
//
// Instances are treated as immutable values once built; everything below is
// safe to share across threads.
class PauliOperator {
  public:
    PauliOperator() : n_(0) {}
    explicit PauliOperator(size_t num_qubits);

    // Parses "[sign]PPP..." where sign is one of "+", "-", "+i", "-i" (default
    // "+") and each P is in {I,X,Y,Z}. Round-trips bit-exactly with str().
    static PauliOperator from_string(std::string_view text);

    // Weight-1 operator with the given axis ('X', 'Y' or 'Z') on `qubit`.
    static PauliOperator single(size_t num_qubits, size_t qubit, char axis);

    size_t num_qubits() const { return n_; }
    uint8_t phase() const { return phase_; }
    void set_phase(uint8_t phase) { phase_ = phase & 3; }

    bool x_bit(size_t qubit) const { return (x_[qubit >> 6] >> (qubit & 63)) & 1; }
    bool z_bit(size_t qubit) const { return (z_[qubit >> 6] >> (qubit & 63)) & 1; }
    void set_x_bit(size_t qubit, bool value);
    void set_z_bit(size_t qubit, bool value);

    // 0 = I, 1 = X, 2 = Y, 3 = Z at the given qubit.
    int axis(size_t qubit) const;
    void set_axis(size_t qubit, int axis);

    size_t weight() const;
    bool is_identity_bits() const;

    std::string str() const;

    std::span<const uint64_t> x_words() const { return x_; }
    std::span<const uint64_t> z_words() const { return z_; }

    bool operator==(const PauliOperator&) const = default;

    // True iff the unsigned parts match (phase ignored).
    bool same_bits(const PauliOperator& other) const { return x_ == other.x_ && z_ == other.z_; }

    friend PauliOperator multiply(const PauliOperator& p, const PauliOperator& q);
    friend bool commutes(const PauliOperator& p, const PauliOperator& q);
    friend class CliffordTableau;
    friend PauliOperator conjugate(const class CliffordTableau& t, const PauliOperator& p);

  private:
    static size_t word_count(size_t n) { return (n + 63) >> 6; }

    size_t n_;
    uint8_t phase_ = 0;  // exponent of i, mod 4
    std::vector<uint64_t> x_, z_;
};

// Product p*q with exact quarter-phase tracking (X*Z = -i*Y convention).
// Throws std::invalid_argument on dimension mismatch.
PauliOperator multiply(const PauliOperator& p, const PauliOperator& q);

// True iff the symplectic inner product sum_j (p.x[j]*q.z[j] + p.z[j]*q.x[j])
// is even. Throws std::invalid_argument on dimension mismatch.
bool commutes(const PauliOperator& p, const PauliOperator& q);

// Number of weight-w n-qubit Paulis, 3^w * C(n,w). Throws std::overflow_error
// when the exact value does not fit in 64 bits.
uint64_t count_weight_class(size_t n, size_t w);

// 3^w * C(n,w) / 4^n as a long double; stable for any n (log-space).
long double weight_class_fraction(size_t n, size_t w);

// Uniform draw from the 3^w * C(n,w) unsigned Paulis of weight exactly w
// (uniform support subset, then uniform X/Y/Z per site). Phase fixed to +1.
// Requires 1 <= w <= n.
PauliOperator sample_uniform_weight(size_t n, size_t w, RandomStream& rng);

// Hash of the unsigned part, for seen-sets during distinct sampling and for
// group closures.
struct PauliBitsHash {
    size_t operator()(const PauliOperator& p) const;
};
struct PauliBitsEqual {
    bool operator()(const PauliOperator& a, const PauliOperator& b) const {
        return a.same_bits(b);
    }
};

}  // namespace twirlcert

#endif
