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

#include "twirlcert/pauli.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace twirlcert {

PauliOperator::PauliOperator(size_t num_qubits)
    : n_(num_qubits), x_(word_count(num_qubits), 0), z_(word_count(num_qubits), 0) {
    if (num_qubits == 0) {
        throw std::invalid_argument("PauliOperator: qubit count must be positive");
    }
}

PauliOperator PauliOperator::from_string(std::string_view text) {
    uint8_t phase = 0;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
        bool negative = text[0] == '-';
        text.remove_prefix(1);
        if (!text.empty() && text[0] == 'i') {
            phase = negative ? 3 : 1;
            text.remove_prefix(1);
        } else {
            phase = negative ? 2 : 0;
        }
    } else if (!text.empty() && text[0] == 'i') {
        phase = 1;
        text.remove_prefix(1);
    }
    if (text.empty()) {
        throw std::invalid_argument("PauliOperator: empty Pauli string");
    }
    PauliOperator p(text.size());
    p.phase_ = phase;
    for (size_t j = 0; j < text.size(); j++) {
        switch (text[j]) {
            case 'I':
                break;
            case 'X':
                p.set_x_bit(j, true);
                break;
            case 'Y':
                p.set_x_bit(j, true);
                p.set_z_bit(j, true);
                break;
            case 'Z':
                p.set_z_bit(j, true);
                break;
            default:
                throw std::invalid_argument(std::string("PauliOperator: bad character '") +
                                            text[j] + "'");
        }
    }
    return p;
}

PauliOperator PauliOperator::single(size_t num_qubits, size_t qubit, char axis) {
    PauliOperator p(num_qubits);
    if (qubit >= num_qubits) {
        throw std::invalid_argument("PauliOperator::single: qubit out of range");
    }
    switch (axis) {
        case 'X':
            p.set_x_bit(qubit, true);
            break;
        case 'Y':
            p.set_x_bit(qubit, true);
            p.set_z_bit(qubit, true);
            break;
        case 'Z':
            p.set_z_bit(qubit, true);
            break;
        default:
            throw std::invalid_argument("PauliOperator::single: axis must be X, Y or Z");
    }
    return p;
}

void PauliOperator::set_x_bit(size_t qubit, bool value) {
    uint64_t mask = uint64_t{1} << (qubit & 63);
    if (value) {
        x_[qubit >> 6] |= mask;
    } else {
        x_[qubit >> 6] &= ~mask;
    }
}

void PauliOperator::set_z_bit(size_t qubit, bool value) {
    uint64_t mask = uint64_t{1} << (qubit & 63);
    if (value) {
        z_[qubit >> 6] |= mask;
    } else {
        z_[qubit >> 6] &= ~mask;
    }
}

int PauliOperator::axis(size_t qubit) const {
    bool x = x_bit(qubit), z = z_bit(qubit);
    return x ? (z ? 2 : 1) : (z ? 3 : 0);
}

void PauliOperator::set_axis(size_t qubit, int axis) {
    set_x_bit(qubit, axis == 1 || axis == 2);
    set_z_bit(qubit, axis == 2 || axis == 3);
}

size_t PauliOperator::weight() const {
    size_t total = 0;
    for (size_t k = 0; k < x_.size(); k++) {
        total += std::popcount(x_[k] | z_[k]);
    }
    return total;
}

bool PauliOperator::is_identity_bits() const {
    for (size_t k = 0; k < x_.size(); k++) {
        if (x_[k] | z_[k]) {
            return false;
        }
    }
    return true;
}

std::string PauliOperator::str() const {
    static const char* kSigns[4] = {"+", "+i", "-", "-i"};
    std::string out = kSigns[phase_];
    out.reserve(out.size() + n_);
    for (size_t j = 0; j < n_; j++) {
        bool x = x_bit(j), z = z_bit(j);
        out += x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }
    return out;
}

PauliOperator multiply(const PauliOperator& p, const PauliOperator& q) {
    if (p.n_ != q.n_) {
        throw std::invalid_argument("multiply: dimension mismatch");
    }
    PauliOperator r(p.n_);
    // Per-qubit phase contribution: +i on (X,Y),(Y,Z),(Z,X); -i on the
    // reversed pairs; 0 otherwise. Counted word-parallel.
    int64_t quarter_turns = 0;
    for (size_t k = 0; k < p.x_.size(); k++) {
        uint64_t x1 = p.x_[k], z1 = p.z_[k], x2 = q.x_[k], z2 = q.z_[k];
        uint64_t plus_i = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2);
        uint64_t minus_i = (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2) | (x1 & ~z1 & ~x2 & z2);
        quarter_turns += std::popcount(plus_i);
        quarter_turns -= std::popcount(minus_i);
        r.x_[k] = x1 ^ x2;
        r.z_[k] = z1 ^ z2;
    }
    r.phase_ = static_cast<uint8_t>(((quarter_turns % 4) + 4 + p.phase_ + q.phase_) & 3);
    return r;
}

bool commutes(const PauliOperator& p, const PauliOperator& q) {
    if (p.n_ != q.n_) {
        throw std::invalid_argument("commutes: dimension mismatch");
    }
    uint64_t parity = 0;
    for (size_t k = 0; k < p.x_.size(); k++) {
        parity ^= static_cast<uint64_t>(std::popcount(p.x_[k] & q.z_[k]) ^
                                        std::popcount(p.z_[k] & q.x_[k]));
    }
    return (parity & 1) == 0;
}

uint64_t count_weight_class(size_t n, size_t w) {
    if (w > n) {
        throw std::invalid_argument("count_weight_class: weight exceeds qubit count");
    }
    // 3^w * C(n,w) built incrementally: value_w = value_{w-1} * 3(n-w+1)/w.
    // The prefix values are the smaller-w class sizes; they rise toward a
    // peak near w = 3n/4 and fall after it, so for n <= 53 (where no 128-bit
    // intermediate can wrap) only the final value is range-checked. For
    // larger n any representable target lies on the rising side and the
    // early check is exact.
    unsigned __int128 value = 1;
    constexpr unsigned __int128 kMax64 = ~uint64_t{0};
    for (size_t i = 1; i <= w; i++) {
        value = value * 3 * (n - i + 1) / i;  // binomial prefix products divide exactly
        if (n > 53 && value > kMax64) {
            throw std::overflow_error("count_weight_class: value exceeds 64 bits");
        }
    }
    if (value > kMax64) {
        throw std::overflow_error("count_weight_class: value exceeds 64 bits");
    }
    return static_cast<uint64_t>(value);
}

long double weight_class_fraction(size_t n, size_t w) {
    if (w > n) {
        throw std::invalid_argument("weight_class_fraction: weight exceeds qubit count");
    }
    long double log_class = w * std::log(3.0L) + std::lgamma(static_cast<long double>(n) + 1) -
                            std::lgamma(static_cast<long double>(w) + 1) -
                            std::lgamma(static_cast<long double>(n - w) + 1);
    return std::exp(log_class - n * std::log(4.0L));
}

PauliOperator sample_uniform_weight(size_t n, size_t w, RandomStream& rng) {
    if (w == 0 || w > n) {
        throw std::invalid_argument("sample_uniform_weight: weight must satisfy 1 <= w <= n");
    }
    // Partial Fisher-Yates picks the support subset uniformly.
    std::vector<uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    PauliOperator p(n);
    for (size_t i = 0; i < w; i++) {
        size_t j = i + static_cast<size_t>(rng.uniform_below(n - i));
        std::swap(idx[i], idx[j]);
        uint64_t letter = rng.uniform_below(3);  // 0=X, 1=Y, 2=Z
        p.set_x_bit(idx[i], letter != 2);
        p.set_z_bit(idx[i], letter != 0);
    }
    return p;
}

size_t PauliBitsHash::operator()(const PauliOperator& p) const {
    uint64_t h = 0x2545f4914f6cdd1dULL;
    for (uint64_t word : p.x_words()) {
        h = splitmix64(h ^ word);
    }
    for (uint64_t word : p.z_words()) {
        h = splitmix64(h ^ word);
    }
    return static_cast<size_t>(h);
}

}  // namespace twirlcert
