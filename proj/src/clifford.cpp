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

#include "twirlcert/clifford.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace twirlcert {

bool gate_is_two_qubit(GateTag tag) {
    return tag == GateTag::CNOT || tag == GateTag::ZZ90;
}

std::string_view gate_name(GateTag tag) {
    switch (tag) {
        case GateTag::H:
            return "H";
        case GateTag::S:
            return "S";
        case GateTag::CNOT:
            return "CNOT";
        case GateTag::X90:
            return "X90";
        case GateTag::Y90:
            return "Y90";
        case GateTag::Z90:
            return "Z90";
        case GateTag::ZZ90:
            return "ZZ90";
    }
    return "?";
}

GateTag gate_tag_from_name(std::string_view name) {
    if (name == "H") return GateTag::H;
    if (name == "S") return GateTag::S;
    if (name == "CNOT") return GateTag::CNOT;
    if (name == "X90") return GateTag::X90;
    if (name == "Y90") return GateTag::Y90;
    if (name == "Z90") return GateTag::Z90;
    if (name == "ZZ90") return GateTag::ZZ90;
    throw std::invalid_argument("unknown gate tag '" + std::string(name) + "'");
}

CircuitSpec CircuitSpec::parse(size_t num_qubits, std::string_view text) {
    CircuitSpec c;
    c.num_qubits = num_qubits;
    std::istringstream lines{std::string(text)};
    std::string line;
    size_t line_no = 0;
    while (std::getline(lines, line)) {
        line_no++;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream fields(line);
        std::string tag_name;
        if (!(fields >> tag_name)) {
            continue;  // blank line
        }
        GateApplication g{};
        g.tag = gate_tag_from_name(tag_name);
        long q0 = 0, q1 = 0;
        if (!(fields >> q0)) {
            throw std::invalid_argument("circuit line " + std::to_string(line_no) +
                                        ": missing qubit index");
        }
        if (gate_is_two_qubit(g.tag) && !(fields >> q1)) {
            throw std::invalid_argument("circuit line " + std::to_string(line_no) +
                                        ": two-qubit gate needs two indices");
        }
        std::string extra;
        if (fields >> extra) {
            throw std::invalid_argument("circuit line " + std::to_string(line_no) +
                                        ": trailing token '" + extra + "'");
        }
        if (q0 < 1 || (gate_is_two_qubit(g.tag) && q1 < 1)) {
            throw std::invalid_argument("circuit line " + std::to_string(line_no) +
                                        ": qubit indices are 1-based");
        }
        g.q0 = static_cast<uint32_t>(q0 - 1);
        g.q1 = gate_is_two_qubit(g.tag) ? static_cast<uint32_t>(q1 - 1) : 0;
        c.gates.push_back(g);
    }
    c.validate();
    return c;
}

std::string CircuitSpec::str() const {
    std::string out;
    for (const auto& g : gates) {
        out += gate_name(g.tag);
        out += ' ';
        out += std::to_string(g.q0 + 1);
        if (gate_is_two_qubit(g.tag)) {
            out += ' ';
            out += std::to_string(g.q1 + 1);
        }
        out += '\n';
    }
    return out;
}

void CircuitSpec::validate() const {
    if (num_qubits == 0) {
        throw std::invalid_argument("circuit: qubit count must be positive");
    }
    for (const auto& g : gates) {
        if (g.q0 >= num_qubits || (gate_is_two_qubit(g.tag) && g.q1 >= num_qubits)) {
            throw std::invalid_argument("circuit: qubit index out of range");
        }
        if (gate_is_two_qubit(g.tag) && g.q0 == g.q1) {
            throw std::invalid_argument("circuit: two-qubit gate with equal indices");
        }
    }
}

size_t CircuitSpec::two_qubit_gate_count() const {
    return static_cast<size_t>(
        std::count_if(gates.begin(), gates.end(), [](const GateApplication& g) {
            return gate_is_two_qubit(g.tag);
        }));
}

size_t CircuitSpec::single_qubit_gate_count() const {
    return gates.size() - two_qubit_gate_count();
}

CliffordTableau::CliffordTableau(size_t num_qubits) : n_(num_qubits) {
    x_images_.reserve(n_);
    z_images_.reserve(n_);
    for (size_t j = 0; j < n_; j++) {
        x_images_.push_back(PauliOperator::single(n_, j, 'X'));
        z_images_.push_back(PauliOperator::single(n_, j, 'Z'));
    }
}

bool CliffordTableau::is_valid() const {
    for (size_t j = 0; j < n_; j++) {
        if (x_images_[j].phase() % 2 != 0 || z_images_[j].phase() % 2 != 0) {
            return false;
        }
        for (size_t k = 0; k < n_; k++) {
            bool want = !(j == k);  // only the paired generators anticommute
            if (commutes(x_images_[j], z_images_[k]) != want) {
                return false;
            }
            if (!commutes(x_images_[j], x_images_[k]) || !commutes(z_images_[j], z_images_[k])) {
                return false;
            }
        }
    }
    return true;
}

CliffordTableau identity_tableau(size_t n) {
    return CliffordTableau(n);
}

CliffordTableau elementary(size_t n, GateTag tag, uint32_t q0, uint32_t q1) {
    bool two = gate_is_two_qubit(tag);
    if (q0 >= n || (two && q1 >= n)) {
        throw std::invalid_argument("elementary: qubit index out of range");
    }
    if (two && q0 == q1) {
        throw std::invalid_argument("elementary: two-qubit gate with equal indices");
    }
    if (!two && q1 != UINT32_MAX) {
        throw std::invalid_argument("elementary: single-qubit gate given two indices");
    }
    CliffordTableau t(n);
    auto X = [&](uint32_t q) { return PauliOperator::single(n, q, 'X'); };
    auto Y = [&](uint32_t q) { return PauliOperator::single(n, q, 'Y'); };
    auto Z = [&](uint32_t q) { return PauliOperator::single(n, q, 'Z'); };
    auto neg = [](PauliOperator p) {
        p.set_phase(p.phase() + 2);
        return p;
    };
    switch (tag) {
        case GateTag::H:
            t.set_x_image(q0, Z(q0));
            t.set_z_image(q0, X(q0));
            break;
        case GateTag::S:  // X -> Y, Z -> Z
            t.set_x_image(q0, Y(q0));
            break;
        case GateTag::Z90:  // same conjugation action as S
            t.set_x_image(q0, Y(q0));
            break;
        case GateTag::X90:  // Z -> -Y (so Y -> Z)
            t.set_z_image(q0, neg(Y(q0)));
            break;
        case GateTag::Y90:  // X -> -Z, Z -> X
            t.set_x_image(q0, neg(Z(q0)));
            t.set_z_image(q0, X(q0));
            break;
        case GateTag::CNOT:  // control q0, target q1
            t.set_x_image(q0, multiply(X(q0), X(q1)));
            t.set_z_image(q1, multiply(Z(q0), Z(q1)));
            break;
        case GateTag::ZZ90:  // X_i -> Y_i Z_j, X_j -> Z_i Y_j
            t.set_x_image(q0, multiply(Y(q0), Z(q1)));
            t.set_x_image(q1, multiply(Z(q0), Y(q1)));
            break;
    }
    return t;
}

PauliOperator conjugate(const CliffordTableau& t, const PauliOperator& p) {
    if (t.num_qubits() != p.num_qubits()) {
        throw std::invalid_argument("conjugate: dimension mismatch");
    }
    size_t n = p.num_qubits();
    // p = i^phase * i^(sum_j x_j z_j) * prod_j X_j^{x_j} Z_j^{z_j}; conjugation
    // maps the generator product to the product of images in the same order.
    PauliOperator acc(n);
    int64_t y_count = 0;
    for (size_t k = 0; k < p.x_.size(); k++) {
        y_count += std::popcount(p.x_[k] & p.z_[k]);
        uint64_t xw = p.x_[k], zw = p.z_[k];
        while (xw | zw) {
            // lowest set position across either word
            uint64_t both = xw | zw;
            int bit = std::countr_zero(both);
            size_t j = k * 64 + static_cast<size_t>(bit);
            uint64_t mask = uint64_t{1} << bit;
            if (xw & mask) {
                acc = multiply(acc, t.x_image(j));
                xw ^= mask;
            }
            if (zw & mask) {
                acc = multiply(acc, t.z_image(j));
                zw ^= mask;
            }
        }
    }
    acc.set_phase(static_cast<uint8_t>((acc.phase() + p.phase() + y_count) & 3));
    return acc;
}

CliffordTableau compose(const CliffordTableau& a, const CliffordTableau& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("compose: dimension mismatch");
    }
    size_t n = a.num_qubits();
    CliffordTableau r(n);
    for (size_t j = 0; j < n; j++) {
        r.set_x_image(j, conjugate(a, b.x_image(j)));
        r.set_z_image(j, conjugate(a, b.z_image(j)));
    }
    return r;
}

CliffordTableau inverse(const CliffordTableau& t) {
    size_t n = t.num_qubits();
    CliffordTableau inv(n);
    // The 2n x 2n symplectic bit matrix A of a tableau satisfies
    // A Omega A^T = Omega with Omega swapping the X/Z halves, so
    // A^{-1} = Omega A^T Omega. Signs are fixed afterwards by one
    // conjugation per generator.
    for (size_t q = 0; q < n; q++) {
        PauliOperator xi(n), zi(n);
        for (size_t c = 0; c < n; c++) {
            xi.set_x_bit(c, t.z_image(c).z_bit(q));
            xi.set_z_bit(c, t.x_image(c).z_bit(q));
            zi.set_x_bit(c, t.z_image(c).x_bit(q));
            zi.set_z_bit(c, t.x_image(c).x_bit(q));
        }
        inv.set_x_image(q, std::move(xi));
        inv.set_z_image(q, std::move(zi));
    }
    for (size_t q = 0; q < n; q++) {
        PauliOperator rx = conjugate(t, inv.x_image(q));
        PauliOperator rz = conjugate(t, inv.z_image(q));
        if (!rx.same_bits(PauliOperator::single(n, q, 'X')) ||
            !rz.same_bits(PauliOperator::single(n, q, 'Z'))) {
            throw std::logic_error("inverse: input tableau is not symplectic");
        }
        if (rx.phase() == 2) {
            PauliOperator p = inv.x_image(q);
            p.set_phase(p.phase() + 2);
            inv.set_x_image(q, std::move(p));
        }
        if (rz.phase() == 2) {
            PauliOperator p = inv.z_image(q);
            p.set_phase(p.phase() + 2);
            inv.set_z_image(q, std::move(p));
        }
    }
    return inv;
}

CliffordTableau from_circuit(const CircuitSpec& circuit) {
    circuit.validate();
    CliffordTableau t(circuit.num_qubits);
    for (const auto& g : circuit.gates) {
        CliffordTableau gate = elementary(circuit.num_qubits, g.tag, g.q0,
                                          gate_is_two_qubit(g.tag) ? g.q1 : UINT32_MAX);
        t = compose(gate, t);  // apply order: g acts after everything so far
    }
    return t;
}

CircuitSpec block_circuit(size_t n, uint32_t i, uint32_t j) {
    if (i == j || i >= n || j >= n) {
        throw std::invalid_argument("block_circuit: need distinct in-range indices");
    }
    CircuitSpec c;
    c.num_qubits = n;
    c.gates = {{GateTag::Y90, i}, {GateTag::ZZ90, i, j}, {GateTag::X90, i}};
    return c;
}

CliffordTableau build_block(size_t n, uint32_t i, uint32_t j) {
    return from_circuit(block_circuit(n, i, j));
}

std::vector<std::pair<uint32_t, uint32_t>> default_spreader_chain(size_t n, uint32_t seed_qubit) {
    std::vector<std::pair<uint32_t, uint32_t>> chain;
    for (uint32_t q = seed_qubit; q > 0; q--) {
        chain.emplace_back(q, q - 1);
    }
    for (uint32_t q = seed_qubit; q + 1 < n; q++) {
        chain.emplace_back(q, q + 1);
    }
    return chain;
}

namespace {
void validate_chain(size_t n, uint32_t seed_qubit,
                    const std::vector<std::pair<uint32_t, uint32_t>>& chain) {
    if (seed_qubit >= n) {
        throw std::invalid_argument("spreader: seed qubit out of range");
    }
    if (chain.size() != n - 1) {
        throw std::invalid_argument("spreader: chain must have n-1 pairs");
    }
    std::vector<bool> reached(n, false);
    reached[seed_qubit] = true;
    for (auto [src, dst] : chain) {
        if (src >= n || dst >= n || !reached[src] || reached[dst]) {
            throw std::invalid_argument("spreader: chain is not a connected spread from the seed");
        }
        reached[dst] = true;
    }
}
}  // namespace

CircuitSpec spreader_circuit(size_t n, uint32_t seed_qubit,
                             const std::vector<std::pair<uint32_t, uint32_t>>* chain) {
    std::vector<std::pair<uint32_t, uint32_t>> links =
        chain ? *chain : default_spreader_chain(n, seed_qubit);
    if (n == 1) {
        if (!links.empty() || seed_qubit != 0) {
            throw std::invalid_argument("spreader: n=1 takes seed qubit 0 and an empty chain");
        }
        CircuitSpec c;
        c.num_qubits = 1;
        return c;
    }
    validate_chain(n, seed_qubit, links);
    CircuitSpec c;
    c.num_qubits = n;
    for (auto [src, dst] : links) {
        CircuitSpec block = block_circuit(n, src, dst);
        c.gates.insert(c.gates.end(), block.gates.begin(), block.gates.end());
    }
    return c;
}

CliffordTableau build_coherence_spreader(size_t n, uint32_t seed_qubit,
                                         const std::vector<std::pair<uint32_t, uint32_t>>* chain) {
    return from_circuit(spreader_circuit(n, seed_qubit, chain));
}

namespace {

std::string tableau_key(const CliffordTableau& t) {
    std::string key;
    for (size_t j = 0; j < t.num_qubits(); j++) {
        key += t.x_image(j).str();
        key += t.z_image(j).str();
    }
    return key;
}

std::vector<SingleQubitClifford> enumerate_group(size_t n,
                                                 const std::vector<GateApplication>& generators,
                                                 size_t expected_size) {
    std::vector<SingleQubitClifford> group;
    std::unordered_set<std::string> seen;
    CircuitSpec empty;
    empty.num_qubits = n;
    group.push_back({identity_tableau(n), empty});
    seen.insert(tableau_key(group[0].tableau));
    for (size_t head = 0; head < group.size(); head++) {
        // copy by value: group may reallocate while we append
        SingleQubitClifford current = group[head];
        for (const auto& g : generators) {
            CliffordTableau gate = elementary(n, g.tag, g.q0,
                                              gate_is_two_qubit(g.tag) ? g.q1 : UINT32_MAX);
            CliffordTableau next = compose(gate, current.tableau);
            if (seen.insert(tableau_key(next)).second) {
                CircuitSpec word = current.circuit;
                word.gates.push_back(g);
                group.push_back({std::move(next), std::move(word)});
            }
        }
    }
    if (group.size() != expected_size) {
        throw std::logic_error("clifford group closure has unexpected size " +
                               std::to_string(group.size()));
    }
    for (const auto& element : group) {
        if (!element.tableau.is_valid()) {
            throw std::logic_error("clifford group closure produced an invalid tableau");
        }
    }
    return group;
}

}  // namespace

const std::vector<SingleQubitClifford>& single_qubit_clifford_group() {
    static const std::vector<SingleQubitClifford> group =
        enumerate_group(1, {{GateTag::H, 0}, {GateTag::S, 0}}, 24);
    return group;
}

const std::vector<SingleQubitClifford>& two_qubit_clifford_group() {
    static const std::vector<SingleQubitClifford> group = enumerate_group(
        2,
        {{GateTag::H, 0}, {GateTag::H, 1}, {GateTag::S, 0}, {GateTag::S, 1},
         {GateTag::CNOT, 0, 1}, {GateTag::CNOT, 1, 0}},
        11520);
    return group;
}

namespace {
// Embeds a single-qubit image (from the cached 24-element group) at `qubit`.
PauliOperator embed_single(const PauliOperator& p1, size_t n, size_t qubit) {
    PauliOperator p(n);
    p.set_x_bit(qubit, p1.x_bit(0));
    p.set_z_bit(qubit, p1.z_bit(0));
    p.set_phase(p1.phase());
    return p;
}
}  // namespace

CliffordTableau random_single_qubit_cliffords(size_t n, RandomStream& rng) {
    const auto& group = single_qubit_clifford_group();
    CliffordTableau t(n);
    for (size_t j = 0; j < n; j++) {
        const auto& c = group[rng.uniform_below(group.size())];
        t.set_x_image(j, embed_single(c.tableau.x_image(0), n, j));
        t.set_z_image(j, embed_single(c.tableau.z_image(0), n, j));
    }
    return t;
}

CliffordTableau permutation_tableau(const std::vector<uint32_t>& perm) {
    size_t n = perm.size();
    std::vector<bool> hit(n, false);
    for (uint32_t image : perm) {
        if (image >= n || hit[image]) {
            throw std::invalid_argument("permutation_tableau: not a permutation");
        }
        hit[image] = true;
    }
    CliffordTableau t(n);
    for (size_t j = 0; j < n; j++) {
        t.set_x_image(j, PauliOperator::single(n, perm[j], 'X'));
        t.set_z_image(j, PauliOperator::single(n, perm[j], 'Z'));
    }
    return t;
}

CliffordTableau random_permutation(size_t n, RandomStream& rng) {
    std::vector<uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t i = 0; i + 1 < n; i++) {
        size_t j = i + static_cast<size_t>(rng.uniform_below(n - i));
        std::swap(perm[i], perm[j]);
    }
    return permutation_tableau(perm);
}

CircuitSpec random_circuit(size_t n, size_t num_gates, RandomStream& rng) {
    static const GateTag kSingle[] = {GateTag::H, GateTag::S, GateTag::X90, GateTag::Y90,
                                      GateTag::Z90};
    CircuitSpec c;
    c.num_qubits = n;
    for (size_t i = 0; i < num_gates; i++) {
        if (n >= 2 && rng.uniform_below(3) == 0) {
            uint32_t a = static_cast<uint32_t>(rng.uniform_below(n));
            uint32_t b = static_cast<uint32_t>(rng.uniform_below(n - 1));
            if (b >= a) {
                b++;
            }
            c.gates.push_back({rng.uniform_below(2) ? GateTag::CNOT : GateTag::ZZ90, a, b});
        } else {
            c.gates.push_back({kSingle[rng.uniform_below(5)],
                               static_cast<uint32_t>(rng.uniform_below(n))});
        }
    }
    return c;
}

}  // namespace twirlcert
