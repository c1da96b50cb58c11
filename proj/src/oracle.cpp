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

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace twirlcert::oracle {

namespace {

using namespace std::complex_literals;

constexpr std::complex<double> kQuarterPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

void check_dense_cap(size_t n, const char* what) {
    if (n == 0 || n > kMaxDenseQubits) {
        throw std::invalid_argument(std::string(what) + ": dense oracle is capped at n <= " +
                                    std::to_string(kMaxDenseQubits));
    }
}

// Sparse form of a signed Pauli matrix: row r has its single nonzero at
// column r ^ x_mask, with value i^(phase + #Y) * (-1)^popcount(z_mask & col).
struct SparsePauli {
    size_t dim;
    uint64_t x_mask = 0, z_mask = 0;
    std::complex<double> scale{1.0, 0.0};

    explicit SparsePauli(const PauliOperator& p) {
        size_t n = p.num_qubits();
        dim = size_t{1} << n;
        int y_count = 0;
        for (size_t j = 0; j < n; j++) {
            uint64_t bit = uint64_t{1} << (n - 1 - j);  // qubit 1 = most significant
            if (p.x_bit(j)) {
                x_mask |= bit;
            }
            if (p.z_bit(j)) {
                z_mask |= bit;
            }
            y_count += p.x_bit(j) && p.z_bit(j);
        }
        scale = kQuarterPhases[(p.phase() + y_count) & 3];
    }

    std::complex<double> value_at_column(uint64_t col) const {
        return (std::popcount(z_mask & col) & 1) ? -scale : scale;
    }
};

// Tr(P * V) for sparse P and dense V.
std::complex<double> sparse_pauli_times_trace(const SparsePauli& p, const CMatrix& v) {
    std::complex<double> total = 0.0;
    for (uint64_t r = 0; r < p.dim; r++) {
        uint64_t c = r ^ p.x_mask;
        total += p.value_at_column(c) * v(static_cast<Eigen::Index>(c),
                                          static_cast<Eigen::Index>(r));
    }
    return total;
}

// <psi| P |psi> for sparse P.
std::complex<double> sparse_pauli_expectation(const SparsePauli& p, const CVector& psi) {
    std::complex<double> total = 0.0;
    for (uint64_t r = 0; r < p.dim; r++) {
        uint64_t c = r ^ p.x_mask;
        total += std::conj(psi(static_cast<Eigen::Index>(r))) * p.value_at_column(c) *
                 psi(static_cast<Eigen::Index>(c));
    }
    return total;
}

Eigen::VectorXd dephasing_step_factors(size_t n, const std::vector<const DephasingModel*>& models,
                                       size_t step_index, double default_dt_scale) {
    // Per-step dephasing attenuations: diagonal, per-qubit factor
    // exp(-dt/T2_j) on X/Y components.
    size_t pdim = size_t{1} << (2 * n);
    Eigen::VectorXd d(static_cast<Eigen::Index>(pdim));
    for (size_t b = 0; b < pdim; b++) {
        PauliOperator p = pauli_from_index(n, b);
        double factor = 1.0;
        for (const DephasingModel* model : models) {
            double dt = model->step_durations.empty()
                            ? model->tau * default_dt_scale
                            : model->step_durations[step_index];
            for (size_t j = 0; j < n; j++) {
                if (p.x_bit(j)) {
                    factor *= std::exp(-dt / model->t2[j]);
                }
            }
        }
        d(static_cast<Eigen::Index>(b)) = factor;
    }
    return d;
}

// m <- ptm(tableau) * m, using the signed-permutation structure of a
// Clifford transfer matrix (row scatter instead of a dense product).
void apply_tableau_ptm_left(const CliffordTableau& t, Matrix& m) {
    size_t n = t.num_qubits();
    size_t pdim = size_t{1} << (2 * n);
    Matrix out(m.rows(), m.cols());
    for (size_t b = 0; b < pdim; b++) {
        PauliOperator image = conjugate(t, pauli_from_index(n, b));
        double sign = image.phase() == 2 ? -1.0 : 1.0;
        out.row(static_cast<Eigen::Index>(pauli_index(image))) =
            sign * m.row(static_cast<Eigen::Index>(b));
    }
    m = std::move(out);
}

}  // namespace

size_t pauli_index(const PauliOperator& p) {
    size_t index = 0;
    for (size_t j = 0; j < p.num_qubits(); j++) {
        index = index * 4 + static_cast<size_t>(p.axis(j));
    }
    return index;
}

PauliOperator pauli_from_index(size_t n, size_t index) {
    PauliOperator p(n);
    for (size_t j = n; j-- > 0;) {
        p.set_axis(j, static_cast<int>(index & 3));
        index >>= 2;
    }
    return p;
}

CMatrix dense_pauli(const PauliOperator& p) {
    check_dense_cap(p.num_qubits(), "dense_pauli");
    SparsePauli sp(p);
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(sp.dim), static_cast<Eigen::Index>(sp.dim));
    for (uint64_t c = 0; c < sp.dim; c++) {
        m(static_cast<Eigen::Index>(c ^ sp.x_mask), static_cast<Eigen::Index>(c)) =
            sp.value_at_column(c);
    }
    return m;
}

CMatrix dense_unitary(const CircuitSpec& circuit) {
    circuit.validate();
    size_t n = circuit.num_qubits;
    check_dense_cap(n, "dense_unitary");
    size_t dim = size_t{1} << n;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CMatrix u = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& g : circuit.gates) {
        CMatrix gate;
        switch (g.tag) {
            case GateTag::H: {
                CMatrix h(2, 2);
                h << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
                CMatrix left = CMatrix::Identity(1 << g.q0, 1 << g.q0);
                CMatrix right = CMatrix::Identity(static_cast<Eigen::Index>(dim >> (g.q0 + 1)),
                                                  static_cast<Eigen::Index>(dim >> (g.q0 + 1)));
                gate = Eigen::kroneckerProduct(left, Eigen::kroneckerProduct(h, right).eval())
                           .eval();
                break;
            }
            case GateTag::S: {
                CMatrix s(2, 2);
                s << 1.0, 0.0, 0.0, 1.0i;
                CMatrix left = CMatrix::Identity(1 << g.q0, 1 << g.q0);
                CMatrix right = CMatrix::Identity(static_cast<Eigen::Index>(dim >> (g.q0 + 1)),
                                                  static_cast<Eigen::Index>(dim >> (g.q0 + 1)));
                gate = Eigen::kroneckerProduct(left, Eigen::kroneckerProduct(s, right).eval())
                           .eval();
                break;
            }
            case GateTag::CNOT: {
                gate = CMatrix::Zero(static_cast<Eigen::Index>(dim),
                                     static_cast<Eigen::Index>(dim));
                uint64_t cbit = uint64_t{1} << (n - 1 - g.q0);
                uint64_t tbit = uint64_t{1} << (n - 1 - g.q1);
                for (uint64_t b = 0; b < dim; b++) {
                    uint64_t out = (b & cbit) ? (b ^ tbit) : b;
                    gate(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(b)) = 1.0;
                }
                break;
            }
            case GateTag::X90:
            case GateTag::Y90:
            case GateTag::Z90:
            case GateTag::ZZ90: {
                // exp(-i pi/4 P) = (I - i P) / sqrt(2)
                PauliOperator generator(n);
                if (g.tag == GateTag::X90) {
                    generator = PauliOperator::single(n, g.q0, 'X');
                } else if (g.tag == GateTag::Y90) {
                    generator = PauliOperator::single(n, g.q0, 'Y');
                } else if (g.tag == GateTag::Z90) {
                    generator = PauliOperator::single(n, g.q0, 'Z');
                } else {
                    generator = multiply(PauliOperator::single(n, g.q0, 'Z'),
                                         PauliOperator::single(n, g.q1, 'Z'));
                }
                gate = (CMatrix::Identity(static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim)) -
                        1.0i * dense_pauli(generator)) *
                       inv_sqrt2;
                break;
            }
        }
        u = gate * u;
    }
    return u;
}

Matrix ptm_of_unitary(const CMatrix& u) {
    size_t dim = static_cast<size_t>(u.rows());
    size_t n = static_cast<size_t>(std::countr_zero(dim));
    check_dense_cap(n, "ptm_of_unitary");
    size_t pdim = size_t{1} << (2 * n);
    std::vector<SparsePauli> paulis;
    paulis.reserve(pdim);
    for (size_t a = 0; a < pdim; a++) {
        paulis.emplace_back(pauli_from_index(n, a));
    }
    Matrix r(static_cast<Eigen::Index>(pdim), static_cast<Eigen::Index>(pdim));
    CMatrix u_dag = u.adjoint();
    CMatrix w(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (size_t b = 0; b < pdim; b++) {
        const SparsePauli& pb = paulis[b];
        for (uint64_t row = 0; row < dim; row++) {
            uint64_t c = row ^ pb.x_mask;
            w.row(static_cast<Eigen::Index>(row)) =
                pb.value_at_column(c) * u_dag.row(static_cast<Eigen::Index>(c));
        }
        CMatrix v = u * w;  // U P_b U^dag
        for (size_t a = 0; a < pdim; a++) {
            r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                sparse_pauli_times_trace(paulis[a], v).real() / static_cast<double>(dim);
        }
    }
    return r;
}

Matrix ptm_of_kraus(size_t n, const std::vector<CMatrix>& kraus) {
    check_dense_cap(n, "ptm_of_kraus");
    size_t dim = size_t{1} << n;
    size_t pdim = size_t{1} << (2 * n);
    std::vector<SparsePauli> paulis;
    paulis.reserve(pdim);
    for (size_t a = 0; a < pdim; a++) {
        paulis.emplace_back(pauli_from_index(n, a));
    }
    Matrix r(static_cast<Eigen::Index>(pdim), static_cast<Eigen::Index>(pdim));
    for (size_t b = 0; b < pdim; b++) {
        const SparsePauli& pb = paulis[b];
        CMatrix v = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (const CMatrix& k : kraus) {
            CMatrix k_dag = k.adjoint();
            CMatrix w(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            for (uint64_t row = 0; row < dim; row++) {
                uint64_t c = row ^ pb.x_mask;
                w.row(static_cast<Eigen::Index>(row)) =
                    pb.value_at_column(c) * k_dag.row(static_cast<Eigen::Index>(c));
            }
            v += k * w;
        }
        for (size_t a = 0; a < pdim; a++) {
            r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                sparse_pauli_times_trace(paulis[a], v).real() / static_cast<double>(dim);
        }
    }
    return r;
}

Matrix ptm_of_tableau(const CliffordTableau& t) {
    size_t n = t.num_qubits();
    check_dense_cap(n, "ptm_of_tableau");
    size_t pdim = size_t{1} << (2 * n);
    Matrix r = Matrix::Zero(static_cast<Eigen::Index>(pdim), static_cast<Eigen::Index>(pdim));
    for (size_t b = 0; b < pdim; b++) {
        PauliOperator image = conjugate(t, pauli_from_index(n, b));
        double sign = image.phase() == 2 ? -1.0 : 1.0;
        r(static_cast<Eigen::Index>(pauli_index(image)), static_cast<Eigen::Index>(b)) = sign;
    }
    return r;
}

DenseChannel densify(const CircuitSpec& circuit) {
    DenseChannel channel;
    channel.num_qubits = circuit.num_qubits;
    CMatrix u = dense_unitary(circuit);
    channel.kraus = {u};
    channel.ptm = ptm_of_unitary(u);
    return channel;
}

DenseChannel densify(const CliffordTableau& tableau) {
    DenseChannel channel;
    channel.num_qubits = tableau.num_qubits();
    channel.ptm = ptm_of_tableau(tableau);
    return channel;
}

DenseChannel densify(const NoiseModel& noise, size_t n, const CircuitSpec* circuit) {
    check_dense_cap(n, "densify");
    noise.validate();
    size_t pdim = size_t{1} << (2 * n);
    DenseChannel channel;
    channel.num_qubits = n;
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(pdim));
    std::vector<const DephasingModel*> stepwise;
    for (const auto& component : noise.components) {
        if (const auto* dm = std::get_if<DephasingModel>(&component)) {
            if (dm->mode == DephasingMode::stepwise) {
                stepwise.push_back(dm);
                continue;
            }
        }
        for (size_t b = 0; b < pdim; b++) {
            PauliOperator p = pauli_from_index(n, b);
            diag(static_cast<Eigen::Index>(b)) *=
                std::visit([&](const auto& c) { return attenuation(c, p); }, component);
        }
    }
    if (stepwise.empty()) {
        channel.ptm = Matrix(diag.asDiagonal());
        return channel;
    }
    if (!circuit) {
        throw std::invalid_argument("densify: stepwise dephasing needs the gate circuit");
    }
    for (const DephasingModel* model : stepwise) {
        if (!model->step_durations.empty() &&
            model->step_durations.size() != circuit->gates.size()) {
            throw std::invalid_argument("densify: step durations do not match the circuit");
        }
    }
    // Interleaved product over the circuit: (D_k G_k) ... (D_1 G_1). The
    // result includes the ideal gate action.
    Matrix interleaved = Matrix::Identity(static_cast<Eigen::Index>(pdim),
                                          static_cast<Eigen::Index>(pdim));
    double dt_scale =
        circuit->gates.empty() ? 0.0 : 1.0 / static_cast<double>(circuit->gates.size());
    for (size_t k = 0; k < circuit->gates.size(); k++) {
        const auto& g = circuit->gates[k];
        CliffordTableau gate =
            elementary(n, g.tag, g.q0, gate_is_two_qubit(g.tag) ? g.q1 : UINT32_MAX);
        apply_tableau_ptm_left(gate, interleaved);
        interleaved = dephasing_step_factors(n, stepwise, k, dt_scale).asDiagonal() * interleaved;
    }
    channel.ptm = diag.asDiagonal() * interleaved;
    return channel;
}

DenseChannel densify(const NoisyGate& gate) {
    gate.validate();
    check_dense_cap(gate.num_qubits, "densify");
    DenseChannel channel;
    channel.num_qubits = gate.num_qubits;
    if (gate.noise.has_stepwise_dephasing()) {
        // The interleaved stepwise product already realizes the gate.
        channel = densify(gate.noise, gate.num_qubits, &*gate.circuit);
    } else {
        DenseChannel noise_only = densify(gate.noise, gate.num_qubits, nullptr);
        Matrix full = ptm_of_tableau(gate.ideal);
        channel.ptm = noise_only.ptm * full;
    }
    return channel;
}

DenseChannel channel_from_kraus(size_t n, std::vector<CMatrix> kraus) {
    DenseChannel channel;
    channel.num_qubits = n;
    channel.ptm = ptm_of_kraus(n, kraus);
    channel.kraus = std::move(kraus);
    return channel;
}

DenseChannel amplitude_damping(size_t n, const std::vector<double>& gammas) {
    check_dense_cap(n, "amplitude_damping");
    if (gammas.size() != n) {
        throw std::invalid_argument("amplitude_damping: need one gamma per qubit");
    }
    std::vector<CMatrix> kraus{CMatrix::Identity(1, 1)};
    for (double gamma : gammas) {
        if (!(gamma >= 0.0 && gamma <= 1.0)) {
            throw std::invalid_argument("amplitude_damping: gamma must lie in [0, 1]");
        }
        CMatrix k0(2, 2), k1(2, 2);
        k0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - gamma);
        k1 << 0.0, std::sqrt(gamma), 0.0, 0.0;
        std::vector<CMatrix> next;
        next.reserve(kraus.size() * 2);
        for (const CMatrix& prefix : kraus) {
            next.push_back(Eigen::kroneckerProduct(prefix, k0).eval());
            next.push_back(Eigen::kroneckerProduct(prefix, k1).eval());
        }
        kraus = std::move(next);
    }
    return channel_from_kraus(n, std::move(kraus));
}

CMatrix apply_channel(const DenseChannel& channel, const CMatrix& rho) {
    size_t n = channel.num_qubits;
    size_t dim = size_t{1} << n;
    size_t pdim = size_t{1} << (2 * n);
    // Complex coefficients so non-Hermitian inputs (Choi basis elements) map
    // correctly; the channel extends complex-linearly over the Pauli basis.
    CVector coeffs(static_cast<Eigen::Index>(pdim));
    for (size_t b = 0; b < pdim; b++) {
        SparsePauli pb(pauli_from_index(n, b));
        coeffs(static_cast<Eigen::Index>(b)) =
            sparse_pauli_times_trace(pb, rho) / static_cast<double>(dim);
    }
    CVector out_coeffs = channel.ptm * coeffs;
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (size_t a = 0; a < pdim; a++) {
        SparsePauli pa(pauli_from_index(n, a));
        std::complex<double> c = out_coeffs(static_cast<Eigen::Index>(a));
        if (c == 0.0) {
            continue;
        }
        for (uint64_t col = 0; col < dim; col++) {
            out(static_cast<Eigen::Index>(col ^ pa.x_mask), static_cast<Eigen::Index>(col)) +=
                c * pa.value_at_column(col);
        }
    }
    return out;
}

double choi_min_eigenvalue(const DenseChannel& channel) {
    size_t dim = size_t{1} << channel.num_qubits;
    CMatrix choi = CMatrix::Zero(static_cast<Eigen::Index>(dim * dim),
                                 static_cast<Eigen::Index>(dim * dim));
    for (uint64_t i = 0; i < dim; i++) {
        for (uint64_t j = 0; j < dim; j++) {
            CMatrix e_ij = CMatrix::Zero(static_cast<Eigen::Index>(dim),
                                         static_cast<Eigen::Index>(dim));
            e_ij(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
            CMatrix mapped = apply_channel(channel, e_ij);
            choi.block(static_cast<Eigen::Index>(i * dim), static_cast<Eigen::Index>(j * dim),
                       static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) = mapped;
        }
    }
    choi /= static_cast<double>(dim);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(choi);
    return solver.eigenvalues().minCoeff();
}

double exact_pr0(const DenseChannel& noise) {
    size_t pdim = size_t{1} << (2 * noise.num_qubits);
    return noise.ptm.trace() / static_cast<double>(pdim);
}

double exact_average_fidelity(const CliffordTableau& ideal, const DenseChannel& noisy_gate) {
    if (ideal.num_qubits() != noisy_gate.num_qubits) {
        throw std::invalid_argument("exact_average_fidelity: dimension mismatch");
    }
    Matrix lambda = ptm_of_tableau(ideal).transpose() * noisy_gate.ptm;
    size_t n = noisy_gate.num_qubits;
    double pr0 = lambda.trace() / static_cast<double>(size_t{1} << (2 * n));
    double dim = static_cast<double>(size_t{1} << n);
    return (dim * pr0 + 1.0) / (dim + 1.0);
}

MonteCarloEstimate haar_average_fidelity_mc(const CliffordTableau& ideal,
                                            const DenseChannel& noisy_gate, size_t num_states,
                                            RandomStream& rng) {
    if (num_states < 2) {
        throw std::invalid_argument("haar_average_fidelity_mc: need at least 2 states");
    }
    size_t n = noisy_gate.num_qubits;
    check_dense_cap(n, "haar_average_fidelity_mc");
    size_t dim = size_t{1} << n;
    size_t pdim = size_t{1} << (2 * n);
    Matrix lambda = ptm_of_tableau(ideal).transpose() * noisy_gate.ptm;
    std::vector<SparsePauli> paulis;
    paulis.reserve(pdim);
    for (size_t b = 0; b < pdim; b++) {
        paulis.emplace_back(pauli_from_index(n, b));
    }
    long double sum = 0.0L, sum_sq = 0.0L;
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(pdim));
    for (size_t s = 0; s < num_states; s++) {
        CVector psi(static_cast<Eigen::Index>(dim));
        for (size_t k = 0; k < dim; k++) {
            psi(static_cast<Eigen::Index>(k)) = std::complex<double>(rng.normal(), rng.normal());
        }
        psi.normalize();
        for (size_t b = 0; b < pdim; b++) {
            coeffs(static_cast<Eigen::Index>(b)) =
                sparse_pauli_expectation(paulis[b], psi).real() / static_cast<double>(dim);
        }
        // F = <psi| Lambda(|psi><psi|) |psi> = 2^n * c^T R c
        double f = static_cast<double>(dim) * coeffs.dot(lambda * coeffs);
        sum += f;
        sum_sq += static_cast<long double>(f) * f;
    }
    MonteCarloEstimate estimate;
    long double count = static_cast<long double>(num_states);
    long double mean = sum / count;
    long double sample_var = (sum_sq - count * mean * mean) / (count - 1.0L);
    estimate.mean = static_cast<double>(mean);
    estimate.std_error = static_cast<double>(std::sqrt(std::max(0.0L, sample_var) / count));
    return estimate;
}

GroupAverageResult clifford_group_average_fidelity(const DenseChannel& noisy,
                                                   size_t n2_subset_size, RandomStream* rng) {
    size_t n = noisy.num_qubits;
    if (n != 1 && n != 2) {
        throw std::invalid_argument(
            "clifford_group_average_fidelity: exact enumeration only for n <= 2");
    }
    const auto& group = n == 1 ? single_qubit_clifford_group() : two_qubit_clifford_group();
    std::vector<size_t> picks;
    bool exact = n == 1;
    if (exact) {
        picks.resize(group.size());
        for (size_t i = 0; i < group.size(); i++) {
            picks[i] = i;
        }
    } else {
        if (rng == nullptr) {
            throw std::invalid_argument(
                "clifford_group_average_fidelity: n=2 subset average needs an rng");
        }
        if (n2_subset_size < 2) {
            throw std::invalid_argument("clifford_group_average_fidelity: subset too small");
        }
        picks.reserve(n2_subset_size);
        for (size_t i = 0; i < n2_subset_size; i++) {
            picks.push_back(static_cast<size_t>(rng->uniform_below(group.size())));
        }
    }
    size_t dim = size_t{1} << n;
    size_t pdim = size_t{1} << (2 * n);
    CVector zero_state = CVector::Zero(static_cast<Eigen::Index>(dim));
    zero_state(0) = 1.0;
    long double sum = 0.0L, sum_sq = 0.0L;
    Matrix averaged = Matrix::Zero(static_cast<Eigen::Index>(pdim),
                                   static_cast<Eigen::Index>(pdim));
    for (size_t pick : picks) {
        const auto& element = group[pick];
        CMatrix u = dense_unitary(element.circuit);
        CVector phi = u * zero_state;
        CMatrix rho = phi * phi.adjoint();
        CMatrix mapped = apply_channel(noisy, rho);
        double f = (phi.adjoint() * mapped * phi)(0, 0).real();
        sum += f;
        sum_sq += static_cast<long double>(f) * f;
        Matrix r_c = ptm_of_tableau(element.tableau);
        averaged += r_c.transpose() * noisy.ptm * r_c;
    }
    GroupAverageResult result;
    long double count = static_cast<long double>(picks.size());
    long double mean = sum / count;
    result.fidelity = static_cast<double>(mean);
    result.averaged_ptm = averaged / static_cast<double>(picks.size());
    if (!exact) {
        long double var = (sum_sq / count - mean * mean) / (count - 1.0L);
        result.std_error = static_cast<double>(std::sqrt(std::max(0.0L, var)));
    }
    return result;
}

// Twirling over local Cliffords and qubit permutations is never enumerated
// (24^n n! terms); it reduces to the Pauli twirl binned by weight. The Pauli
// twirl of Lambda keeps exactly the diagonal q_E (any channel becomes the
// stochastic Pauli channel {q_E}); conjugating by a local Clifford or a
// permutation permutes the error operators within a weight class (locals map
// X/Y/Z to signed X/Y/Z per site, permutations relabel sites, neither
// changes the weight), so averaging over the full group uniformizes q_E
// within each class and the channel is determined by Pr(w) alone.
std::vector<double> pauli_twirl_probabilities(const DenseChannel& noisy_gate,
                                              const CliffordTableau& ideal) {
    size_t n = noisy_gate.num_qubits;
    if (n > kMaxSpectrumQubits) {
        throw std::invalid_argument("pauli_twirl_probabilities: capped at n <= " +
                                    std::to_string(kMaxSpectrumQubits));
    }
    if (ideal.num_qubits() != n) {
        throw std::invalid_argument("pauli_twirl_probabilities: dimension mismatch");
    }
    Matrix lambda = ptm_of_tableau(ideal).transpose() * noisy_gate.ptm;
    size_t pdim = size_t{1} << (2 * n);
    std::vector<PauliOperator> paulis;
    paulis.reserve(pdim);
    for (size_t b = 0; b < pdim; b++) {
        paulis.push_back(pauli_from_index(n, b));
    }
    std::vector<double> probabilities(pdim, 0.0);
    for (size_t e = 0; e < pdim; e++) {
        long double q = 0.0L;
        for (size_t b = 0; b < pdim; b++) {
            double diag = lambda(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
            q += commutes(paulis[e], paulis[b]) ? diag : -diag;
        }
        probabilities[e] = static_cast<double>(q / static_cast<long double>(pdim));
    }
    return probabilities;
}

std::vector<double> pauli_twirl_spectrum(const DenseChannel& noisy_gate,
                                         const CliffordTableau& ideal) {
    size_t n = noisy_gate.num_qubits;
    std::vector<double> probabilities = pauli_twirl_probabilities(noisy_gate, ideal);
    std::vector<double> spectrum(n + 1, 0.0);
    for (size_t e = 0; e < probabilities.size(); e++) {
        spectrum[pauli_from_index(n, e).weight()] += probabilities[e];
    }
    return spectrum;
}

DenseEvaluator::DenseEvaluator(DenseChannel full_gate_channel, const NoisyGate* spam_source)
    : noise_(std::move(full_gate_channel)), spam_source_(spam_source) {}

double DenseEvaluator::overlap(const PauliOperator& input, const PauliOperator& observable) const {
    // x = Tr(U~(rho) M) / 2^n = s_in * s_obs * ptm(obs, in) for signed Paulis.
    double sign = (input.phase() == 2 ? -1.0 : 1.0) * (observable.phase() == 2 ? -1.0 : 1.0);
    double value = sign * noise_.ptm(static_cast<Eigen::Index>(pauli_index(observable)),
                                     static_cast<Eigen::Index>(pauli_index(input)));
    if (spam_source_) {
        value *= spam_attenuation(spam_source_->spam_prep, input);
        value *= spam_attenuation(spam_source_->spam_meas, observable);
    }
    return value;
}

double DenseEvaluator::calibration(const PauliOperator& input) const {
    if (!spam_source_) {
        return 1.0;
    }
    return spam_attenuation(spam_source_->spam_prep, input) *
           spam_attenuation(spam_source_->spam_meas, input);
}

bool DenseEvaluator::has_calibration() const {
    return spam_source_ != nullptr &&
           (spam_source_->spam_prep.has_value() || spam_source_->spam_meas.has_value());
}

}  // namespace twirlcert::oracle
