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

#ifndef TWIRLCERT_ESTIMATOR_HPP
#define TWIRLCERT_ESTIMATOR_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twirlcert/channels.hpp"
#include "twirlcert/clifford.hpp"
#include "twirlcert/pauli.hpp"

namespace twirlcert {

// Number of experiments m = ceil(ln(2/prob_epsilon) * (b-a)^2 / (2 delta^2))
// needed so that Prob(|mean - mu| > delta) <= prob_epsilon for a mean of m
// independent samples confined to [a, b].
uint64_t plan_samples(double prob_epsilon, double delta,
                      std::pair<double, double> range = {0.0, 1.0});

// Splits m experiments across the weight strata w = 1..n proportionally to
// the class sizes 3^w * C(n,w), largest-remainder rounding, floor of one
// experiment per stratum. Requires m >= n.
std::map<size_t, uint64_t> stratify(size_t n, uint64_t m);

struct SamplingPlan {
    double prob_epsilon = 0.0;
    double delta = 0.0;
    std::pair<double, double> range{0.0, 1.0};
    uint64_t m = 0;
    std::map<size_t, uint64_t> allocation;  // weight -> k_w
    std::optional<uint32_t> shots;          // nullopt = exact expectation values
    bool bootstrap = false;                 // diagnostic bootstrap stderr of F-bar

    void validate(size_t n) const;
};

SamplingPlan make_sampling_plan(double prob_epsilon, double delta, std::pair<double, double> range,
                                size_t n, std::optional<uint32_t> shots,
                                std::optional<uint64_t> m_override = std::nullopt);

// One twirling experiment: prepared input Pauli, its conjugated observable
// M = U rho U^dag (sign included), and the measured overlap in [-1, 1].
// `calibration` is the reference signal the overlap is divided by when SPAM
// noise is modeled (1 otherwise); shots_used == 0 means exact values.
struct ExperimentRecord {
    PauliOperator input;
    size_t weight = 0;
    PauliOperator observable;
    double value = 0.0;
    double calibration = 1.0;
    uint32_t shots_used = 0;
};

struct WeightRow {
    size_t w = 0;
    uint64_t class_size = 0;  // 3^w * C(n,w); 0 when it overflows 64 bits
    uint64_t k_w = 0;
    double t_placeholder = 0.0;  // config-supplied preparation time, never simulated
    double f_i = 1.0;            // mean calibration signal
    double f_e_raw = 0.0;        // stratum mean of calibrated overlaps
    double f_e = 0.0;            // clamped to [0, 1]
    double e_d = 1.0;            // mean simulated decoherence attenuation
    double f_dc_raw = 0.0;       // f_e_raw / e_d
    double f_dc = 0.0;           // clamped to [0, 1]
    bool replacement_fallback = false;
    bool correction_excluded = false;
};

struct CertificationReport {
    size_t num_qubits = 0;
    uint64_t seed = 0;
    double prob_epsilon = 0.0;
    double delta = 0.0;
    std::pair<double, double> range{0.0, 1.0};
    std::optional<uint32_t> shots;
    uint64_t m = 0;
    std::vector<WeightRow> per_weight;
    double pr0_raw = 0.0;
    double pr0 = 0.0;
    double avg_fidelity = 0.0;
    bool decoherence_removed = false;
    double corrected_pr0_raw = 0.0;
    double corrected_pr0 = 0.0;
    double corrected_avg_fidelity = 0.0;
    std::optional<double> bootstrap_stderr;
    std::vector<ExperimentRecord> records;
    std::vector<std::string> warnings;
};

// Backend abstraction for evaluating expected overlaps: the scalable backend
// uses Pauli-diagonal attenuations, the dense backend reads the PTM diagonal.
class OverlapEvaluator {
  public:
    virtual ~OverlapEvaluator() = default;
    virtual double overlap(const PauliOperator& input, const PauliOperator& observable) const = 0;
    virtual double calibration(const PauliOperator& input) const;
    virtual bool has_calibration() const { return false; }
};

class ScalableEvaluator final : public OverlapEvaluator {
  public:
    explicit ScalableEvaluator(const NoisyGate& gate) : gate_(&gate) { gate.validate(); }
    double overlap(const PauliOperator& input, const PauliOperator& observable) const override;
    double calibration(const PauliOperator& input) const override;
    bool has_calibration() const override;

  private:
    const NoisyGate* gate_;
};

// Weight-stratified twirling certification: samples distinct input Paulis per
// stratum, conjugates them through the ideal tableau, evaluates overlaps
// (exactly or with simulated shot noise), and aggregates Pr(0) and the
// average fidelity. Deterministic for a fixed seed regardless of `workers`.
CertificationReport run_certification(const CliffordTableau& ideal, const OverlapEvaluator& eval,
                                      const SamplingPlan& plan, uint64_t seed,
                                      size_t workers = 1);
CertificationReport run_certification(const NoisyGate& gate, const SamplingPlan& plan,
                                       uint64_t seed, size_t workers = 1);

// Pr(0) = (1/4^n) (1 + sum_w class_w * mean_w) from per-stratum sample means;
// equals the full twirl sum exactly under full enumeration. Throws if an
// allocated stratum has no records.
double estimate_pr0(const std::vector<ExperimentRecord>& records, size_t n,
                    const std::map<size_t, uint64_t>& allocation);

// F-bar = (2^n pr0 + 1) / (2^n + 1). Requires 0 <= pr0 <= 1.
double average_fidelity(double pr0, size_t n);

// Computes E_d(w) as the mean simulated dephasing attenuation over each
// stratum's sampled Paulis (the same Paulis the report was built from),
// divides it out of F_e(w), and recomputes Pr(0)/F-bar from the corrected
// strata. Strata with E_d below `floor` are flagged and left uncorrected.
void remove_decoherence(CertificationReport& report,
                        const std::vector<const DephasingModel*>& models, const NoisyGate& gate,
                        double floor = 1e-6);
void remove_decoherence(CertificationReport& report, const DephasingModel& model,
                        const NoisyGate& gate, double floor = 1e-6);

}  // namespace twirlcert

#endif
