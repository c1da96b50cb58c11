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

#include "twirlcert/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "twirlcert/rng.hpp"

namespace twirlcert {

namespace {

// Stream-id tags for deriving independent substreams from the run seed.
constexpr uint64_t kStreamSampling = 1;
constexpr uint64_t kStreamMeasure = 2;
constexpr uint64_t kStreamCalibration = 3;
constexpr uint64_t kStreamBootstrap = 4;

constexpr uint64_t kEnumerateCap = uint64_t{1} << 18;
constexpr double kCalibrationFloor = 1e-6;

double clamp01(double x) {
    return std::min(1.0, std::max(0.0, x));
}

// class size / 4^n; exact for n <= 32, log-space beyond.
long double class_fraction(size_t n, size_t w) {
    if (n <= 32) {
        long double denom = std::ldexp(1.0L, static_cast<int>(2 * n));
        return static_cast<long double>(count_weight_class(n, w)) / denom;
    }
    return weight_class_fraction(n, w);
}

uint64_t class_size_or_zero(size_t n, size_t w) {
    try {
        return count_weight_class(n, w);
    } catch (const std::overflow_error&) {
        return 0;  // effectively unbounded for sampling purposes
    }
}

std::vector<PauliOperator> enumerate_weight_class(size_t n, size_t w) {
    std::vector<PauliOperator> out;
    std::vector<uint32_t> support(w);
    for (size_t i = 0; i < w; i++) {
        support[i] = static_cast<uint32_t>(i);
    }
    auto emit_letters = [&]() {
        std::vector<int> letter(w, 0);
        for (;;) {
            PauliOperator p(n);
            for (size_t i = 0; i < w; i++) {
                p.set_x_bit(support[i], letter[i] != 2);
                p.set_z_bit(support[i], letter[i] != 0);
            }
            out.push_back(std::move(p));
            size_t d = 0;
            while (d < w && letter[d] == 2) {
                letter[d] = 0;
                d++;
            }
            if (d == w) {
                break;
            }
            letter[d]++;
        }
    };
    // lexicographic combinations of the support
    for (;;) {
        emit_letters();
        size_t i = w;
        while (i > 0 && support[i - 1] == n - (w - i) - 1) {
            i--;
        }
        if (i == 0) {
            break;
        }
        support[i - 1]++;
        for (size_t j = i; j < w; j++) {
            support[j] = support[j - 1] + 1;
        }
    }
    return out;
}

// k distinct draws from the weight-w class. Enumerates-and-shuffles when the
// request covers a large share of a small class; rejection sampling with a
// seen-set otherwise.
std::vector<PauliOperator> sample_distinct(size_t n, size_t w, uint64_t k, uint64_t class_size,
                                           RandomStream& rng) {
    if (class_size != 0 && class_size <= kEnumerateCap && 2 * k >= class_size) {
        std::vector<PauliOperator> all = enumerate_weight_class(n, w);
        for (uint64_t i = 0; i < k; i++) {
            uint64_t j = i + rng.uniform_below(all.size() - i);
            std::swap(all[i], all[j]);
        }
        all.resize(k);
        return all;
    }
    std::vector<PauliOperator> out;
    out.reserve(k);
    std::unordered_set<PauliOperator, PauliBitsHash, PauliBitsEqual> seen;
    while (out.size() < k) {
        PauliOperator p = sample_uniform_weight(n, w, rng);
        if (seen.insert(p).second) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<PauliOperator> sample_with_replacement(size_t n, size_t w, uint64_t k,
                                                   RandomStream& rng) {
    std::vector<PauliOperator> out;
    out.reserve(k);
    for (uint64_t i = 0; i < k; i++) {
        out.push_back(sample_uniform_weight(n, w, rng));
    }
    return out;
}

// Mean of `shots` independent +-1 Bernoulli outcomes with expectation x.
double shot_noise_mean(double x, uint32_t shots, RandomStream& rng) {
    double p_plus = (1.0 + x) / 2.0;
    int64_t plus = 0;
    for (uint32_t s = 0; s < shots; s++) {
        if (rng.uniform_unit() < p_plus) {
            plus++;
        }
    }
    return static_cast<double>(2 * plus - static_cast<int64_t>(shots)) /
           static_cast<double>(shots);
}

double record_ratio(const ExperimentRecord& r, std::vector<std::string>* warnings) {
    if (std::abs(r.calibration) < kCalibrationFloor) {
        if (warnings) {
            warnings->push_back("calibration signal below floor for input " + r.input.str() +
                                "; using uncalibrated value");
        }
        return r.value;
    }
    return r.value / r.calibration;
}

}  // namespace

uint64_t plan_samples(double prob_epsilon, double delta, std::pair<double, double> range) {
    if (!(prob_epsilon > 0.0 && prob_epsilon < 1.0)) {
        throw std::invalid_argument("plan_samples: prob_epsilon must lie in (0, 1)");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("plan_samples: delta must be positive");
    }
    auto [a, b] = range;
    if (!(a < b)) {
        throw std::invalid_argument("plan_samples: degenerate range");
    }
    long double width = static_cast<long double>(b) - static_cast<long double>(a);
    long double bound = std::log(2.0L / static_cast<long double>(prob_epsilon)) * width * width /
                        (2.0L * static_cast<long double>(delta) * static_cast<long double>(delta));
    return static_cast<uint64_t>(std::ceil(bound));
}

std::map<size_t, uint64_t> stratify(size_t n, uint64_t m) {
    if (n == 0) {
        throw std::invalid_argument("stratify: qubit count must be positive");
    }
    if (m < n) {
        throw std::invalid_argument("stratify: m must be at least the number of strata");
    }
    std::map<size_t, uint64_t> allocation;
    std::vector<std::pair<long double, size_t>> remainders;  // (remainder, weight)
    uint64_t assigned = 0;
    if (n <= 32) {
        unsigned __int128 total = 0;
        std::vector<uint64_t> classes(n + 1, 0);
        for (size_t w = 1; w <= n; w++) {
            classes[w] = count_weight_class(n, w);
            total += classes[w];
        }
        for (size_t w = 1; w <= n; w++) {
            unsigned __int128 numer = static_cast<unsigned __int128>(m) * classes[w];
            uint64_t base = static_cast<uint64_t>(numer / total);
            long double rem = static_cast<long double>(numer % total) /
                              static_cast<long double>(total);
            allocation[w] = base;
            assigned += base;
            remainders.emplace_back(rem, w);
        }
    } else {
        long double total_fraction = 0.0L;
        std::vector<long double> fractions(n + 1, 0.0L);
        for (size_t w = 1; w <= n; w++) {
            fractions[w] = weight_class_fraction(n, w);
            total_fraction += fractions[w];
        }
        for (size_t w = 1; w <= n; w++) {
            long double quota = static_cast<long double>(m) * fractions[w] / total_fraction;
            uint64_t base = static_cast<uint64_t>(std::floor(quota));
            allocation[w] = base;
            assigned += base;
            remainders.emplace_back(quota - static_cast<long double>(base), w);
        }
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    uint64_t leftover = m - assigned;
    for (size_t i = 0; leftover > 0; i = (i + 1) % remainders.size()) {
        allocation[remainders[i].second]++;
        leftover--;
    }
    // Floor of one experiment per stratum, funded by the largest strata.
    for (size_t w = 1; w <= n; w++) {
        while (allocation[w] == 0) {
            auto donor = std::max_element(allocation.begin(), allocation.end(),
                                          [](const auto& a, const auto& b) {
                                              return a.second < b.second;
                                          });
            if (donor->second <= 1) {
                throw std::logic_error("stratify: cannot satisfy per-stratum floor");
            }
            donor->second--;
            allocation[w]++;
        }
    }
    return allocation;
}

void SamplingPlan::validate(size_t n) const {
    if (!(prob_epsilon > 0.0 && prob_epsilon < 1.0) || !(delta > 0.0)) {
        throw std::invalid_argument("sampling plan: invalid epsilon/delta");
    }
    if (!(range.first < range.second)) {
        throw std::invalid_argument("sampling plan: degenerate range");
    }
    uint64_t total = 0;
    for (const auto& [w, k] : allocation) {
        if (w == 0 || w > n) {
            throw std::invalid_argument("sampling plan: stratum weight out of range");
        }
        total += k;
    }
    if (total != m) {
        throw std::invalid_argument("sampling plan: allocation does not sum to m");
    }
    if (shots && *shots == 0) {
        throw std::invalid_argument("sampling plan: shot count must be positive");
    }
}

SamplingPlan make_sampling_plan(double prob_epsilon, double delta, std::pair<double, double> range,
                                size_t n, std::optional<uint32_t> shots,
                                std::optional<uint64_t> m_override) {
    SamplingPlan plan;
    plan.prob_epsilon = prob_epsilon;
    plan.delta = delta;
    plan.range = range;
    plan.m = m_override ? *m_override : plan_samples(prob_epsilon, delta, range);
    plan.allocation = stratify(n, plan.m);
    plan.shots = shots;
    plan.validate(n);
    return plan;
}

double OverlapEvaluator::calibration(const PauliOperator&) const {
    return 1.0;
}

double ScalableEvaluator::overlap(const PauliOperator& input,
                                  const PauliOperator& observable) const {
    double value = gate_overlap(*gate_, input, observable);
    value *= spam_attenuation(gate_->spam_prep, input);
    value *= spam_attenuation(gate_->spam_meas, observable);
    return value;
}

double ScalableEvaluator::calibration(const PauliOperator& input) const {
    // Reference experiment: prepare the input Pauli and read it back with no
    // gate in between.
    return spam_attenuation(gate_->spam_prep, input) *
           spam_attenuation(gate_->spam_meas, input);
}

bool ScalableEvaluator::has_calibration() const {
    return gate_->spam_prep.has_value() || gate_->spam_meas.has_value();
}

CertificationReport run_certification(const CliffordTableau& ideal, const OverlapEvaluator& eval,
                                      const SamplingPlan& plan, uint64_t seed, size_t workers) {
    size_t n = ideal.num_qubits();
    plan.validate(n);

    CertificationReport report;
    report.num_qubits = n;
    report.seed = seed;
    report.prob_epsilon = plan.prob_epsilon;
    report.delta = plan.delta;
    report.range = plan.range;
    report.shots = plan.shots;
    report.m = plan.m;

    // Phase 1 (sequential): draw the stratified inputs.
    struct StratumSpan {
        size_t w;
        size_t begin, end;
    };
    std::vector<StratumSpan> spans;
    for (const auto& [w, k] : plan.allocation) {
        WeightRow row;
        row.w = w;
        row.class_size = class_size_or_zero(n, w);
        row.k_w = k;
        RandomStream stream(derive_seed(seed, {kStreamSampling, w}));
        std::vector<PauliOperator> inputs;
        if (row.class_size != 0 && k > row.class_size) {
            row.replacement_fallback = true;
            report.warnings.push_back("stratum w=" + std::to_string(w) +
                                      " exhausted; sampling with replacement");
            inputs = sample_with_replacement(n, w, k, stream);
        } else {
            inputs = sample_distinct(n, w, k, row.class_size, stream);
        }
        StratumSpan span{w, report.records.size(), report.records.size() + inputs.size()};
        for (auto& input : inputs) {
            ExperimentRecord r;
            r.input = std::move(input);
            r.weight = w;
            report.records.push_back(std::move(r));
        }
        spans.push_back(span);
        report.per_weight.push_back(row);
    }

    // Phase 2 (parallel-safe): conjugate and evaluate each record with its own
    // derived stream; results do not depend on worker count or order.
    bool calibrated = eval.has_calibration();
    auto evaluate_range = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; i++) {
            ExperimentRecord& r = report.records[i];
            r.observable = conjugate(ideal, r.input);
            double exact_value = eval.overlap(r.input, r.observable);
            double exact_cal = calibrated ? eval.calibration(r.input) : 1.0;
            if (plan.shots) {
                r.shots_used = *plan.shots;
                RandomStream ms(derive_seed(seed, {kStreamMeasure, r.weight, i}));
                r.value = shot_noise_mean(exact_value, *plan.shots, ms);
                if (calibrated) {
                    RandomStream cs(derive_seed(seed, {kStreamCalibration, r.weight, i}));
                    r.calibration = shot_noise_mean(exact_cal, *plan.shots, cs);
                } else {
                    r.calibration = 1.0;
                }
            } else {
                r.value = exact_value;
                r.calibration = exact_cal;
            }
        }
    };
    size_t total = report.records.size();
    if (workers <= 1 || total < 2) {
        evaluate_range(0, total);
    } else {
        size_t used = std::min(workers, total);
        std::vector<std::thread> pool;
        size_t chunk = (total + used - 1) / used;
        for (size_t t = 0; t < used; t++) {
            size_t begin = t * chunk;
            size_t end = std::min(total, begin + chunk);
            if (begin < end) {
                pool.emplace_back(evaluate_range, begin, end);
            }
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }

    // Phase 3 (sequential, fixed order): stratum means and aggregates.
    long double pr0_acc = 0.0L;
    for (size_t s = 0; s < spans.size(); s++) {
        const auto& span = spans[s];
        WeightRow& row = report.per_weight[s];
        long double value_sum = 0.0L;
        long double cal_sum = 0.0L;
        for (size_t i = span.begin; i < span.end; i++) {
            value_sum += record_ratio(report.records[i], &report.warnings);
            cal_sum += report.records[i].calibration;
        }
        long double count = static_cast<long double>(span.end - span.begin);
        row.f_e_raw = static_cast<double>(value_sum / count);
        row.f_e = clamp01(row.f_e_raw);
        row.f_i = static_cast<double>(cal_sum / count);
        row.e_d = 1.0;
        row.f_dc_raw = row.f_e_raw;
        row.f_dc = row.f_e;
        pr0_acc += class_fraction(n, row.w) * (value_sum / count);
    }
    long double identity_fraction =
        n <= 32 ? 1.0L / std::ldexp(1.0L, static_cast<int>(2 * n))
                : std::exp(-static_cast<long double>(n) * std::log(4.0L));
    report.pr0_raw = static_cast<double>(identity_fraction + pr0_acc);
    report.pr0 = clamp01(report.pr0_raw);
    report.avg_fidelity = average_fidelity(report.pr0, n);
    report.corrected_pr0_raw = report.pr0_raw;
    report.corrected_pr0 = report.pr0;
    report.corrected_avg_fidelity = report.avg_fidelity;

    if (plan.bootstrap) {
        // Stratified resampling of records; diagnostic only.
        constexpr size_t kResamples = 200;
        RandomStream bs(derive_seed(seed, {kStreamBootstrap}));
        long double sum = 0.0L, sum_sq = 0.0L;
        for (size_t b = 0; b < kResamples; b++) {
            long double acc = 0.0L;
            for (const auto& span : spans) {
                size_t count = span.end - span.begin;
                long double value_sum = 0.0L;
                for (size_t i = 0; i < count; i++) {
                    size_t pick = span.begin + bs.uniform_below(count);
                    value_sum += record_ratio(report.records[pick], nullptr);
                }
                acc += class_fraction(n, span.w) * (value_sum / count);
            }
            double pr0_b = clamp01(static_cast<double>(identity_fraction + acc));
            double f_b = average_fidelity(pr0_b, n);
            sum += f_b;
            sum_sq += static_cast<long double>(f_b) * f_b;
        }
        long double mean = sum / kResamples;
        long double var = sum_sq / kResamples - mean * mean;
        report.bootstrap_stderr = static_cast<double>(std::sqrt(std::max(0.0L, var)));
    }
    return report;
}

CertificationReport run_certification(const NoisyGate& gate, const SamplingPlan& plan,
                                      uint64_t seed, size_t workers) {
    ScalableEvaluator eval(gate);
    return run_certification(gate.ideal, eval, plan, seed, workers);
}

double estimate_pr0(const std::vector<ExperimentRecord>& records, size_t n,
                    const std::map<size_t, uint64_t>& allocation) {
    if (records.empty()) {
        throw std::invalid_argument("estimate_pr0: no records");
    }
    std::map<size_t, std::pair<long double, uint64_t>> sums;  // weight -> (sum, count)
    for (const auto& r : records) {
        auto& [sum, count] = sums[r.weight];
        sum += record_ratio(r, nullptr);
        count++;
    }
    long double acc = n <= 32 ? 1.0L / std::ldexp(1.0L, static_cast<int>(2 * n))
                              : std::exp(-static_cast<long double>(n) * std::log(4.0L));
    for (const auto& [w, k] : allocation) {
        auto it = sums.find(w);
        if (it == sums.end() || it->second.second == 0) {
            throw std::invalid_argument("estimate_pr0: empty stratum w=" + std::to_string(w));
        }
        acc += class_fraction(n, w) *
               (it->second.first / static_cast<long double>(it->second.second));
    }
    return static_cast<double>(acc);
}

double average_fidelity(double pr0, size_t n) {
    if (!(pr0 >= 0.0 && pr0 <= 1.0)) {
        throw std::invalid_argument("average_fidelity: pr0 must lie in [0, 1]");
    }
    long double dim = std::ldexp(1.0L, static_cast<int>(n));
    return static_cast<double>((dim * static_cast<long double>(pr0) + 1.0L) / (dim + 1.0L));
}

void remove_decoherence(CertificationReport& report,
                        const std::vector<const DephasingModel*>& models, const NoisyGate& gate,
                        double floor) {
    size_t n = report.num_qubits;
    for (const DephasingModel* model : models) {
        model->validate();
        if (model->t2.size() != n) {
            throw std::invalid_argument("remove_decoherence: dephasing dimension mismatch");
        }
        if (model->mode == DephasingMode::stepwise && !gate.circuit) {
            throw std::invalid_argument("remove_decoherence: stepwise model needs the circuit");
        }
    }
    std::map<size_t, std::pair<long double, uint64_t>> sums;
    for (const auto& r : report.records) {
        double a = 1.0;
        for (const DephasingModel* model : models) {
            a *= model->mode == DephasingMode::stepwise
                     ? stepwise_attenuation(*model, *gate.circuit, r.input)
                     : attenuation(*model, r.observable);
        }
        auto& [sum, count] = sums[r.weight];
        sum += a;
        count++;
    }
    long double pr0_acc = 0.0L;
    for (auto& row : report.per_weight) {
        const auto& [sum, count] = sums.at(row.w);
        row.e_d = static_cast<double>(sum / static_cast<long double>(count));
        if (std::abs(row.e_d) < floor) {
            row.correction_excluded = true;
            row.f_dc_raw = row.f_e_raw;
            row.f_dc = row.f_e;
            report.warnings.push_back("stratum w=" + std::to_string(row.w) +
                                      ": decoherence attenuation below floor; not corrected");
        } else {
            row.f_dc_raw = row.f_e_raw / row.e_d;
            row.f_dc = clamp01(row.f_dc_raw);
        }
        pr0_acc += class_fraction(n, row.w) * static_cast<long double>(row.f_dc);
    }
    long double identity_fraction =
        n <= 32 ? 1.0L / std::ldexp(1.0L, static_cast<int>(2 * n))
                : std::exp(-static_cast<long double>(n) * std::log(4.0L));
    report.corrected_pr0_raw = static_cast<double>(identity_fraction + pr0_acc);
    report.corrected_pr0 = clamp01(report.corrected_pr0_raw);
    report.corrected_avg_fidelity = average_fidelity(report.corrected_pr0, n);
    report.decoherence_removed = true;
}

void remove_decoherence(CertificationReport& report, const DephasingModel& model,
                        const NoisyGate& gate, double floor) {
    remove_decoherence(report, std::vector<const DephasingModel*>{&model}, gate, floor);
}

}  // namespace twirlcert
