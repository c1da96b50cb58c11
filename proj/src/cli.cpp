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

#include "twirlcert/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "twirlcert/config.hpp"
#include "twirlcert/oracle.hpp"
#include "twirlcert/report.hpp"

namespace twirlcert {

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<uint64_t> seed;
    size_t workers = 1;
    std::string out_dir;
    std::string gate_kind;
    std::optional<uint64_t> seed_qubit;  // 1-based
    std::string circuit_path;
};

void apply_gate_overrides(RunConfig& config, const CommonFlags& flags) {
    if (!flags.gate_kind.empty()) {
        if (flags.gate_kind == "spreader") {
            config.gate_kind = GateKind::spreader;
        } else if (flags.gate_kind == "circuit") {
            config.gate_kind = GateKind::circuit;
        } else {
            throw ConfigError("--gate: expected spreader or circuit");
        }
    }
    if (flags.seed_qubit) {
        if (*flags.seed_qubit < 1 || *flags.seed_qubit > config.n) {
            throw ConfigError("--seed-qubit: must lie in 1..n");
        }
        config.seed_qubit = static_cast<uint32_t>(*flags.seed_qubit - 1);
    }
    if (!flags.circuit_path.empty()) {
        config.gate_kind = GateKind::circuit;
        config.circuit_file = flags.circuit_path;
        config.circuit_text.clear();
    }
}

void check_dense_cap_or_throw(const RunConfig& config) {
    if (config.n > oracle::kMaxDenseQubits) {
        throw CapExceeded("dense backend is capped at n <= " +
                          std::to_string(oracle::kMaxDenseQubits) + " (got n = " +
                          std::to_string(config.n) + ")");
    }
}

oracle::DenseChannel dense_gate_channel(const RunConfig& config, const NoisyGate& gate) {
    oracle::DenseChannel channel = oracle::densify(gate);
    if (config.amplitude_damping_gamma) {
        oracle::DenseChannel damping = oracle::amplitude_damping(
            config.n, std::vector<double>(config.n, *config.amplitude_damping_gamma));
        channel.ptm = damping.ptm * channel.ptm;
        channel.kraus.clear();
    }
    return channel;
}

void apply_t_placeholders(CertificationReport& report, const RunConfig& config) {
    if (config.t_placeholder.empty()) {
        return;
    }
    if (config.t_placeholder.size() != report.per_weight.size()) {
        throw ConfigError("output.t_placeholder: expected one value per weight stratum");
    }
    for (size_t i = 0; i < report.per_weight.size(); i++) {
        report.per_weight[i].t_placeholder = config.t_placeholder[i];
    }
}

std::filesystem::path resolve_out(const std::string& out_dir, const std::string& name) {
    if (out_dir.empty()) {
        return name;
    }
    std::filesystem::create_directories(out_dir);
    return std::filesystem::path(out_dir) / name;
}

int cmd_plan(const CommonFlags& flags, std::ostream& out) {
    RunConfig config = load_config(flags.config_path);
    uint64_t m = config.m_override ? *config.m_override
                                   : plan_samples(config.epsilon, config.delta, config.range);
    auto allocation = stratify(config.n, m);
    out << "m = " << m << "\n";
    out << "w\tk\tk_w\n";
    for (const auto& [w, k_w] : allocation) {
        uint64_t class_size = 0;
        try {
            class_size = count_weight_class(config.n, w);
        } catch (const std::overflow_error&) {
        }
        out << w << "\t" << class_size << "\t" << k_w << "\n";
    }
    return 0;
}

int cmd_certify(const CommonFlags& flags, std::ostream& out) {
    RunConfig config = load_config(flags.config_path);
    apply_gate_overrides(config, flags);
    std::optional<uint64_t> seed = flags.seed ? flags.seed : config.seed;
    if (!seed) {
        throw ConfigError("sampling.seed: required (set it in the config or pass --seed)");
    }
    SamplingPlan plan = build_sampling_plan(config);
    NoisyGate gate = build_noisy_gate(config);
    CertificationReport report;
    if (config.backend == Backend::dense) {
        check_dense_cap_or_throw(config);
        oracle::DenseEvaluator eval(dense_gate_channel(config, gate), &gate);
        report = run_certification(gate.ideal, eval, plan, *seed, flags.workers);
    } else {
        if (config.amplitude_damping_gamma) {
            throw ConfigError("noise.kind: amplitude_damping requires system.backend = dense");
        }
        report = run_certification(gate, plan, *seed, flags.workers);
    }
    auto dephasing_models = gate.noise.dephasing_components();
    if (!dephasing_models.empty()) {
        remove_decoherence(report, dephasing_models, gate);
    }
    apply_t_placeholders(report, config);

    auto json_path = resolve_out(flags.out_dir, config.json_path);
    auto csv_path = resolve_out(flags.out_dir, config.csv_path);
    std::ofstream(json_path, std::ios::binary) << report_to_json(report);
    std::ofstream(csv_path, std::ios::binary) << report_to_csv(report);

    out << "n = " << report.num_qubits << ", m = " << report.m << ", seed = " << report.seed
        << "\n";
    out << "Pr(0) = " << format_double(report.pr0) << "\n";
    out << "avg_fidelity = " << format_double(report.avg_fidelity) << " +- "
        << format_double(report.delta) << " at confidence "
        << format_double(1.0 - report.prob_epsilon) << "\n";
    if (report.decoherence_removed) {
        out << "decoherence-removed Pr(0) = " << format_double(report.corrected_pr0)
            << ", avg_fidelity = " << format_double(report.corrected_avg_fidelity) << "\n";
    }
    out << "report: " << json_path.string() << ", " << csv_path.string() << "\n";
    return 0;
}

int cmd_oracle(const CommonFlags& flags, std::ostream& out) {
    RunConfig config = load_config(flags.config_path);
    apply_gate_overrides(config, flags);
    check_dense_cap_or_throw(config);
    NoisyGate gate = build_noisy_gate(config);
    oracle::DenseChannel channel = dense_gate_channel(config, gate);
    oracle::Matrix lambda = oracle::ptm_of_tableau(gate.ideal).transpose() * channel.ptm;
    double pr0 = lambda.trace() / static_cast<double>(size_t{1} << (2 * config.n));
    double fidelity = oracle::exact_average_fidelity(gate.ideal, channel);
    out << "{\n";
    out << "\"n\":" << config.n << ",\n";
    out << "\"pr0\":" << format_double(pr0) << ",\n";
    out << "\"avg_fidelity\":" << format_double(fidelity);
    if (config.n <= oracle::kMaxSpectrumQubits) {
        std::vector<double> spectrum = oracle::pauli_twirl_spectrum(channel, gate.ideal);
        out << ",\n\"spectrum\":[";
        for (size_t w = 0; w < spectrum.size(); w++) {
            out << (w ? "," : "") << format_double(spectrum[w]);
        }
        out << "]";
    }
    out << "\n}\n";
    return 0;
}

int cmd_spectrum(const CommonFlags& flags, std::ostream& out) {
    RunConfig config = load_config(flags.config_path);
    apply_gate_overrides(config, flags);
    if (config.n > oracle::kMaxSpectrumQubits) {
        throw CapExceeded("spectrum is capped at n <= " +
                          std::to_string(oracle::kMaxSpectrumQubits) + " (got n = " +
                          std::to_string(config.n) + ")");
    }
    NoisyGate gate = build_noisy_gate(config);
    oracle::DenseChannel channel = dense_gate_channel(config, gate);
    std::vector<double> spectrum = oracle::pauli_twirl_spectrum(channel, gate.ideal);
    double sum = 0.0;
    for (double value : spectrum) {
        sum += value;
    }
    out << "{\n\"n\":" << config.n << ",\n\"spectrum\":[";
    for (size_t w = 0; w < spectrum.size(); w++) {
        out << (w ? "," : "") << format_double(spectrum[w]);
    }
    out << "],\n\"sum\":" << format_double(sum) << "\n}\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"twirling-based average-fidelity certification of Clifford gates"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto add_common = [&](CLI::App* cmd, bool needs_run_flags) {
        cmd->add_option("--config", flags.config_path, "config file path")->required();
        cmd->add_option("--gate", flags.gate_kind, "gate kind override (spreader|circuit)");
        cmd->add_option("--seed-qubit", flags.seed_qubit, "spreader seed qubit (1-based)");
        cmd->add_option("--circuit", flags.circuit_path, "circuit file override");
        if (needs_run_flags) {
            cmd->add_option("--seed", flags.seed, "run seed (overrides sampling.seed)");
            cmd->add_option("--workers", flags.workers, "worker threads (output-invariant)");
            cmd->add_option("--out", flags.out_dir, "output directory for report files");
        }
    };

    CLI::App* plan = app.add_subcommand("plan", "print the Hoeffding sample plan");
    plan->add_option("--config", flags.config_path, "config file path")->required();
    CLI::App* certify = app.add_subcommand("certify", "run the twirling certification");
    add_common(certify, true);
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "print exact Pr(0) and fidelity (dense)");
    add_common(oracle_cmd, false);
    CLI::App* spectrum = app.add_subcommand("spectrum", "print the exact Pauli weight spectrum");
    add_common(spectrum, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (plan->parsed()) {
            return cmd_plan(flags, out);
        }
        if (certify->parsed()) {
            return cmd_certify(flags, out);
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle(flags, out);
        }
        if (spectrum->parsed()) {
            return cmd_spectrum(flags, out);
        }
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace twirlcert
