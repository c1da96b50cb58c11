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

#include "twirlcert/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace twirlcert {

namespace {

std::string trim(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_tokens(const std::string& s, const char* separators = " \t,") {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find_first_of(separators, pos);
        if (next == std::string::npos) {
            next = s.size();
        }
        if (next > pos) {
            out.push_back(s.substr(pos, next - pos));
        }
        pos = next + 1;
    }
    return out;
}

double parse_double_field(const std::string& value, const std::string& field) {
    try {
        size_t used = 0;
        double d = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing");
        }
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field + ": expected a number, got '" + value + "'");
    }
}

uint64_t parse_u64_field(const std::string& value, const std::string& field) {
    uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(field + ": expected a nonnegative integer, got '" + value + "'");
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& field) {
    std::vector<double> out;
    for (const auto& token : split_tokens(value)) {
        out.push_back(parse_double_field(token, field));
    }
    if (out.empty()) {
        throw ConfigError(field + ": expected at least one number");
    }
    return out;
}

// Raw sectioned key/value pairs, in file order within each section.
using SectionMap = std::map<std::string, std::vector<std::pair<std::string, std::string>>>;

SectionMap read_sections(const std::string& text) {
    static const char* kKnownSections[] = {"system", "gate", "noise", "sampling", "output"};
    SectionMap sections;
    std::istringstream lines(text);
    std::string line, current;
    size_t line_no = 0;
    while (std::getline(lines, line)) {
        line_no++;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            }
            current = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const char* name : kKnownSections) {
                known |= current == name;
            }
            if (!known) {
                throw ConfigError("config: unknown section [" + current + "]");
            }
            sections[current];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos || current.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value inside a section");
        }
        sections[current].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return sections;
}

PauliChannel parse_pauli_errors(const std::string& value, size_t n, const std::string& field) {
    PauliChannel channel;
    channel.num_qubits = n;
    double total = 0.0;
    bool identity_given = false;
    for (const auto& token : split_tokens(value, " \t,")) {
        auto colon = token.find(':');
        if (colon == std::string::npos) {
            throw ConfigError(field + ": entries take the form PAULISTRING:PROB");
        }
        PauliOperator p = PauliOperator::from_string(token.substr(0, colon));
        if (p.num_qubits() != n) {
            throw ConfigError(field + ": entry '" + token + "' has wrong length");
        }
        if (p.phase() != 0) {
            throw ConfigError(field + ": entries must be unsigned Paulis");
        }
        double prob = parse_double_field(token.substr(colon + 1), field);
        identity_given |= p.is_identity_bits();
        total += prob;
        channel.errors.emplace_back(std::move(p), prob);
    }
    if (!identity_given) {
        if (total > 1.0 + 1e-12) {
            throw ConfigError(field + ": probabilities exceed 1 with no identity entry");
        }
        channel.errors.emplace_back(PauliOperator(n), 1.0 - total);
    }
    try {
        channel.validate();
    } catch (const std::exception& e) {
        throw ConfigError(field + ": " + e.what());
    }
    return channel;
}

DephasingModel parse_dephasing(const std::map<std::string, std::string>& args, size_t n,
                               const std::string& field) {
    DephasingModel model;
    auto t2_it = args.find("t2");
    if (t2_it == args.end()) {
        throw ConfigError(field + ".t2: required");
    }
    model.t2 = parse_double_list(t2_it->second, field + ".t2");
    if (model.t2.size() == 1) {
        model.t2.assign(n, model.t2[0]);
    }
    if (model.t2.size() != n) {
        throw ConfigError(field + ".t2: expected 1 or n values");
    }
    auto tau_it = args.find("tau");
    if (tau_it == args.end()) {
        throw ConfigError(field + ".tau: required");
    }
    model.tau = parse_double_field(tau_it->second, field + ".tau");
    if (auto it = args.find("mode"); it != args.end()) {
        if (it->second == "endpoint") {
            model.mode = DephasingMode::endpoint;
        } else if (it->second == "stepwise") {
            model.mode = DephasingMode::stepwise;
        } else {
            throw ConfigError(field + ".mode: expected endpoint or stepwise");
        }
    }
    if (auto it = args.find("step_durations"); it != args.end()) {
        model.step_durations = parse_double_list(it->second, field + ".step_durations");
    }
    try {
        model.validate();
    } catch (const std::exception& e) {
        throw ConfigError(field + ": " + e.what());
    }
    return model;
}

std::map<std::string, std::string> parse_inline_args(const std::string& text,
                                                     const std::string& field) {
    std::map<std::string, std::string> args;
    for (const auto& token : split_tokens(text, " \t")) {
        auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(field + ": expected key=value, got '" + token + "'");
        }
        args[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return args;
}

// Splits "kind1(args) kind2(args)" at top level.
std::vector<std::string> split_components(const std::string& text, const std::string& field) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
            pos++;
        }
        if (pos >= text.size()) {
            break;
        }
        size_t open = text.find('(', pos);
        if (open == std::string::npos) {
            throw ConfigError(field + ": component needs the form kind(...)");
        }
        size_t close = text.find(')', open);
        if (close == std::string::npos) {
            throw ConfigError(field + ": unbalanced parentheses");
        }
        out.push_back(trim(text.substr(pos, close - pos + 1)));
        pos = close + 1;
    }
    if (out.empty()) {
        throw ConfigError(field + ": expected at least one component");
    }
    return out;
}

}  // namespace

NoiseComponent parse_noise_component(const std::string& text, size_t n) {
    const std::string field = "noise component '" + text + "'";
    size_t open = text.find('(');
    size_t close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ConfigError(field + ": expected kind(args)");
    }
    std::string kind = trim(text.substr(0, open));
    auto args = parse_inline_args(text.substr(open + 1, close - open - 1), field);
    if (kind == "depolarizing") {
        auto it = args.find("p");
        if (it == args.end()) {
            throw ConfigError(field + ".p: required");
        }
        double p = parse_double_field(it->second, field + ".p");
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError(field + ".p: must lie in [0, 1]");
        }
        return GlobalDepolarizing{n, p};
    }
    if (kind == "pauli") {
        auto it = args.find("errors");
        if (it == args.end()) {
            throw ConfigError(field + ".errors: required");
        }
        return parse_pauli_errors(it->second, n, field + ".errors");
    }
    if (kind == "dephasing") {
        return parse_dephasing(args, n, field);
    }
    throw ConfigError(field + ": unknown kind '" + kind + "'");
}

RunConfig parse_config(const std::string& text) {
    SectionMap sections = read_sections(text);
    RunConfig config;

    auto get = [&](const std::string& section) {
        std::map<std::string, std::string> out;
        auto it = sections.find(section);
        if (it == sections.end()) {
            return out;
        }
        for (const auto& [key, value] : it->second) {
            if (!out.emplace(key, value).second) {
                throw ConfigError(section + "." + key + ": duplicate key");
            }
        }
        return out;
    };
    auto reject_unknown = [](const std::map<std::string, std::string>& kv,
                             const std::string& section,
                             std::initializer_list<const char*> known) {
        for (const auto& [key, value] : kv) {
            bool ok = false;
            for (const char* name : known) {
                ok |= key == name;
            }
            if (!ok) {
                throw ConfigError(section + "." + key + ": unknown key");
            }
        }
    };

    auto system = get("system");
    reject_unknown(system, "system", {"n", "backend"});
    if (!system.count("n")) {
        throw ConfigError("system.n: required");
    }
    config.n = parse_u64_field(system.at("n"), "system.n");
    if (config.n == 0) {
        throw ConfigError("system.n: must be positive");
    }
    if (auto it = system.find("backend"); it != system.end()) {
        if (it->second == "scalable") {
            config.backend = Backend::scalable;
        } else if (it->second == "dense") {
            config.backend = Backend::dense;
        } else {
            throw ConfigError("system.backend: expected scalable or dense");
        }
    }

    auto gate = get("gate");
    reject_unknown(gate, "gate", {"kind", "seed_qubit", "chain", "circuit_file", "circuit"});
    std::string gate_kind = gate.count("kind") ? gate.at("kind") : "spreader";
    if (gate_kind == "spreader") {
        config.gate_kind = GateKind::spreader;
        uint64_t seed_qubit = gate.count("seed_qubit")
                                  ? parse_u64_field(gate.at("seed_qubit"), "gate.seed_qubit")
                                  : config.n;  // paper-style default: the last qubit
        if (seed_qubit < 1 || seed_qubit > config.n) {
            throw ConfigError("gate.seed_qubit: must lie in 1..n");
        }
        config.seed_qubit = static_cast<uint32_t>(seed_qubit - 1);
        if (auto it = gate.find("chain"); it != gate.end()) {
            std::vector<std::pair<uint32_t, uint32_t>> chain;
            for (const auto& token : split_tokens(it->second, " \t,")) {
                auto colon = token.find(':');
                if (colon == std::string::npos) {
                    throw ConfigError("gate.chain: pairs take the form SRC:DST (1-based)");
                }
                uint64_t src = parse_u64_field(token.substr(0, colon), "gate.chain");
                uint64_t dst = parse_u64_field(token.substr(colon + 1), "gate.chain");
                if (src < 1 || src > config.n || dst < 1 || dst > config.n) {
                    throw ConfigError("gate.chain: qubit out of range");
                }
                chain.emplace_back(static_cast<uint32_t>(src - 1),
                                   static_cast<uint32_t>(dst - 1));
            }
            config.chain = std::move(chain);
        }
    } else if (gate_kind == "circuit") {
        config.gate_kind = GateKind::circuit;
        if (gate.count("circuit_file")) {
            config.circuit_file = gate.at("circuit_file");
        } else if (gate.count("circuit")) {
            config.circuit_text = gate.at("circuit");
        } else {
            throw ConfigError("gate.circuit_file: required when gate.kind = circuit");
        }
    } else {
        throw ConfigError("gate.kind: expected spreader or circuit");
    }

    auto noise = get("noise");
    reject_unknown(noise, "noise",
                   {"kind", "p", "errors", "t2", "tau", "mode", "step_durations", "components",
                    "spam_prep", "spam_meas", "gamma"});
    config.noise.num_qubits = config.n;
    std::string noise_kind = noise.count("kind") ? noise.at("kind") : "none";
    if (noise_kind == "none") {
        // no components
    } else if (noise_kind == "depolarizing") {
        if (!noise.count("p")) {
            throw ConfigError("noise.p: required for depolarizing noise");
        }
        double p = parse_double_field(noise.at("p"), "noise.p");
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("noise.p: must lie in [0, 1]");
        }
        config.noise.components.push_back(GlobalDepolarizing{config.n, p});
    } else if (noise_kind == "pauli") {
        if (!noise.count("errors")) {
            throw ConfigError("noise.errors: required for pauli noise");
        }
        config.noise.components.push_back(
            parse_pauli_errors(noise.at("errors"), config.n, "noise.errors"));
    } else if (noise_kind == "dephasing") {
        std::map<std::string, std::string> args;
        for (const char* key : {"t2", "tau", "mode", "step_durations"}) {
            if (noise.count(key)) {
                args[key] = noise.at(key);
            }
        }
        config.noise.components.push_back(parse_dephasing(args, config.n, "noise"));
    } else if (noise_kind == "composite") {
        if (!noise.count("components")) {
            throw ConfigError("noise.components: required for composite noise");
        }
        for (const auto& part : split_components(noise.at("components"), "noise.components")) {
            config.noise.components.push_back(parse_noise_component(part, config.n));
        }
    } else if (noise_kind == "amplitude_damping") {
        if (!noise.count("gamma")) {
            throw ConfigError("noise.gamma: required for amplitude damping");
        }
        double gamma = parse_double_field(noise.at("gamma"), "noise.gamma");
        if (!(gamma >= 0.0 && gamma <= 1.0)) {
            throw ConfigError("noise.gamma: must lie in [0, 1]");
        }
        config.amplitude_damping_gamma = gamma;
    } else {
        throw ConfigError("noise.kind: unknown kind '" + noise_kind + "'");
    }
    for (const char* key : {"spam_prep", "spam_meas"}) {
        if (noise.count(key)) {
            NoiseModel spam;
            spam.num_qubits = config.n;
            for (const auto& part :
                 split_components(noise.at(key), std::string("noise.") + key)) {
                spam.components.push_back(parse_noise_component(part, config.n));
            }
            (key == std::string("spam_prep") ? config.spam_prep : config.spam_meas) =
                std::move(spam);
        }
    }

    auto sampling = get("sampling");
    reject_unknown(sampling, "sampling",
                   {"epsilon", "delta", "range", "shots", "m", "seed", "bootstrap"});
    if (sampling.count("epsilon")) {
        config.epsilon = parse_double_field(sampling.at("epsilon"), "sampling.epsilon");
    }
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
        throw ConfigError("sampling.epsilon: must lie in (0, 1)");
    }
    if (sampling.count("delta")) {
        config.delta = parse_double_field(sampling.at("delta"), "sampling.delta");
    }
    if (!(config.delta > 0.0)) {
        throw ConfigError("sampling.delta: must be positive");
    }
    if (sampling.count("range")) {
        auto values = parse_double_list(sampling.at("range"), "sampling.range");
        if (values.size() != 2 || !(values[0] < values[1])) {
            throw ConfigError("sampling.range: expected two numbers a < b");
        }
        config.range = {values[0], values[1]};
    }
    if (sampling.count("shots")) {
        const std::string& value = sampling.at("shots");
        if (value == "exact") {
            config.shots = std::nullopt;
        } else {
            uint64_t shots = parse_u64_field(value, "sampling.shots");
            if (shots == 0 || shots > UINT32_MAX) {
                throw ConfigError("sampling.shots: must be a positive 32-bit count or 'exact'");
            }
            config.shots = static_cast<uint32_t>(shots);
        }
    }
    if (sampling.count("m")) {
        config.m_override = parse_u64_field(sampling.at("m"), "sampling.m");
    }
    if (sampling.count("seed")) {
        config.seed = parse_u64_field(sampling.at("seed"), "sampling.seed");
    }
    if (sampling.count("bootstrap")) {
        const std::string& value = sampling.at("bootstrap");
        if (value != "true" && value != "false") {
            throw ConfigError("sampling.bootstrap: expected true or false");
        }
        config.bootstrap = value == "true";
    }

    auto output = get("output");
    reject_unknown(output, "output", {"json", "csv", "t_placeholder"});
    if (output.count("json")) {
        config.json_path = output.at("json");
    }
    if (output.count("csv")) {
        config.csv_path = output.at("csv");
    }
    if (output.count("t_placeholder")) {
        config.t_placeholder = parse_double_list(output.at("t_placeholder"),
                                                 "output.t_placeholder");
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config file '" + path + "' does not exist or is unreadable");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

CircuitSpec build_gate_circuit(const RunConfig& config) {
    if (config.gate_kind == GateKind::spreader) {
        return spreader_circuit(config.n, config.seed_qubit,
                                config.chain ? &*config.chain : nullptr);
    }
    std::string text = config.circuit_text;
    if (!config.circuit_file.empty()) {
        std::ifstream in(config.circuit_file);
        if (!in) {
            throw ConfigError("gate.circuit_file: '" + config.circuit_file +
                              "' does not exist or is unreadable");
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        text = buffer.str();
    }
    try {
        return CircuitSpec::parse(config.n, text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("gate.circuit: ") + e.what());
    }
}

NoisyGate build_noisy_gate(const RunConfig& config) {
    NoisyGate gate;
    gate.num_qubits = config.n;
    gate.circuit = build_gate_circuit(config);
    gate.ideal = from_circuit(*gate.circuit);
    gate.noise = config.noise;
    gate.spam_prep = config.spam_prep;
    gate.spam_meas = config.spam_meas;
    gate.validate();
    return gate;
}

SamplingPlan build_sampling_plan(const RunConfig& config) {
    try {
        SamplingPlan plan = make_sampling_plan(config.epsilon, config.delta, config.range,
                                               config.n, config.shots, config.m_override);
        plan.bootstrap = config.bootstrap;
        return plan;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sampling: ") + e.what());
    }
}

}  // namespace twirlcert
