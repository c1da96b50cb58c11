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

#include "twirlcert/report.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace twirlcert {

namespace {

constexpr const char* kJsonFormatTag = "twirlcert-report-v1";
constexpr const char* kCsvFormatTag = "twirlcert-csv-v1";

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"':
                out += "\\\"";
                break;
            case '\\':
                out += "\\\\";
                break;
            case '\n':
                out += "\\n";
                break;
            case '\t':
                out += "\\t";
                break;
            default:
                out += c;
        }
    }
    out += '"';
}

}  // namespace

std::string format_double(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

std::string report_to_json(const CertificationReport& r) {
    std::string out;
    out.reserve(4096 + r.records.size() * 96);
    auto field = [&](const char* name) {
        out += '"';
        out += name;
        out += "\":";
    };
    out += "{\n";
    field("format");
    out += '"';
    out += kJsonFormatTag;
    out += "\",\n";
    field("n");
    out += std::to_string(r.num_qubits) + ",\n";
    field("seed");
    out += std::to_string(r.seed) + ",\n";
    field("epsilon");
    out += format_double(r.prob_epsilon) + ",\n";
    field("delta");
    out += format_double(r.delta) + ",\n";
    field("confidence_level");
    out += format_double(1.0 - r.prob_epsilon) + ",\n";
    field("range");
    out += "[" + format_double(r.range.first) + "," + format_double(r.range.second) + "],\n";
    field("shots");
    out += r.shots ? std::to_string(*r.shots) : std::string("\"exact\"");
    out += ",\n";
    field("m");
    out += std::to_string(r.m) + ",\n";
    field("pr0_raw");
    out += format_double(r.pr0_raw) + ",\n";
    field("pr0");
    out += format_double(r.pr0) + ",\n";
    field("avg_fidelity");
    out += format_double(r.avg_fidelity) + ",\n";
    field("decoherence_removed");
    out += r.decoherence_removed ? "true" : "false";
    out += ",\n";
    field("corrected_pr0_raw");
    out += format_double(r.corrected_pr0_raw) + ",\n";
    field("corrected_pr0");
    out += format_double(r.corrected_pr0) + ",\n";
    field("corrected_avg_fidelity");
    out += format_double(r.corrected_avg_fidelity) + ",\n";
    if (r.bootstrap_stderr) {
        field("bootstrap_stderr");
        out += format_double(*r.bootstrap_stderr) + ",\n";
    }
    field("per_weight");
    out += "[";
    for (size_t i = 0; i < r.per_weight.size(); i++) {
        const WeightRow& row = r.per_weight[i];
        out += i == 0 ? "\n" : ",\n";
        out += R"(  {"w":)" + std::to_string(row.w);
        out += ",\"k\":" + std::to_string(row.class_size);
        out += ",\"k_w\":" + std::to_string(row.k_w);
        out += ",\"t_placeholder\":" + format_double(row.t_placeholder);
        out += ",\"f_i\":" + format_double(row.f_i);
        out += ",\"f_e_raw\":" + format_double(row.f_e_raw);
        out += ",\"f_e\":" + format_double(row.f_e);
        out += ",\"e_d\":" + format_double(row.e_d);
        out += ",\"f_dc_raw\":" + format_double(row.f_dc_raw);
        out += ",\"f_dc\":" + format_double(row.f_dc);
        out += std::string(",\"replacement_fallback\":") +
               (row.replacement_fallback ? "true" : "false");
        out += std::string(",\"correction_excluded\":") +
               (row.correction_excluded ? "true" : "false");
        out += "}";
    }
    out += "\n],\n";
    field("records");
    out += "[";
    for (size_t i = 0; i < r.records.size(); i++) {
        const ExperimentRecord& rec = r.records[i];
        out += i == 0 ? "\n" : ",\n";
        out += R"(  {"input":")" + rec.input.str() + '"';
        out += ",\"w\":" + std::to_string(rec.weight);
        out += ",\"observable\":\"" + rec.observable.str() + '"';
        out += ",\"value\":" + format_double(rec.value);
        out += ",\"calibration\":" + format_double(rec.calibration);
        out += ",\"shots\":" + std::to_string(rec.shots_used);
        out += "}";
    }
    out += "\n],\n";
    field("warnings");
    out += "[";
    for (size_t i = 0; i < r.warnings.size(); i++) {
        if (i) {
            out += ",";
        }
        append_escaped(out, r.warnings[i]);
    }
    out += "]\n}\n";
    return out;
}

CertificationReport report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kJsonFormatTag) {
        throw std::invalid_argument("report_from_json: unknown format tag");
    }
    CertificationReport r;
    r.num_qubits = j.at("n").get<size_t>();
    r.seed = j.at("seed").get<uint64_t>();
    r.prob_epsilon = j.at("epsilon").get<double>();
    r.delta = j.at("delta").get<double>();
    auto range = j.at("range");
    r.range = {range.at(0).get<double>(), range.at(1).get<double>()};
    if (j.at("shots").is_string()) {
        r.shots = std::nullopt;
    } else {
        r.shots = j.at("shots").get<uint32_t>();
    }
    r.m = j.at("m").get<uint64_t>();
    r.pr0_raw = j.at("pr0_raw").get<double>();
    r.pr0 = j.at("pr0").get<double>();
    r.avg_fidelity = j.at("avg_fidelity").get<double>();
    r.decoherence_removed = j.at("decoherence_removed").get<bool>();
    r.corrected_pr0_raw = j.at("corrected_pr0_raw").get<double>();
    r.corrected_pr0 = j.at("corrected_pr0").get<double>();
    r.corrected_avg_fidelity = j.at("corrected_avg_fidelity").get<double>();
    if (j.contains("bootstrap_stderr")) {
        r.bootstrap_stderr = j.at("bootstrap_stderr").get<double>();
    }
    for (const auto& row_json : j.at("per_weight")) {
        WeightRow row;
        row.w = row_json.at("w").get<size_t>();
        row.class_size = row_json.at("k").get<uint64_t>();
        row.k_w = row_json.at("k_w").get<uint64_t>();
        row.t_placeholder = row_json.at("t_placeholder").get<double>();
        row.f_i = row_json.at("f_i").get<double>();
        row.f_e_raw = row_json.at("f_e_raw").get<double>();
        row.f_e = row_json.at("f_e").get<double>();
        row.e_d = row_json.at("e_d").get<double>();
        row.f_dc_raw = row_json.at("f_dc_raw").get<double>();
        row.f_dc = row_json.at("f_dc").get<double>();
        row.replacement_fallback = row_json.at("replacement_fallback").get<bool>();
        row.correction_excluded = row_json.at("correction_excluded").get<bool>();
        r.per_weight.push_back(row);
    }
    for (const auto& rec_json : j.at("records")) {
        ExperimentRecord rec;
        rec.input = PauliOperator::from_string(rec_json.at("input").get<std::string>());
        rec.weight = rec_json.at("w").get<size_t>();
        rec.observable = PauliOperator::from_string(rec_json.at("observable").get<std::string>());
        rec.value = rec_json.at("value").get<double>();
        rec.calibration = rec_json.at("calibration").get<double>();
        rec.shots_used = rec_json.at("shots").get<uint32_t>();
        r.records.push_back(std::move(rec));
    }
    for (const auto& warning : j.at("warnings")) {
        r.warnings.push_back(warning.get<std::string>());
    }
    return r;
}

std::string report_to_csv(const CertificationReport& r) {
    std::string out = "# ";
    out += kCsvFormatTag;
    out += " columns: w,k,k_w,t_placeholder,F_i,F_e,E_d,F_dc\n";
    out += "w,k,k_w,t_placeholder,F_i,F_e,E_d,F_dc\n";
    for (const WeightRow& row : r.per_weight) {
        out += std::to_string(row.w) + ",";
        out += std::to_string(row.class_size) + ",";
        out += std::to_string(row.k_w) + ",";
        out += format_double(row.t_placeholder) + ",";
        out += format_double(row.f_i) + ",";
        out += format_double(row.f_e) + ",";
        out += format_double(row.e_d) + ",";
        out += format_double(row.f_dc) + "\n";
    }
    return out;
}

}  // namespace twirlcert
