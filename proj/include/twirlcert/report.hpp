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

#ifndef TWIRLCERT_REPORT_HPP
#define TWIRLCERT_REPORT_HPP

#include <string>

#include "twirlcert/estimator.hpp"

namespace twirlcert {

// All floats in emitted reports are printed with 12 significant digits; the
// emission is byte-deterministic for a given report, and parsing an emitted
// report and re-emitting it reproduces the bytes exactly.
std::string report_to_json(const CertificationReport& report);
CertificationReport report_from_json(const std::string& text);

// Per-weight table mirroring the certification summary layout; the column
// set is frozen and versioned in the leading comment line.
std::string report_to_csv(const CertificationReport& report);

// %.12g formatting used across report emission.
std::string format_double(double value);

}  // namespace twirlcert

#endif
