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

#ifndef TWIRLCERT_CLI_HPP
#define TWIRLCERT_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace twirlcert {

// Runs the command-line front end in-process (the binary in tools/ is a thin
// wrapper). Exit codes: 0 success, 1 validation failure, 2 size cap exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twirlcert

#endif
