// Copyright 2026 The recdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECDP_CLI_HPP_
#define RECDP_CLI_HPP_

#include <ostream>

namespace recdp {

// Subcommands: subgraph, relalg, experiment. Exit codes: 0 success,
// 2 usage/data error, 3 capacity error, 1 internal failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recdp

#endif  // RECDP_CLI_HPP_
