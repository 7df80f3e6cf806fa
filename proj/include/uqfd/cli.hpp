// Copyright 2026 The uqfd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UQFD__CLI_HPP_
#define UQFD__CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace uqfd
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_data_error = 1;
inline constexpr int exit_usage_error = 2;

/**
 * @brief Batch front end: simulate, predict, score, evaluate, report.
 *
 * `args` excludes the program name. Returns 2 for usage errors (bad flags, unknown names,
 * invalid config), 1 for data errors.
 */
int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace uqfd

#endif  // UQFD__CLI_HPP_
