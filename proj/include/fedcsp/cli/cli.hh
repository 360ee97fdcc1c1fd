/*
 * Copyright (c) 2026, The fedcsp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef FEDCSP_CLI_CLI_HH_
#define FEDCSP_CLI_CLI_HH_

#include <iosfwd>
#include <string>
#include <vector>

namespace fedcsp {
namespace cli {

/// Runs `fedcsp <args...>` (args exclude the program name) and returns the
/// exit code: 0 success, 1 property violated or conformance failure,
/// 2 usage or resource error.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace fedcsp

#endif  // FEDCSP_CLI_CLI_HH_
